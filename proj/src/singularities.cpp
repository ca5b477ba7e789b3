#include "newton/singularities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace newton::singularities {

namespace {

constexpr std::size_t kAnchorCacheMax = 1024;

double nan_d() { return std::numeric_limits<double>::quiet_NaN(); }

double log_abs(const functions::EntireFunction& f, Complex z) {
  if (f.has_log()) return f.log_jet(z).v.real();
  Complex v = f.jet(z).v;
  if (!is_finite(v)) return nan_d();
  return std::log(std::abs(v));
}

struct LineFit {
  double slope = 0.0;
  double mean = 0.0;
};

LineFit fit_line(std::span<const double> y) {
  LineFit r;
  std::size_t n = y.size();
  if (n < 2) return r;
  double xm = 0.5 * static_cast<double>(n - 1);
  double sy = 0.0;
  for (double v : y) sy += v;
  double ym = sy / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double dx = static_cast<double>(k) - xm;
    sxx += dx * dx;
    sxy += dx * (y[k] - ym);
  }
  r.slope = sxy / sxx;
  r.mean = ym;
  return r;
}

}  // namespace

LogChart::EllState LogChart::advance_ell(const EllState& from, Complex z_to) const {
  if (exact_log_) {
    Jet l = f_.log_jet(z_to);
    if (!l.finite()) throw ChartError("log f overflowed during continuation");
    return {z_to, -l.v};
  }
  // Continue -log f along the segment with principal-log increments of the
  // ratio f(z_{k+1})/f(z_k); refine until every increment is small.
  Jet j0 = f_.jet(from.z);
  if (!j0.finite() || j0.v == Complex(0.0, 0.0)) {
    throw ChartError("f not evaluable at continuation start");
  }
  double est = std::abs(j0.d / j0.v) * std::abs(z_to - from.z);
  int n = static_cast<int>(std::clamp(std::ceil(2.0 * est), 1.0, 64.0));
  for (; n <= (1 << 14); n *= 2) {
    Complex ell = from.ell;
    Complex prev_v = j0.v;
    bool ok = true;
    for (int k = 1; k <= n; ++k) {
      Complex zk = from.z + (z_to - from.z) * (static_cast<double>(k) / n);
      Complex vk = f_.jet(zk).v;
      if (!is_finite(vk) || vk == Complex(0.0, 0.0)) {
        throw ChartError("f vanished or overflowed on the continuation segment");
      }
      Complex inc = std::log(vk / prev_v);
      if (std::abs(inc) > 1.2) {
        ok = false;
        break;
      }
      ell -= inc;
      prev_v = vk;
    }
    if (ok) return {z_to, ell};
  }
  throw ChartError("branch continuation failure: increments stay too large");
}

LogChart::EllState LogChart::nearest_anchor(Complex w) const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  EllState best{seed_z_, seed_w_};
  double best_d = std::abs(w - seed_w_);
  for (const auto& a : cache_->anchors) {
    double d = std::abs(w - a.ell);
    if (d < best_d) {
      best_d = d;
      best = a;
    }
  }
  return best;
}

void LogChart::remember(const EllState& s) const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  auto& anchors = cache_->anchors;
  if (anchors.size() >= kAnchorCacheMax) {
    anchors.erase(anchors.begin(), anchors.begin() + kAnchorCacheMax / 2);
  }
  anchors.push_back(s);
}

LogChart::EllState LogChart::solve_psi(Complex w_target) const {
  EllState state = nearest_anchor(w_target);
  double dist = std::abs(w_target - state.ell);
  int legs = std::max(1, static_cast<int>(std::ceil(dist / 0.75)));
  for (int leg = 1; leg <= legs; ++leg) {
    // split the remaining gap across the remaining legs
    Complex wt = state.ell + (w_target - state.ell) / (legs - leg + 1.0);
    // Newton solve of ell(z) = wt starting from the current state.
    bool converged = false;
    double prev_res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 60; ++it) {
      Complex res = state.ell - wt;
      double rn = std::abs(res);
      if (rn <= 1e-12 * (1.0 + std::abs(wt))) {
        converged = true;
        break;
      }
      if (rn > 4.0 * prev_res + 1.0) {
        throw ChartError("chart inversion diverged (left injectivity domain?)");
      }
      prev_res = rn;
      Jet j = f_.jet(state.z);
      if (!j.finite() || j.v == Complex(0.0, 0.0)) {
        throw ChartError("f not evaluable during chart inversion");
      }
      Complex dell = -j.d / j.v;  // (-log f)'
      if (dell == Complex(0.0, 0.0)) {
        throw ChartError("chart derivative vanished during inversion");
      }
      Complex dz = -res / dell;
      state = advance_ell(state, state.z + dz);
    }
    if (!converged) {
      throw ChartError("chart inversion did not converge");
    }
  }
  remember(state);
  return state;
}

Complex LogChart::psi(Complex w) const { return solve_psi(w).z; }

double LogChart::residual(Complex w) const {
  EllState s = solve_psi(w);
  return std::abs(s.ell - w);
}

ChartDefect LogChart::pushforward(Complex w) const {
  EllState s = solve_psi(w);
  Jet j = f_.jet(s.z);
  if (!j.finite()) throw ChartError("f overflowed at psi(w)");
  if (j.d == Complex(0.0, 0.0)) throw ChartError("f' vanished at psi(w)");
  Complex z_next = s.z - j.v / j.d;
  if (!is_finite(z_next)) throw ChartError("Newton step overflowed at psi(w)");
  EllState pushed = advance_ell(s, z_next);
  remember(pushed);
  ChartDefect d;
  d.w = w;
  d.G_w = pushed.ell;
  d.defect = std::abs(pushed.ell - (w + 1.0));
  return d;
}

std::vector<Complex> LogChart::continue_along(std::span<const Complex> path) const {
  std::vector<Complex> out;
  out.reserve(path.size());
  if (path.empty()) return out;
  // reach the first point from the seed anchor, then walk the polyline
  EllState state = advance_ell({seed_z_, seed_w_}, path[0]);
  out.push_back(state.ell);
  for (std::size_t k = 1; k < path.size(); ++k) {
    state = advance_ell(state, path[k]);
    out.push_back(state.ell);
  }
  return out;
}

LogChart build_chart(const functions::EntireFunction& f,
                     const std::function<Complex(double)>& ray, double r_target) {
  if (!(r_target > 0.0 && r_target < 1.0e6)) {
    throw std::invalid_argument("r_target must be positive");
  }
  const double margin = 2.0;  // seed at |f| < r_target e^-margin
  double eta = -std::log(r_target);
  double seed_t = -1.0;
  for (double t = 0.05; t <= 400.0; t += 0.05) {
    Complex z = ray(t);
    if (!is_finite(z)) break;
    double la = log_abs(f, z);
    if (std::isnan(la)) continue;
    if (la < -(eta + margin)) {
      seed_t = t;
      break;
    }
  }
  if (seed_t < 0.0) {
    throw ChartError("no decay along the given ray: |f| never fell below r_target/e^2");
  }
  LogChart chart;
  chart.f_ = f;
  chart.eta_ = eta;
  chart.exact_log_ = f.has_log();
  chart.seed_z_ = ray(seed_t);
  if (chart.exact_log_) {
    chart.seed_w_ = -f.log_jet(chart.seed_z_).v;
  } else {
    Complex v = f.jet(chart.seed_z_).v;
    if (!is_finite(v) || v == Complex(0.0, 0.0)) {
      throw ChartError("cannot anchor the branch: f not evaluable at the seed");
    }
    chart.seed_w_ = -std::log(v);  // principal branch at the anchor
  }
  return chart;
}

ChartDefect chart_pushforward(const LogChart& chart, Complex w) {
  return chart.pushforward(w);
}

Eta0Report find_eta0(const LogChart& chart, double eta_max, double eta_step) {
  if (!(eta_step > 0.0)) throw std::invalid_argument("eta_step must be positive");
  Eta0Report rep;
  rep.eta = chart.eta();
  for (double eta0 = chart.eta(); eta0 <= eta_max + 1e-12; eta0 += eta_step) {
    double max_defect = 0.0;
    double min_drift = std::numeric_limits<double>::infinity();
    bool usable = true;
    // serpentine order keeps consecutive targets adjacent for the inverter
    for (int row = 0; row < rep.grid_n && usable; ++row) {
      double im = -rep.im_span + 2.0 * rep.im_span * row / (rep.grid_n - 1);
      for (int col = 0; col < rep.grid_n; ++col) {
        int c = (row % 2 == 0) ? col : (rep.grid_n - 1 - col);
        double re = eta0 + rep.re_span * c / (rep.grid_n - 1);
        try {
          ChartDefect d = chart.pushforward(Complex(re, im));
          max_defect = std::max(max_defect, d.defect);
          min_drift = std::min(min_drift, d.G_w.real() - re);
        } catch (const ChartError&) {
          usable = false;
          break;
        }
      }
    }
    if (!usable) continue;
    rep.max_defect = max_defect;
    rep.min_re_drift = min_drift;
    if (max_defect < 0.5 && min_drift >= 0.5) {
      rep.found = true;
      rep.eta0 = eta0;
      return rep;
    }
  }
  rep.found = false;
  return rep;
}

namespace {

AsymptoticProbe finish_probe(AsymptoticProbe probe, const std::vector<Complex>& f_tail) {
  constexpr std::size_t K = 10;
  auto& s = probe.samples;
  if (s.size() < K) {
    probe.verdict = AsymptoticProbe::Verdict::Inconclusive;
    return probe;
  }
  bool monotone = true;
  for (std::size_t k = s.size() - K; k + 1 < s.size(); ++k) {
    double a = s[k].f_abs, b = s[k + 1].f_abs;
    if (std::isnan(a) || std::isnan(b) || b > a) {
      monotone = false;
      break;
    }
  }
  if (monotone && s.back().f_abs < 1e-8) {
    probe.verdict = AsymptoticProbe::Verdict::TendsToZero;
    return probe;
  }
  // Cauchy tail on the complex values => finite limit.
  if (f_tail.size() >= K) {
    Complex last = f_tail.back();
    if (is_finite(last)) {
      double spread = 0.0;
      for (std::size_t k = f_tail.size() - K; k < f_tail.size(); ++k) {
        if (!is_finite(f_tail[k])) {
          spread = std::numeric_limits<double>::infinity();
          break;
        }
        spread = std::max(spread, std::abs(f_tail[k] - last));
      }
      if (spread <= 1e-6 * (1.0 + std::abs(last))) {
        probe.verdict = AsymptoticProbe::Verdict::TendsTo;
        probe.limit = last;
        return probe;
      }
    }
  }
  probe.verdict = AsymptoticProbe::Verdict::Inconclusive;
  return probe;
}

}  // namespace

AsymptoticProbe probe_asymptotic(const functions::EntireFunction& f,
                                 const std::function<Complex(double)>& ray,
                                 double t_max, int n_samples) {
  if (!(t_max > 0.0) || n_samples < 16) {
    throw std::invalid_argument("probe needs t_max > 0 and >= 16 samples");
  }
  AsymptoticProbe probe;
  probe.path_kind = AsymptoticProbe::PathKind::Ray;
  std::vector<Complex> f_vals;
  f_vals.reserve(n_samples);
  for (int k = 1; k <= n_samples; ++k) {
    double t = t_max * static_cast<double>(k) / n_samples;
    Complex z = ray(t);
    double la = log_abs(f, z);
    double fa = std::isnan(la) ? nan_d() : std::exp(la);
    probe.samples.push_back({t, z, fa});
    f_vals.push_back(f.jet(z).v);
  }
  return finish_probe(std::move(probe), f_vals);
}

AsymptoticProbe probe_asymptotic(const functions::EntireFunction& f,
                                 const dynamics::OrbitRecord& orbit) {
  AsymptoticProbe probe;
  probe.path_kind = AsymptoticProbe::PathKind::Orbit;
  std::vector<Complex> f_vals;
  f_vals.reserve(orbit.points.size());
  for (std::size_t k = 0; k < orbit.points.size(); ++k) {
    probe.samples.push_back({static_cast<double>(k), orbit.points[k], orbit.f_abs[k]});
    f_vals.push_back(f.jet(orbit.points[k]).v);
  }
  return finish_probe(std::move(probe), f_vals);
}

double decay_slope(const dynamics::OrbitRecord& rec,
                   const functions::EntireFunction& f) {
  std::size_t n = rec.points.size();
  if (n < 30) throw std::invalid_argument("orbit too short for a decay slope");
  std::size_t start = n / 2;
  std::vector<double> y;
  y.reserve(n - start);
  for (std::size_t k = start; k < n; ++k) {
    double v = rec.log_f_offset[k];
    if (std::isnan(v) || std::isinf(v)) {
      v = log_abs(f, rec.points[k]) - rec.log_f_base;
    }
    if (std::isfinite(v)) y.push_back(v);
  }
  if (y.size() < 10) {
    throw std::invalid_argument("too few finite |f| samples in the orbit tail");
  }
  return fit_line(y).slope;
}

namespace {

bool co_escaping(const dynamics::OrbitRecord& rec) {
  if (rec.terminated_by == dynamics::Termination::Escaped) return true;
  std::size_t n = rec.log_f_offset.size();
  if (n < 20) return false;
  std::vector<double> tail;
  for (std::size_t k = n - 20; k < n; ++k) {
    double v = rec.log_f_offset[k];
    if (!std::isfinite(v)) return false;
    tail.push_back(v);
  }
  return fit_line(tail).slope < -0.01;
}

}  // namespace

BakerTypeReport classify_baker_type(const std::vector<dynamics::OrbitRecord>& orbits,
                                    const LogChart* chart) {
  if (orbits.size() < 2) {
    throw std::invalid_argument("need at least two orbits in the invariant domain");
  }
  for (const auto& rec : orbits) {
    if (rec.points.size() < 200) {
      throw std::invalid_argument("each orbit needs at least 200 recorded steps");
    }
    if (!co_escaping(rec)) {
      throw std::invalid_argument("orbits are not co-escaping");
    }
  }

  BakerTypeReport rep;
  if (chart) {
    rep.confidence = BakerTypeReport::Confidence::GroundTruthChart;
    const auto& f = chart->function();
    double drift_sum = 0.0;
    double max_im_range = 0.0;
    double min_level = std::numeric_limits<double>::infinity();
    double max_level = -std::numeric_limits<double>::infinity();
    double global_min_im = std::numeric_limits<double>::infinity();
    double global_max_im = -std::numeric_limits<double>::infinity();
    bool one_sided_drift = true;
    double im_drift_sign = 0.0;
    for (const auto& rec : orbits) {
      std::vector<Complex> w;
      if (f.has_log()) {
        w.reserve(rec.points.size());
        for (Complex z : rec.points) w.push_back(-f.log_jet(z).v);
      } else {
        w = chart->continue_along(rec.points);
      }
      std::size_t skip = w.size() / 4;  // transient
      std::vector<double> re, im;
      for (std::size_t k = skip; k < w.size(); ++k) {
        re.push_back(w[k].real());
        im.push_back(w[k].imag());
      }
      LineFit re_fit = fit_line(re);
      LineFit im_fit = fit_line(im);
      drift_sum += re_fit.slope;
      auto [mn, mx] = std::minmax_element(im.begin(), im.end());
      max_im_range = std::max(max_im_range, *mx - *mn);
      min_level = std::min(min_level, im_fit.mean);
      max_level = std::max(max_level, im_fit.mean);
      global_min_im = std::min(global_min_im, *mn);
      global_max_im = std::max(global_max_im, *mx);
      if (std::abs(im_fit.slope) < 0.02) {
        one_sided_drift = false;
      } else if (im_drift_sign == 0.0) {
        im_drift_sign = im_fit.slope > 0 ? 1.0 : -1.0;
      } else if (im_drift_sign * im_fit.slope < 0.0) {
        one_sided_drift = false;
      }
    }
    rep.evidence.re_drift = drift_sum / static_cast<double>(orbits.size());
    rep.evidence.im_range_per_orbit = max_im_range;
    rep.evidence.im_spread = max_level - min_level;
    if (rep.evidence.re_drift < 0.25) {
      rep.label = BakerTypeReport::Label::Undetermined;
      return rep;
    }
    if (max_im_range <= 2.0 && rep.evidence.im_spread >= 4.0) {
      rep.label = BakerTypeReport::Label::ParabolicI;
      return rep;
    }
    if (one_sided_drift && max_im_range > 2.0) {
      rep.label = BakerTypeReport::Label::ParabolicII;
      return rep;
    }
    if (max_im_range <= 2.0 && rep.evidence.im_spread < 4.0) {
      double h = 0.5 * (global_max_im - global_min_im);
      if (h > 0.0) {
        rep.label = BakerTypeReport::Label::Hyperbolic;
        rep.h_estimate = h;
        return rep;
      }
    }
    rep.label = BakerTypeReport::Label::Undetermined;
    return rep;
  }

  // Chartless heuristic: pair contraction c_n = |z_n - w_n| / |z_{n+1} - z_n|
  // over the tail of the first two orbits, then transversal drift of the
  // leading orbit to split the parabolic types.
  rep.confidence = BakerTypeReport::Confidence::Heuristic;
  const auto& a = orbits[0].points;
  const auto& b = orbits[1].points;
  std::size_t len = std::min(a.size(), b.size());
  std::size_t tail = std::min<std::size_t>(100, len / 2);
  std::vector<double> c;
  c.reserve(tail);
  for (std::size_t k = len - tail - 1; k + 1 < len; ++k) {
    double step = std::abs(a[k + 1] - a[k]);
    if (step == 0.0) continue;
    c.push_back(std::abs(a[k] - b[k]) / step);
  }
  if (c.size() < 10) {
    rep.label = BakerTypeReport::Label::Undetermined;
    return rep;
  }
  double cmin = *std::min_element(c.begin(), c.end());
  double cmax = *std::max_element(c.begin(), c.end());
  double cmean = 0.0;
  for (double v : c) cmean += v;
  cmean /= static_cast<double>(c.size());
  rep.evidence.c_min = cmin;
  rep.evidence.c_mean = cmean;
  rep.evidence.c_max = cmax;

  // transversal coordinate relative to the mean drift direction
  Complex drift = a[len - 1] - a[len - tail - 1];
  double mean_step = std::abs(drift) / static_cast<double>(tail);
  Complex dir = drift / std::abs(drift);
  std::vector<double> trans;
  trans.reserve(2 * tail);
  double tmin = std::numeric_limits<double>::infinity();
  double tmax2 = -std::numeric_limits<double>::infinity();
  for (std::size_t k = len - tail; k < len; ++k) {
    for (const auto* orbit : {&a, &b}) {
      double tau = (((*orbit)[k] - a[0]) / dir).imag();
      tmin = std::min(tmin, tau);
      tmax2 = std::max(tmax2, tau);
      if (orbit == &a) trans.push_back(tau);
    }
  }
  LineFit tfit = fit_line(trans);
  rep.evidence.transversal_drift = tfit.slope;

  if (cmax < 0.05) {
    bool drifting = std::abs(tfit.slope) > 0.02 * mean_step;
    rep.label = drifting ? BakerTypeReport::Label::ParabolicII
                         : BakerTypeReport::Label::ParabolicI;
    return rep;
  }
  if (cmin > 0.2) {
    double h = 0.5 * (tmax2 - tmin);
    if (h > 0.0) {
      rep.label = BakerTypeReport::Label::Hyperbolic;
      rep.h_estimate = h;
      return rep;
    }
  }
  rep.label = BakerTypeReport::Label::Undetermined;
  return rep;
}

const char* to_string(BakerTypeReport::Label label) {
  switch (label) {
    case BakerTypeReport::Label::ParabolicI: return "parabolic_I";
    case BakerTypeReport::Label::ParabolicII: return "parabolic_II";
    case BakerTypeReport::Label::Hyperbolic: return "hyperbolic";
    case BakerTypeReport::Label::Undetermined: return "undetermined";
  }
  return "unknown";
}

const char* to_string(AsymptoticProbe::Verdict v) {
  switch (v) {
    case AsymptoticProbe::Verdict::TendsToZero: return "tends_to_zero";
    case AsymptoticProbe::Verdict::TendsTo: return "tends_to";
    case AsymptoticProbe::Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

}  // namespace newton::singularities
