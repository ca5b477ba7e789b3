// Acceptance suite: one quantitative check per criterion, one line of output
// each. Exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "newton/dynamics.hpp"
#include "newton/expr.hpp"
#include "newton/functions.hpp"
#include "newton/quotient.hpp"
#include "newton/render.hpp"
#include "newton/singularities.hpp"

using namespace newton;
using functions::EntireFunction;
using functions::NewtonMap;
using functions::from_formula;

namespace {

constexpr double kGolden = 0.61803398874989485;

struct Check {
  int id;
  std::string name;
  std::function<bool(std::string&)> run;
};

functions::catalog::Params alpha_params(double a) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", a);
  functions::catalog::Params p;
  p["alpha"] = buf;
  return p;
}

EntireFunction f_alpha(double a) {
  return std::get<EntireFunction>(functions::catalog::make("f_alpha", alpha_params(a)));
}

NewtonMap n_alpha(double a) {
  return std::get<NewtonMap>(functions::catalog::make("n_alpha", alpha_params(a)));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::duration<double>>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

bool criterion_multiplier_law(std::string& detail) {
  double worst = 0.0;
  for (int m = 1; m <= 6; ++m) {
    std::string src = m == 1 ? "z" : "z^" + std::to_string(m);
    auto N = NewtonMap::from_function(from_formula(src));
    auto r = functions::classify_fixed_point(N, Complex(0.1, 0.0), 1e-10);
    if (r.multiplicity != m) return false;
    worst = std::max(worst, std::abs(r.multiplier - double(m - 1) / m));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "max |mult - (m-1)/m| = %.3g (tol 1e-10)", worst);
  detail = buf;
  return worst <= 1e-10;
}

bool criterion_infinity(std::string& detail) {
  auto a = functions::classify_infinity(2, 0);
  auto b = functions::classify_infinity(3, 0);
  auto c = functions::classify_infinity(7, 2);
  bool ok = a.kind == functions::InfinityClass::Kind::Repelling &&
            a.multiplier == 2.0 && b.multiplier == 1.5 &&
            c.kind == functions::InfinityClass::Kind::Parabolic &&
            c.multiplier == 1.0 && c.multiplicity == 3;
  detail = "m=2->2, m=3->3/2 exact; n=2 -> parabolic multiplicity 3";
  return ok;
}

bool criterion_reconstruction(std::string& detail) {
  // exact closed forms at 1e-10 relative
  auto Nexp = NewtonMap::from_function(from_formula("exp(-z)"));
  auto r1 = functions::reconstruct_ratio(Nexp, Complex(0, 0), Complex(2, 0));
  if (std::abs(r1.ratio - std::exp(-2.0)) > 1e-10 * std::exp(-2.0)) return false;
  auto Nsq = NewtonMap::from_function(from_formula("z^2"));
  auto r2 = functions::reconstruct_ratio(Nsq, Complex(1, 0), Complex(2, 0));
  if (std::abs(r2.ratio - 4.0) > 1e-10 * 4.0) return false;

  // five expression-backed functions, random endpoints, 1e-8 relative
  const char* sources[] = {"z^2-1", "z^3-1", "z^3-z+0.5", "exp(-z)",
                           "(z^2+2)*exp(0.5*z)"};
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (const char* s : sources) {
    EntireFunction f = from_formula(s);
    auto N = NewtonMap::from_function(f);
    int done = 0;
    while (done < 3) {
      Complex z0(2.0 + 2.0 * u(rng), 1.0 + 2.0 * u(rng));
      Complex z1(2.0 + 2.0 * u(rng), 1.0 + 2.0 * u(rng));
      if (std::abs(z1 - z0) < 0.05) continue;
      auto r = functions::reconstruct_ratio(N, z0, z1);
      Complex direct = f.jet(z1).v / f.jet(z0).v;
      worst = std::max(worst, std::abs(r.ratio - direct) / std::abs(direct));
      ++done;
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "worst relative error %.3g (tol 1e-8)", worst);
  detail = buf;
  return worst <= 1e-8;
}

bool criterion_chart_defects(std::string& detail) {
  auto t0 = std::chrono::steady_clock::now();
  // (a) exp(-z): defect identically zero
  auto fe = from_formula("exp(-z)");
  auto chart_e = singularities::build_chart(
      fe, [](double t) { return Complex(t, 0.0); }, 0.5);
  double worst_a = 0.0;
  for (Complex w : {Complex(2, 0), Complex(4, 3), Complex(9, -7), Complex(15, 12)}) {
    worst_a = std::max(worst_a, chart_e.pushforward(w).defect);
  }
  if (worst_a > 1e-12) {
    detail = "exp(-z) defect exceeded 1e-12";
    return false;
  }
  // (b) exp(-z^2): defect = 1/(4|w|) on |w| in [1, 100]
  auto fq = from_formula("exp(-z^2)");
  auto chart_q = singularities::build_chart(
      fq, [](double t) { return Complex(t, 0.0); }, 0.5);
  double worst_b = 0.0;
  for (double r : {1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0}) {
    for (double th : {-0.4, 0.0, 0.4}) {
      Complex w = r * std::exp(Complex(0, th));
      if (w.real() <= chart_q.eta() + 0.05) continue;
      double defect = chart_q.pushforward(w).defect;
      worst_b = std::max(worst_b, std::abs(defect - 0.25 / std::abs(w)));
    }
  }
  if (worst_b > 1e-6) {
    detail = "exp(-z^2) defect mismatch vs 1/(4|w|)";
    return false;
  }
  // (c) f_alpha, alpha = 1: eta0 search on the 41x41 grid
  auto chart_f = singularities::build_chart(
      f_alpha(1.0), [](double t) { return Complex(0.25, -t); }, 0.2);
  auto rep = singularities::find_eta0(chart_f, chart_f.eta() + 10.0);
  double elapsed = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "defects: exp(-z) %.2g, exp(-z^2) dev %.2g; f_alpha eta0=%.4g "
                "max_defect=%.4g drift>=%.3g; %.2fs (limit 60)",
                worst_a, worst_b, rep.eta0, rep.max_defect, rep.min_re_drift, elapsed);
  detail = buf;
  return rep.found && rep.max_defect < 0.5 && rep.min_re_drift >= 0.5 &&
         elapsed < 60.0;
}

bool criterion_flow_identity(std::string& detail) {
  struct Case {
    EntireFunction f;
    std::function<Complex(double)> ray;
    double r;
  };
  std::vector<Case> cases;
  cases.push_back({from_formula("exp(-z)"), [](double t) { return Complex(t, 0.0); }, 0.5});
  cases.push_back({from_formula("exp(-z^2)"), [](double t) { return Complex(t, 0.0); }, 0.5});
  cases.push_back({f_alpha(1.0), [](double t) { return Complex(0.25, -t); }, 0.2});
  std::mt19937_64 rng(1618);
  double worst = 0.0;
  for (const auto& c : cases) {
    auto chart = singularities::build_chart(c.f, c.ray, c.r);
    std::uniform_real_distribution<double> ur(chart.eta() + 1.0, chart.eta() + 14.0);
    std::uniform_real_distribution<double> ui(-9.0, 9.0);
    for (int k = 0; k < 334; ++k) {
      Complex w(ur(rng), ui(rng));
      double h = 1e-4;
      Complex dpsi = (chart.psi(w + h) - chart.psi(w - h)) / (2.0 * h);
      Jet j = c.f.jet(chart.psi(w));
      worst = std::max(worst, std::abs(dpsi + j.v / j.d));
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "max |psi' + f/f'(psi)| = %.3g over 1002 samples", worst);
  detail = buf;
  return worst <= 1e-6;
}

bool criterion_asymptotic_paths(std::string& detail) {
  EntireFunction f = f_alpha(1.0);
  double worst_final = 0.0;
  for (int k = 0; k <= 2; ++k) {
    double re = 0.25 + k;
    auto p = singularities::probe_asymptotic(
        f, [re](double t) { return Complex(re, -t); }, 20.0);
    if (p.verdict != singularities::AsymptoticProbe::Verdict::TendsToZero) return false;
    worst_final = std::max(worst_final, p.samples.back().f_abs);
  }
  auto p2 = singularities::probe_asymptotic(
      f, [](double t) { return Complex(t, 0.0); }, 20.0);
  if (p2.verdict != singularities::AsymptoticProbe::Verdict::TendsToZero) return false;
  worst_final = std::max(worst_final, p2.samples.back().f_abs);
  char buf[96];
  std::snprintf(buf, sizeof buf, "kind-1 (k=0,1,2) and kind-2 rays; worst final |f| = %.3g",
                worst_final);
  detail = buf;
  return worst_final < 1e-8;
}

bool criterion_decay_slope(std::string& detail) {
  auto fe = from_formula("exp(-z)");
  auto Ne = NewtonMap::from_function(fe);
  dynamics::IterationConfig cfg;
  cfg.max_iter = 400;
  cfg.escape_radius = 150.0;
  auto rec = dynamics::iterate_orbit(Ne, Complex(0, 0), cfg);
  auto out = dynamics::classify_orbit(rec, fe, cfg);
  double s1 = singularities::decay_slope(rec, fe);
  if (out.kind != dynamics::OrbitOutcome::Kind::EscapedFToZero) return false;

  auto N = n_alpha(1.0);
  dynamics::IterationConfig cfg2;
  cfg2.max_iter = 240;
  cfg2.tol_root = 0.0;  // the deep-tract step is below any positive tolerance
  auto rec2 = dynamics::iterate_orbit(N, Complex(0.25, -10.0), cfg2);
  double s2 = singularities::decay_slope(rec2, *N.function());
  char buf[96];
  std::snprintf(buf, sizeof buf, "slopes: exp(-z) %.6f, f_alpha seed 1/4-10i %.6f", s1, s2);
  detail = buf;
  return s1 >= -1.1 && s1 <= -0.9 && s2 >= -1.1 && s2 <= -0.9;
}

bool criterion_semiconjugacies(std::string& detail) {
  std::mt19937_64 rng(31415);
  std::uniform_real_distribution<double> ux(0.0, 1.0), uy(-1.0, 1.0), uy2(0.1, 1.0);
  double worst = 0.0;
  for (double alpha : {0.1, 0.3, 0.7, 0.9}) {
    std::vector<Complex> s1;
    while (s1.size() < 1000) {
      Complex Z(ux(rng), uy(rng));
      if (std::abs(1.0 + quotient::project(Z)) >= 1.0) s1.push_back(Z);
    }
    worst = std::max(worst, quotient::check_semiconjugacy(alpha, s1));
    std::vector<Complex> s2;
    while (s2.size() < 1000) s2.emplace_back(ux(rng), uy2(rng));
    worst = std::max(worst, quotient::check_semiconjugacy_expexp(alpha, s2));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "max residual %.3g over 8000 samples (tol 1e-9)", worst);
  detail = buf;
  return worst <= 1e-9;
}

bool criterion_g_structure(std::string& detail) {
  std::mt19937_64 rng(271828);
  std::uniform_real_distribution<double> ua(0.01, 3.0);
  double worst_prod = 0.0, worst_g = 0.0;
  for (int k = 0; k < 200; ++k) {
    double alpha = ua(rng);
    auto [z1, z2] = quotient::g_alpha_critical_points(alpha);
    worst_prod = std::max(worst_prod, std::abs(z1 * z2 - 1.0));
    worst_g = std::max(worst_g, std::abs(quotient::g_alpha_jet(alpha, z1).d));
    worst_g = std::max(worst_g, std::abs(quotient::g_alpha_jet(alpha, z2).d));
  }
  // expansion residual decays ~quadratically between |z| = 1e2 and 1e3
  bool decay_ok = true;
  double ratio_seen = 0.0;
  for (double alpha : {0.3, 0.7}) {
    auto e = quotient::g_alpha_expansion(alpha);
    double r2 = 0.0, r3 = 0.0;
    for (int k = 0; k < 32; ++k) {
      Complex dir = std::exp(two_pi_i() * (k / 32.0));
      Complex a = 100.0 * dir, b = 1000.0 * dir;
      r2 = std::max(r2, std::abs(quotient::g_alpha_eval(alpha, a) - a - e.a - e.b / a));
      r3 = std::max(r3, std::abs(quotient::g_alpha_eval(alpha, b) - b - e.a - e.b / b));
    }
    ratio_seen = r2 / r3;
    decay_ok = decay_ok && ratio_seen > 50.0 && ratio_seen < 200.0;
  }
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "|z1 z2 - 1| <= %.2g, |g'| <= %.2g, remainder ratio(1e2/1e3) = %.0f",
                worst_prod, worst_g, ratio_seen);
  detail = buf;
  return worst_prod <= 1e-12 && worst_g <= 1e-9 && decay_ok;
}

bool criterion_h_singular_values(std::string& detail) {
  for (double alpha : {0.3, 1.0}) {
    auto lim = quotient::h_alpha_asymptotic_limits(alpha, 50.0);
    double d_up = std::min(std::abs(lim.limit_up), std::abs(lim.limit_up - 1.0));
    double d_dn = std::min(std::abs(lim.limit_down), std::abs(lim.limit_down - 1.0));
    bool pair_ok = d_up <= 1e-6 && d_dn <= 1e-6 &&
                   std::abs(lim.limit_up - lim.limit_down) > 0.5;
    if (!pair_ok) return false;
    if (quotient::h_alpha_eval(alpha, Complex(0, 0)) != Complex(0, 0)) return false;
    if (quotient::h_alpha_eval(alpha, Complex(1, 0)) != Complex(1, 0)) return false;
  }
  detail = "limits along +-it form {0,1} within 1e-6; h(0)=0 and h(1)=1 exact";
  return true;
}

bool criterion_rotation_numbers(std::string& detail) {
  if (quotient::SineFamilyParams::m_eps_for(0.1) != 1) return false;
  auto est = quotient::rotation_number(quotient::SineFamilyParams::make(1.0, 0.1),
                                       0.0, 10000);
  if (std::abs(est.rho - 1.0) > 1e-3) return false;
  long n = 10000;
  double prev = -1.0;
  for (int k = 1; k <= 11; ++k) {
    double alpha = static_cast<double>(k) / 11.0;
    auto e = quotient::rotation_number(quotient::SineFamilyParams::make(alpha, 0.1),
                                       0.0, n);
    if (e.rho < prev - 2.0 / static_cast<double>(n)) return false;
    prev = e.rho;
  }
  double alpha = quotient::find_alpha_for_rotation(0.1, kGolden, 1e-3);
  auto verify = quotient::rotation_number(quotient::SineFamilyParams::make(alpha, 0.1),
                                          0.0, 100000);
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "m_eps(0.1)=1, Rot(1,0.1)=%.5f, monotone grid, Rot(%.6f)=%.6f vs golden",
                est.rho, alpha, verify.rho);
  detail = buf;
  return std::abs(verify.rho - kGolden) <= 1e-3;
}

bool criterion_renderer(std::string& detail) {
  auto t0 = std::chrono::steady_clock::now();
  render::SceneConfig sc;
  sc.map.family = "poly";
  sc.map.params["p"] = "z^3-1";
  sc.center = Complex(0, 0);
  sc.width = 4.0;
  sc.px_w = sc.px_h = 256;
  sc.iter.max_iter = 200;
  render::BasinImage base = render::render(sc, 1);
  if (base.roots.size() != 3) return false;
  std::size_t root_pixels = 0;
  for (auto c : base.outcome) root_pixels += c == render::PixelClass::Root;
  double coverage = double(root_pixels) / double(base.outcome.size());
  render::BasinImage w4 = render::render(sc, 4);
  render::BasinImage w8 = render::render(sc, 8);
  bool identical = base.rgb == w4.rgb && base.rgb == w8.rgb;
  double elapsed = seconds_since(t0);
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "3 roots, coverage %.4f%%, byte-identical x{1,4,8}: %s, %.2fs (limit 10)",
                100.0 * coverage, identical ? "yes" : "no", elapsed);
  detail = buf;
  return coverage >= 0.999 && identical && elapsed < 10.0;
}

bool criterion_baker_typing(std::string& detail) {
  // chart-backed: exp(-z)
  auto fe = from_formula("exp(-z)");
  auto Ne = NewtonMap::from_function(fe);
  auto chart_e = singularities::build_chart(
      fe, [](double t) { return Complex(t, 0.0); }, 0.5);
  dynamics::IterationConfig cfg;
  cfg.max_iter = 260;
  cfg.escape_radius = 250.0;
  std::vector<dynamics::OrbitRecord> orbits;
  orbits.push_back(dynamics::iterate_orbit(Ne, Complex(0, 0), cfg));
  orbits.push_back(dynamics::iterate_orbit(Ne, Complex(0, 5), cfg));
  auto rep_e = singularities::classify_baker_type(orbits, &chart_e);
  if (rep_e.label != singularities::BakerTypeReport::Label::ParabolicI) return false;
  if (rep_e.confidence != singularities::BakerTypeReport::Confidence::GroundTruthChart) {
    return false;
  }

  // chart-backed: f_alpha kind-1 basin
  auto N = n_alpha(1.0);
  auto chart_f = singularities::build_chart(
      f_alpha(1.0), [](double t) { return Complex(0.25, -t); }, 0.2);
  dynamics::IterationConfig cfg2;
  cfg2.max_iter = 300;
  cfg2.tol_root = 0.0;
  std::vector<dynamics::OrbitRecord> orbits2;
  orbits2.push_back(dynamics::iterate_orbit(N, Complex(0.25, -1.0), cfg2));
  orbits2.push_back(dynamics::iterate_orbit(N, Complex(0.29, -1.0), cfg2));
  auto rep_f = singularities::classify_baker_type(orbits2, &chart_f);
  if (rep_f.label != singularities::BakerTypeReport::Label::ParabolicI) return false;

  // heuristic: sine family at golden-mean rotation
  double alpha = quotient::find_alpha_for_rotation(0.1, kGolden, 1e-3);
  functions::catalog::Params p;
  {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", alpha);
    p["alpha"] = buf;
  }
  p["epsilon"] = "0.1";
  auto Ns = std::get<NewtonMap>(functions::catalog::make("sine", p));
  dynamics::IterationConfig cfg3;
  cfg3.max_iter = 400;
  cfg3.tol_root = 0.0;
  std::vector<dynamics::OrbitRecord> orbits3;
  orbits3.push_back(dynamics::iterate_orbit(Ns, Complex(0.10, 0.2), cfg3));
  orbits3.push_back(dynamics::iterate_orbit(Ns, Complex(0.45, 0.2), cfg3));
  auto rep_s = singularities::classify_baker_type(orbits3, nullptr);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "exp(-z): %s, f_alpha: %s, sine(golden): %s (h=%.3g, %s)",
                singularities::to_string(rep_e.label),
                singularities::to_string(rep_f.label),
                singularities::to_string(rep_s.label),
                rep_s.h_estimate ? *rep_s.h_estimate : 0.0,
                rep_s.confidence ==
                        singularities::BakerTypeReport::Confidence::Heuristic
                    ? "heuristic"
                    : "chart");
  detail = buf;
  return rep_s.label == singularities::BakerTypeReport::Label::Hyperbolic &&
         rep_s.confidence == singularities::BakerTypeReport::Confidence::Heuristic &&
         rep_s.h_estimate && *rep_s.h_estimate > 0.0;
}

}  // namespace

int main() {
  std::vector<Check> checks = {
      {1, "multiplier law (m-1)/m for f = z^m, m = 1..6", criterion_multiplier_law},
      {2, "fixed point at infinity of rational Newton maps", criterion_infinity},
      {3, "ratio reconstruction from the map alone", criterion_reconstruction},
      {4, "chart defects: exp(-z), exp(-z^2), f_alpha eta0", criterion_chart_defects},
      {5, "flow identity psi' = -f/f' o psi", criterion_flow_identity},
      {6, "asymptotic paths of f_alpha reach 0 by t=20", criterion_asymptotic_paths},
      {7, "unit decay slope of log|f| along escaping orbits", criterion_decay_slope},
      {8, "semiconjugacies modulo 1 for both families", criterion_semiconjugacies},
      {9, "critical points and expansion of g_alpha", criterion_g_structure},
      {10, "asymptotic values {0,1} of h_alpha", criterion_h_singular_values},
      {11, "rotation numbers of the sine family", criterion_rotation_numbers},
      {12, "deterministic renderer on z^3-1", criterion_renderer},
      {13, "virtual-basin type classification", criterion_baker_typing},
  };
  int failures = 0;
  for (auto& c : checks) {
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %2d. %s%s%s\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++failures;
  }
  if (failures == 0) {
    std::printf("all %zu acceptance criteria passed\n", checks.size());
  } else {
    std::printf("%d acceptance criteria failed\n", failures);
  }
  return failures;
}
