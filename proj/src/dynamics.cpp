#include "newton/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace newton::dynamics {

namespace {

void validate(const IterationConfig& cfg) {
  if (cfg.max_iter < 1) throw std::invalid_argument("max_iter must be positive");
  if (cfg.tol_root < 0.0) throw std::invalid_argument("tol_root must be >= 0");
  if (!(cfg.escape_radius > 1.0)) {
    throw std::invalid_argument("escape_radius must exceed 1");
  }
  if (!(cfg.f_zero_tol > 0.0)) throw std::invalid_argument("f_zero_tol must be positive");
  if (cfg.cycle_window < 2) throw std::invalid_argument("cycle_window must be >= 2");
}

double f_abs_from(double base, double offset) {
  double lf = base + offset;
  if (std::isnan(lf)) return std::numeric_limits<double>::quiet_NaN();
  return std::exp(lf);
}

// Tail test shared by the escape outcomes: last K = 10 recorded log|f|
// non-increasing and final |f| below tol.
bool f_tail_drains_to_zero(const OrbitRecord& rec, double tol) {
  constexpr std::size_t K = 10;
  if (rec.log_f_offset.size() < K) return false;
  std::size_t n = rec.log_f_offset.size();
  for (std::size_t k = n - K; k + 1 < n; ++k) {
    double a = rec.log_f_offset[k];
    double b = rec.log_f_offset[k + 1];
    if (std::isnan(a) || std::isnan(b)) return false;
    if (b > a) return false;
  }
  double final_abs = f_abs_from(rec.log_f_base, rec.log_f_offset.back());
  return final_abs < tol;
}

}  // namespace

OrbitRecord iterate_orbit(const functions::NewtonMap& N, Complex z0,
                          const IterationConfig& cfg) {
  validate(cfg);
  if (!is_finite(z0)) throw std::invalid_argument("starting point must be finite");

  auto session = N.orbit_session(z0);
  OrbitRecord rec;
  rec.log_f_base = session->log_f_base();
  rec.points.push_back(z0);
  rec.log_f_offset.push_back(session->log_f_offset());
  rec.f_abs.push_back(f_abs_from(rec.log_f_base, rec.log_f_offset.back()));

  rec.terminated_by = Termination::MaxIter;
  for (int k = 0; k < cfg.max_iter; ++k) {
    functions::StepResult s = session->advance();
    if (!s.ok()) {
      rec.terminated_by = Termination::PoleHit;
      rec.pole_cause = s.status;
      break;
    }
    rec.points.push_back(s.z);
    rec.log_f_offset.push_back(session->log_f_offset());
    rec.f_abs.push_back(f_abs_from(rec.log_f_base, rec.log_f_offset.back()));

    if (session->step_magnitude() < cfg.tol_root) {
      rec.terminated_by = Termination::StepConverged;
      break;
    }
    if (std::abs(s.z) > cfg.escape_radius) {
      rec.terminated_by = Termination::Escaped;
      break;
    }
    // Revisit detection: a genuine cycle returns near an earlier point while
    // the per-step motion stays macroscopic; a converging orbit fails the
    // second clause. Heuristic by design.
    std::size_t idx = rec.points.size() - 1;
    if (session->step_magnitude() >= 1e-6) {
      std::size_t max_p = std::min<std::size_t>(cfg.cycle_window, idx);
      bool found = false;
      for (std::size_t p = 2; p <= max_p; ++p) {
        if (std::abs(rec.points[idx] - rec.points[idx - p]) < 1e-9) {
          rec.terminated_by = Termination::CycleDetected;
          rec.cycle_period = static_cast<int>(p);
          found = true;
          break;
        }
      }
      if (found) break;
    }
  }
  return rec;
}

OrbitOutcome classify_orbit(const OrbitRecord& rec, const functions::EntireFunction& f,
                            const IterationConfig& cfg) {
  if (rec.points.size() != rec.log_f_offset.size() ||
      rec.points.size() != rec.f_abs.size() || rec.points.empty()) {
    throw std::logic_error("inconsistent orbit record");
  }
  OrbitOutcome out;
  switch (rec.terminated_by) {
    case Termination::PoleHit:
      out.kind = OrbitOutcome::Kind::PoleHit;
      out.pole_at = rec.points.back();
      return out;
    case Termination::CycleDetected:
      out.kind = OrbitOutcome::Kind::CycleDetected;
      out.period = rec.cycle_period;
      return out;
    case Termination::StepConverged: {
      Complex xi = rec.points.back();
      auto N = functions::NewtonMap::from_function(f);
      try {
        functions::RootFixedPoint rfp =
            functions::classify_fixed_point(N, xi, 1e-9);
        Jet j = f.jet(rfp.xi);
        if (j.finite() &&
            std::abs(j.v) <= cfg.tol_root * (1.0 + std::abs(j.d))) {
          out.kind = OrbitOutcome::Kind::ConvergedToRoot;
          out.xi = rfp.xi;
          out.multiplicity = rfp.multiplicity;
          return out;
        }
      } catch (const functions::FixedPointError&) {
        // falls through to Undetermined
      }
      out.kind = OrbitOutcome::Kind::Undetermined;
      return out;
    }
    case Termination::Escaped:
      out.kind = f_tail_drains_to_zero(rec, cfg.f_zero_tol)
                     ? OrbitOutcome::Kind::EscapedFToZero
                     : OrbitOutcome::Kind::EscapedOther;
      return out;
    case Termination::MaxIter:
      out.kind = f_tail_drains_to_zero(rec, cfg.f_zero_tol)
                     ? OrbitOutcome::Kind::EscapedFToZero
                     : OrbitOutcome::Kind::Undetermined;
      return out;
  }
  return out;
}

std::vector<functions::RootFixedPoint> find_roots_in(const functions::EntireFunction& f,
                                                     Complex lo, Complex hi, int grid_n,
                                                     const IterationConfig& cfg) {
  if (grid_n < 1) throw std::invalid_argument("grid_n must be positive");
  auto N = functions::NewtonMap::from_function(f);
  std::vector<functions::RootFixedPoint> roots;
  double dedupe = 10.0 * std::max(cfg.tol_root, 1e-15);
  for (int j = 0; j < grid_n; ++j) {
    for (int i = 0; i < grid_n; ++i) {
      double fx = grid_n == 1 ? 0.5 : static_cast<double>(i) / (grid_n - 1);
      double fy = grid_n == 1 ? 0.5 : static_cast<double>(j) / (grid_n - 1);
      Complex z0(lo.real() + fx * (hi.real() - lo.real()),
                 lo.imag() + fy * (hi.imag() - lo.imag()));
      OrbitRecord rec = iterate_orbit(N, z0, cfg);
      OrbitOutcome o = classify_orbit(rec, f, cfg);
      if (o.kind != OrbitOutcome::Kind::ConvergedToRoot) continue;
      bool dup = false;
      for (const auto& r : roots) {
        if (std::abs(r.xi - o.xi) <= dedupe) {
          dup = true;
          break;
        }
      }
      if (!dup) roots.push_back({o.xi, o.multiplicity,
                                 static_cast<double>(o.multiplicity - 1) /
                                     static_cast<double>(o.multiplicity)});
    }
  }
  std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
    if (a.xi.real() != b.xi.real()) return a.xi.real() < b.xi.real();
    return a.xi.imag() < b.xi.imag();
  });
  return roots;
}

void write_orbit_csv(const OrbitRecord& rec, std::ostream& out) {
  out << "k,re_z,im_z,abs_f\n";
  char buf[128];
  for (std::size_t k = 0; k < rec.points.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g", k,
                  rec.points[k].real(), rec.points[k].imag(), rec.f_abs[k]);
    out << buf << '\n';
  }
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::StepConverged: return "step_converged";
    case Termination::Escaped: return "escaped";
    case Termination::PoleHit: return "pole_hit";
    case Termination::CycleDetected: return "cycle_detected";
    case Termination::MaxIter: return "max_iter";
  }
  return "unknown";
}

const char* to_string(OrbitOutcome::Kind k) {
  switch (k) {
    case OrbitOutcome::Kind::ConvergedToRoot: return "converged_to_root";
    case OrbitOutcome::Kind::EscapedFToZero: return "escaped_f_to_zero";
    case OrbitOutcome::Kind::EscapedOther: return "escaped_other";
    case OrbitOutcome::Kind::PoleHit: return "pole_hit";
    case OrbitOutcome::Kind::CycleDetected: return "cycle_detected";
    case OrbitOutcome::Kind::Undetermined: return "undetermined";
  }
  return "unknown";
}

}  // namespace newton::dynamics
