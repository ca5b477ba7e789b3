#pragma once

#include <iosfwd>
#include <vector>

#include "newton/complex.hpp"
#include "newton/functions.hpp"

namespace newton::dynamics {

struct IterationConfig {
  int max_iter = 2000;
  double tol_root = 1e-12;  // 0 disables step-convergence stopping
  double escape_radius = 1e6;
  double f_zero_tol = 1e-8;
  int cycle_window = 64;
};

enum class Termination {
  StepConverged,  // |z_{k+1} - z_k| < tol_root
  Escaped,        // |z_k| > escape_radius
  PoleHit,        // step returned a pole/indeterminate/non-finite marker
  CycleDetected,
  MaxIter,
};

struct OrbitRecord {
  std::vector<Complex> points;
  std::vector<double> f_abs;        // |f(z_k)|; NaN when no f is attached
  std::vector<double> log_f_offset; // log|f(z_k)| = log_f_base + log_f_offset[k]
  double log_f_base = 0.0;
  Termination terminated_by = Termination::MaxIter;
  int cycle_period = 0;
  functions::StepStatus pole_cause = functions::StepStatus::Ok;

  double log_f_at(std::size_t k) const { return log_f_base + log_f_offset[k]; }
};

struct OrbitOutcome {
  enum class Kind {
    ConvergedToRoot,
    EscapedFToZero,
    EscapedOther,
    PoleHit,
    CycleDetected,
    Undetermined,
  };
  Kind kind = Kind::Undetermined;
  Complex xi{};        // ConvergedToRoot
  long multiplicity = 0;
  Complex pole_at{};   // PoleHit
  int period = 0;      // CycleDetected
};

OrbitRecord iterate_orbit(const functions::NewtonMap& N, Complex z0,
                          const IterationConfig& cfg);

// Tags the fate of a recorded orbit. Root convergence is cross-checked
// against |f| and the fixed-point multiplier ladder; escapes split into
// f->0 and everything else. An orbit that runs out of iterations while |f|
// drains monotonically below f_zero_tol counts as EscapedFToZero: deep in a
// tract the z-drift per step can be far below escape_radius reach while the
// virtual-root signature is already unambiguous.
OrbitOutcome classify_orbit(const OrbitRecord& rec, const functions::EntireFunction& f,
                            const IterationConfig& cfg);

// Newton iteration seeded on a grid over the rectangle [lo, hi], deduplicated
// within 10*tol_root, sorted by (Re, Im).
std::vector<functions::RootFixedPoint> find_roots_in(const functions::EntireFunction& f,
                                                     Complex lo, Complex hi, int grid_n,
                                                     const IterationConfig& cfg);

// CSV dump: k, Re z, Im z, |f| (17 significant digits).
void write_orbit_csv(const OrbitRecord& rec, std::ostream& out);

const char* to_string(Termination t);
const char* to_string(OrbitOutcome::Kind k);

}  // namespace newton::dynamics
