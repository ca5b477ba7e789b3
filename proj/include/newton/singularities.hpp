#pragma once

#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "newton/complex.hpp"
#include "newton/dynamics.hpp"
#include "newton/functions.hpp"

namespace newton::singularities {

class ChartError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChartDefect {
  Complex w{};
  Complex G_w{};
  double defect = 0.0;  // |G(w) - (w+1)|
};

// Half-plane coordinate of a logarithmic singularity of f over 0: the branch
// ell = -log f seeded at a far point of a decay ray, with psi its Newton
// inverse. When f carries a global logarithm (catalog members, exp-rooted
// expressions), ell is evaluated in closed form; otherwise the branch is
// continued along segments with principal-log increments.
class LogChart {
 public:
  double eta() const { return eta_; }
  const functions::EntireFunction& function() const { return f_; }
  Complex seed_w() const { return seed_w_; }
  Complex seed_z() const { return seed_z_; }

  // Inverse of -log f on the seeded branch; throws ChartError when the
  // Newton continuation leaves its domain of validity.
  Complex psi(Complex w) const;

  // |-log f(psi(w)) - w| actually achieved by the inverse solve.
  double residual(Complex w) const;

  // G(w) = -log f(N_f(psi(w))) on the continued branch, plus the defect
  // |G(w) - (w+1)|.
  ChartDefect pushforward(Complex w) const;

  // Branch value of -log f along a polyline starting near the chart; used to
  // read orbits in chart coordinates.
  std::vector<Complex> continue_along(std::span<const Complex> path) const;

 private:
  friend LogChart build_chart(const functions::EntireFunction&,
                              const std::function<Complex(double)>&, double);

  struct EllState {
    Complex z;
    Complex ell;
  };

  // mutex-guarded anchor cache; shared so charts stay copyable
  struct AnchorCache {
    std::mutex mu;
    std::vector<EllState> anchors;
  };

  EllState advance_ell(const EllState& from, Complex z_to) const;
  EllState solve_psi(Complex w_target) const;
  EllState nearest_anchor(Complex w) const;
  void remember(const EllState& s) const;

  functions::EntireFunction f_;
  double eta_ = 0.0;
  Complex seed_w_{}, seed_z_{};
  bool exact_log_ = false;
  std::shared_ptr<AnchorCache> cache_ = std::make_shared<AnchorCache>();
};

// Seeds the chart on a ray along which |f| decays below r_target; eta is
// -log r_target. Errors when no decay is found or the seed cannot be
// anchored.
LogChart build_chart(const functions::EntireFunction& f,
                     const std::function<Complex(double)>& ray, double r_target);

ChartDefect chart_pushforward(const LogChart& chart, Complex w);

struct Eta0Report {
  bool found = false;
  double eta = 0.0;   // chart base
  double eta0 = 0.0;  // certified base (valid when found)
  double max_defect = 0.0;
  double min_re_drift = 0.0;
  // sampled grid: Re in [eta0, eta0+re_span], Im in [-im_span, im_span]
  double re_span = 20.0;
  double im_span = 20.0;
  int grid_n = 41;
};

// Smallest eta0 on {eta + k*eta_step} whose 41x41 sample grid of H_eta0 has
// defect < 1/2 everywhere and Re-drift >= 1/2. Reports found=false instead
// of fabricating a witness.
Eta0Report find_eta0(const LogChart& chart, double eta_max, double eta_step = 0.25);

struct AsymptoticProbe {
  enum class Verdict { TendsToZero, TendsTo, Inconclusive };
  enum class PathKind { Ray, Orbit };
  struct Sample {
    double t;  // ray parameter or orbit index
    Complex z;
    double f_abs;
  };
  PathKind path_kind = PathKind::Ray;
  std::vector<Sample> samples;
  Verdict verdict = Verdict::Inconclusive;
  Complex limit{};  // valid when verdict == TendsTo
};

AsymptoticProbe probe_asymptotic(const functions::EntireFunction& f,
                                 const std::function<Complex(double)>& ray,
                                 double t_max, int n_samples = 256);
AsymptoticProbe probe_asymptotic(const functions::EntireFunction& f,
                                 const dynamics::OrbitRecord& orbit);

// Least-squares slope of log|f(z_n)| against n over the last half of the
// orbit. Callers gate on an EscapedFToZero classification; this only demands
// enough finite samples.
double decay_slope(const dynamics::OrbitRecord& rec,
                   const functions::EntireFunction& f);

struct BakerTypeReport {
  enum class Label { ParabolicI, ParabolicII, Hyperbolic, Undetermined };
  enum class Confidence { GroundTruthChart, Heuristic };
  Label label = Label::Undetermined;
  Confidence confidence = Confidence::Heuristic;
  std::optional<double> h_estimate;  // present iff label == Hyperbolic
  struct Evidence {
    double re_drift = 0.0;            // mean Re-slope in chart coordinates
    double im_range_per_orbit = 0.0;  // max per-orbit Im range (chart route)
    double im_spread = 0.0;           // spread of per-orbit Im levels (chart route)
    double c_min = 0.0, c_mean = 0.0, c_max = 0.0;  // pair-contraction tail
    double transversal_drift = 0.0;   // per-step drift transverse to motion
  } evidence;
};

// Types the invariant domain holding the given co-escaping orbits. With a
// chart the label is read off the image of the chart drift; without one a
// pair-contraction heuristic is used and labeled as such.
BakerTypeReport classify_baker_type(const std::vector<dynamics::OrbitRecord>& orbits,
                                    const LogChart* chart = nullptr);

const char* to_string(BakerTypeReport::Label label);
const char* to_string(AsymptoticProbe::Verdict v);

}  // namespace newton::singularities
