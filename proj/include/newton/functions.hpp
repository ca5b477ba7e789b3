#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "newton/complex.hpp"
#include "newton/expr.hpp"
#include "newton/jet.hpp"

namespace newton::functions {

// An entire function presented as a jet evaluator. Catalog members carry a
// closed-form evaluator; expression-backed members walk an AST. When the
// function is globally of the form e^{L} with entire L, `log_jet` evaluates
// (L, L'); this is the whole story of |f| in regimes where f itself
// underflows.
struct EntireFunction {
  std::string label;
  std::function<Jet(Complex)> jet;
  std::function<Jet(Complex)> log_jet;  // may be empty

  Jet operator()(Complex z) const { return jet(z); }
  bool has_log() const { return static_cast<bool>(log_jet); }
};

// Builds an expression-backed function. If the AST is exp(g), the inner g is
// exposed as log_jet.
EntireFunction from_expression(expr::ExprAst ast, std::string label = "");
EntireFunction from_formula(std::string_view formula,
                            expr::Mode mode = expr::Mode::Entire);

enum class StepStatus {
  Ok,
  Pole,           // f'(z) = 0 with f(z) != 0, or a pole of a direct-form map
  Indeterminate,  // f and f' both vanish at resolution
  NonFinite,      // evaluation overflowed
};

struct StepResult {
  Complex z{};
  StepStatus status = StepStatus::Ok;
  bool ok() const { return status == StepStatus::Ok; }
};

// Stateful orbit iterator handed out by a NewtonMap. Direct-form catalog maps
// can override it to keep the step size and log|f| accurate in regimes where
// the plain double update z + delta is absorbed by rounding.
class OrbitSession {
 public:
  virtual ~OrbitSession() = default;
  virtual StepResult advance() = 0;
  virtual Complex current() const = 0;
  // |z_{k+1} - z_k| of the last advance, before any rounding of z itself.
  virtual double step_magnitude() const = 0;
  // log|f(current)| = log_f_base() + log_f_offset(); NaN when no f is attached.
  virtual double log_f_base() const = 0;
  virtual double log_f_offset() const = 0;
};

class NewtonMap {
 public:
  using StepFn = std::function<StepResult(Complex)>;
  using SessionFactory = std::function<std::unique_ptr<OrbitSession>(Complex)>;

  NewtonMap() = default;
  NewtonMap(std::string label, StepFn step, std::optional<EntireFunction> f = {},
            SessionFactory sessions = {});

  // z - f(z)/f'(z) with pole semantics from the jet of f.
  static NewtonMap from_function(EntireFunction f);

  StepResult step(Complex z) const;
  const std::string& label() const { return label_; }
  const std::optional<EntireFunction>& function() const { return f_; }
  std::unique_ptr<OrbitSession> orbit_session(Complex z0) const;

 private:
  std::string label_;
  StepFn step_;
  std::optional<EntireFunction> f_;
  SessionFactory sessions_;
};

struct RootFixedPoint {
  Complex xi{};
  long multiplicity = 1;
  double multiplier = 0.0;  // (m-1)/m
};

class FixedPointError : public std::runtime_error {
 public:
  enum class Kind { NoConvergence, NotNewtonMultiplier, MultiplicityOverflow };
  FixedPointError(Kind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Refines a fixed point of N by iteration, measures N' by central
// differences and snaps it to the (m-1)/m ladder. Multiplicities above 1e6
// are reported as MultiplicityOverflow ("multiplier ~ 1, undetermined").
RootFixedPoint classify_fixed_point(const NewtonMap& N, Complex guess,
                                    double tol = 1e-10);

struct InfinityClass {
  enum class Kind { Repelling, Parabolic } kind;
  double multiplier;  // m/(m-1) when repelling, +1 when parabolic
  int multiplicity;   // n+1 when parabolic, 1 otherwise
};

// Fixed point at infinity of the Newton map of p*e^q, from deg p and deg q.
InfinityClass classify_infinity(int p_degree, int q_degree);

struct ReconstructionResult {
  Complex ratio{};            // f(z1)/f(z0) recovered from N alone
  std::vector<Complex> path;  // coarse polyline of the integration segment
  double est_error = 0.0;
};

class ReconstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// exp of the contour integral of dzeta/(zeta - N(zeta)) from z0 to z1 along
// the straight segment. Composite Gauss quadrature with dyadic refinement;
// `segments` is the initial panel count.
ReconstructionResult reconstruct_ratio(const NewtonMap& N, Complex z0, Complex z1,
                                       int segments = 4, double tol = 1e-10);

namespace catalog {

using Params = std::map<std::string, std::string, std::less<>>;

// Map/function selector as it appears in CLI flags and scene files: either a
// family name plus parameters, or a bare formula in z.
struct MapSpec {
  std::string family;
  Params params;
  std::string formula;
};

// Families:
//   f_alpha   exp(-(1/a)(Z + e^{2 pi i Z}/(2 pi i)))                 [function]
//   n_alpha   Z + a/(1 + e^{2 pi i Z})                               [newton map]
//   sine      Z + a/(1 + eps sin(2 pi Z))                            [newton map]
//   expexp    Z + a e^{e^{2 pi i Z}}                                 [newton map]
//   expexp_f  exp(-(1/a) int_0^Z e^{-e^{2 pi i W}} dW)               [function]
//   g_alpha   z e^{2 pi i a/(1+z)}                                   [function]
//   h_alpha   w/(w + (1-w) e^{2 pi i a w})                           [function]
//   poly      p (entire formula)                                     [function]
//   poly_exp  p * e^q (formulas)                                     [function]
std::variant<EntireFunction, NewtonMap> make(std::string_view family,
                                             const Params& params);

EntireFunction entire_function(const MapSpec& spec);
NewtonMap newton_map(const MapSpec& spec);

double real_param(const Params& params, const std::string& key);
double real_param(const Params& params, const std::string& key, double fallback);

}  // namespace catalog

}  // namespace newton::functions
