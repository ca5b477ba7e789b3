#include "newton/functions.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <utility>

#include "newton/quadrature.hpp"
#include "newton/quotient.hpp"

namespace newton::functions {

namespace {

double log_abs_from(const EntireFunction& f, Complex z) {
  if (f.has_log()) return f.log_jet(z).v.real();
  Complex v = f.jet(z).v;
  if (!is_finite(v)) return std::numeric_limits<double>::quiet_NaN();
  return std::log(std::abs(v));
}

// Plain session: steps through NewtonMap::step and reads log|f| off the
// attached function.
class GenericSession final : public OrbitSession {
 public:
  GenericSession(const NewtonMap* map, Complex z0) : map_(map), z_(z0) {
    if (map_->function()) {
      base_ = log_abs_from(*map_->function(), z0);
      if (!std::isfinite(base_)) {
        // keep offsets raw when the base itself is degenerate
        offset_raw_ = true;
        base_ = 0.0;
      }
    } else {
      base_ = std::numeric_limits<double>::quiet_NaN();
    }
  }

  StepResult advance() override {
    StepResult s = map_->step(z_);
    if (!s.ok()) return s;
    step_mag_ = std::abs(s.z - z_);
    z_ = s.z;
    return s;
  }

  Complex current() const override { return z_; }
  double step_magnitude() const override { return step_mag_; }
  double log_f_base() const override { return base_; }
  double log_f_offset() const override {
    if (!map_->function()) return std::numeric_limits<double>::quiet_NaN();
    double v = log_abs_from(*map_->function(), z_);
    return offset_raw_ ? v : v - base_;
  }

 private:
  const NewtonMap* map_;
  Complex z_;
  double step_mag_ = 0.0;
  double base_ = 0.0;
  bool offset_raw_ = false;
};

}  // namespace

NewtonMap::NewtonMap(std::string label, StepFn step, std::optional<EntireFunction> f,
                     SessionFactory sessions)
    : label_(std::move(label)),
      step_(std::move(step)),
      f_(std::move(f)),
      sessions_(std::move(sessions)) {}

NewtonMap NewtonMap::from_function(EntireFunction f) {
  EntireFunction copy = f;
  auto step = [copy](Complex z) -> StepResult {
    Jet j = copy.jet(z);
    if (!j.finite()) return {z, StepStatus::NonFinite};
    if (j.d == Complex(0.0, 0.0)) {
      return {z, j.v == Complex(0.0, 0.0) ? StepStatus::Indeterminate
                                          : StepStatus::Pole};
    }
    Complex next = z - j.v / j.d;
    if (!is_finite(next)) return {z, StepStatus::NonFinite};
    return {next, StepStatus::Ok};
  };
  std::string label = "newton(" + f.label + ")";
  return NewtonMap(std::move(label), std::move(step), std::move(f));
}

StepResult NewtonMap::step(Complex z) const { return step_(z); }

std::unique_ptr<OrbitSession> NewtonMap::orbit_session(Complex z0) const {
  if (sessions_) return sessions_(z0);
  return std::make_unique<GenericSession>(this, z0);
}

EntireFunction from_expression(expr::ExprAst ast, std::string label) {
  auto shared = std::make_shared<const expr::ExprAst>(std::move(ast));
  EntireFunction f;
  f.label = label.empty() ? expr::to_string(*shared) : std::move(label);
  f.jet = [shared](Complex z) { return expr::eval_jet(*shared, z); };
  // f = exp(g) exposes g as the global logarithm.
  const expr::Node& root = *shared->root;
  if (root.kind == expr::Node::Kind::Call && root.name == "exp") {
    auto inner = root.a;
    f.log_jet = [inner](Complex z) { return expr::eval_jet(*inner, z); };
  }
  return f;
}

EntireFunction from_formula(std::string_view formula, expr::Mode mode) {
  return from_expression(expr::parse_function(formula, mode));
}

RootFixedPoint classify_fixed_point(const NewtonMap& N, Complex guess, double tol) {
  Complex z = guess;
  bool converged = false;
  for (int k = 0; k < 4000; ++k) {
    StepResult s = N.step(z);
    if (!s.ok()) {
      throw FixedPointError(FixedPointError::Kind::NoConvergence,
                            "refinement hit a pole of the Newton map");
    }
    double move = std::abs(s.z - z);
    z = s.z;
    if (move < tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw FixedPointError(FixedPointError::Kind::NoConvergence,
                          "fixed-point refinement did not converge");
  }
  double h = 1e-6 * (1.0 + std::abs(z));
  StepResult plus = N.step(z + h);
  StepResult minus = N.step(z - h);
  if (!plus.ok() || !minus.ok()) {
    throw FixedPointError(FixedPointError::Kind::NoConvergence,
                          "derivative probe hit a pole");
  }
  Complex deriv = (plus.z - minus.z) / (2.0 * h);
  Complex one_minus = 1.0 - deriv;
  if (std::abs(one_minus) < 1e-6) {
    throw FixedPointError(FixedPointError::Kind::MultiplicityOverflow,
                          "multiplier ~ 1, multiplicity undetermined");
  }
  Complex m_est = 1.0 / one_minus;
  long m = std::lround(m_est.real());
  if (m < 1 || m > 1000000) {
    throw FixedPointError(FixedPointError::Kind::NotNewtonMultiplier,
                          "multiplier outside the Newton ladder [0,1)");
  }
  double multiplier = static_cast<double>(m - 1) / static_cast<double>(m);
  if (std::abs(deriv - multiplier) > 10.0 * tol) {
    throw FixedPointError(FixedPointError::Kind::NotNewtonMultiplier,
                          "measured multiplier does not match (m-1)/m");
  }
  return {z, m, multiplier};
}

InfinityClass classify_infinity(int p_degree, int q_degree) {
  if (p_degree < 0 || q_degree < 0) {
    throw std::invalid_argument("degrees must be non-negative");
  }
  if (q_degree == 0 && p_degree <= 1) {
    throw std::invalid_argument("degenerate degrees: no dynamics at infinity");
  }
  if (q_degree == 0) {
    double mult = static_cast<double>(p_degree) / static_cast<double>(p_degree - 1);
    return {InfinityClass::Kind::Repelling, mult, 1};
  }
  return {InfinityClass::Kind::Parabolic, 1.0, q_degree + 1};
}

ReconstructionResult reconstruct_ratio(const NewtonMap& N, Complex z0, Complex z1,
                                       int segments, double tol) {
  if (segments < 1) throw std::invalid_argument("segments must be positive");
  if (z0 == z1) throw std::invalid_argument("path endpoints coincide");
  double min_diff = std::numeric_limits<double>::infinity();
  auto integrand = [&N, &min_diff](Complex zeta) -> Complex {
    StepResult s = N.step(zeta);
    if (s.status == StepStatus::Pole) {
      // zeta - N(zeta) is infinite at a pole of N, so the integrand vanishes.
      return Complex(0.0, 0.0);
    }
    if (!s.ok()) {
      throw ReconstructionError("map evaluation failed on the path");
    }
    Complex diff = zeta - s.z;
    double d = std::abs(diff);
    if (d < 1e-13 * (1.0 + std::abs(zeta))) {
      throw ReconstructionError("path passes through a fixed point of N");
    }
    min_diff = std::min(min_diff, d);
    return 1.0 / diff;
  };

  // Dyadic refinement with a proximity watch: a fixed point sitting on the
  // path keeps the nearest-node distance proportional to the panel width, so
  // convergence is only accepted once panels are clearly smaller than the
  // distance to the nearest zero of zeta - N(zeta).
  double length = std::abs(z1 - z0);
  int panels = segments;
  ReconstructionResult r;
  try {
    min_diff = std::numeric_limits<double>::infinity();
    Complex prev = composite_gauss16(integrand, z0, z1, panels);
    bool done = false;
    for (int k = 0; k < 14 && !done; ++k) {
      panels *= 2;
      min_diff = std::numeric_limits<double>::infinity();
      Complex cur = composite_gauss16(integrand, z0, z1, panels);
      double est = std::abs(cur - prev);
      double panel_len = length / panels;
      if (est < tol && min_diff >= 4.0 * panel_len) {
        r.ratio = std::exp(cur);
        r.est_error = est;
        done = true;
      }
      prev = cur;
    }
    if (!done) {
      if (min_diff < 4.0 * (length / panels)) {
        throw ReconstructionError("path passes too close to a fixed point of N");
      }
      throw ReconstructionError("quadrature did not reach tolerance");
    }
  } catch (const QuadratureError& e) {
    throw ReconstructionError(e.what());
  }
  r.path.reserve(segments + 1);
  for (int k = 0; k <= segments; ++k) {
    r.path.push_back(z0 + (z1 - z0) * (static_cast<double>(k) / segments));
  }
  return r;
}

namespace catalog {

namespace {

using quotient::SineFamilyParams;

// a denominator within rounding distance of zero counts as the pole itself
bool at_pole(Complex den, double scale) {
  return std::abs(den) <= 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + scale);
}

Complex complex_param(const Params& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) {
    throw std::invalid_argument("missing parameter '" + key + "'");
  }
  try {
    return expr::eval_constant(it->second);
  } catch (const expr::ParseError& e) {
    throw std::invalid_argument("parameter '" + key + "': " + e.what());
  }
}

std::string formula_param(const Params& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) {
    throw std::invalid_argument("missing parameter '" + key + "'");
  }
  return it->second;
}

// f_alpha(Z) = exp(-(1/a)(Z + e^{2 pi i Z}/(2 pi i)))
EntireFunction make_f_alpha(double alpha) {
  EntireFunction f;
  f.label = "f_alpha(alpha=" + std::to_string(alpha) + ")";
  auto L = [alpha](Complex z) -> Jet {
    Complex u = std::exp(two_pi_i() * z);
    Complex val = -(z + u / two_pi_i()) / alpha;
    Complex der = -(1.0 + u) / alpha;
    return {val, der};
  };
  f.log_jet = L;
  f.jet = [L](Complex z) -> Jet {
    Jet l = L(z);
    Complex e = std::exp(l.v);
    return {e, e * l.d};
  };
  return f;
}

// The entire function behind the sine family, via the integral formula:
// f(Z) = exp(-(1/a)(Z - eps cos(2 pi Z)/(2 pi))).
EntireFunction make_sine_f(const SineFamilyParams& p) {
  EntireFunction f;
  f.label = "sine_f(alpha=" + std::to_string(p.alpha) +
            ",eps=" + std::to_string(p.epsilon) + ")";
  double alpha = p.alpha, eps = p.epsilon;
  auto L = [alpha, eps](Complex z) -> Jet {
    Complex tp = 2.0 * kPi * z;
    Complex val = -(z - eps * std::cos(tp) / (2.0 * kPi)) / alpha;
    Complex der = -(1.0 + eps * std::sin(tp)) / alpha;
    return {val, der};
  };
  f.log_jet = L;
  f.jet = [L](Complex z) -> Jet {
    Jet l = L(z);
    Complex e = std::exp(l.v);
    return {e, e * l.d};
  };
  return f;
}

// int_0^Z e^{-e^{2 pi i W}} dW. The integrand has period 1 and unit mean on
// the real axis, so the path is split into frac + whole periods along R plus
// the vertical leg; only the two short legs need quadrature.
Complex expexp_integral(Complex Z) {
  auto integrand = [](Complex w) -> Complex {
    return std::exp(-std::exp(two_pi_i() * w));
  };
  double x = Z.real();
  double m = std::floor(x);
  double frac = x - m;
  Complex total(m, 0.0);
  if (frac != 0.0) {
    total += integrate_segment(integrand, Complex(0.0, 0.0), Complex(frac, 0.0),
                               1e-12, 1, 10).value;
  }
  if (Z.imag() != 0.0) {
    total += integrate_segment(integrand, Complex(x, 0.0), Z, 1e-12, 1, 14).value;
  }
  return total;
}

EntireFunction make_expexp_f(double alpha) {
  EntireFunction f;
  f.label = "expexp_f(alpha=" + std::to_string(alpha) + ")";
  auto L = [alpha](Complex z) -> Jet {
    Complex der = -std::exp(-std::exp(two_pi_i() * z)) / alpha;
    if (!is_finite(der)) {
      double nan = std::numeric_limits<double>::quiet_NaN();
      return {Complex(nan, nan), Complex(nan, nan)};
    }
    Complex val;
    try {
      val = -expexp_integral(z) / alpha;
    } catch (const QuadratureError&) {
      double nan = std::numeric_limits<double>::quiet_NaN();
      val = Complex(nan, nan);
    }
    return {val, der};
  };
  f.log_jet = L;
  f.jet = [L](Complex z) -> Jet {
    Jet l = L(z);
    Complex e = std::exp(l.v);
    return {e, e * l.d};
  };
  return f;
}

// Orbit session for n_alpha. In the deep tract |1+e^{2 pi i Z}| is enormous,
// the step alpha/(1+u) drops below one ulp of Z and the plain update freezes.
// There the session evolves the drift S = Z_n - Z_0 separately and advances
// log|f| by the exact per-step increment of w = -log f,
//   dw = (delta + u (e^{2 pi i delta} - 1)/(2 pi i))/alpha,
// which stays accurate long after z + delta rounds to z.
class NAlphaSession final : public OrbitSession {
 public:
  NAlphaSession(double alpha, const EntireFunction* f, Complex z0)
      : alpha_(alpha), f_(f), z_(z0) {
    base_ = f_->log_jet(z0).v.real();
    if (!std::isfinite(base_)) base_ = 0.0;
  }

  StepResult advance() override {
    if (frozen_) return frozen_step();
    Complex u = std::exp(two_pi_i() * z_);
    if (!is_finite(u)) return {z_, StepStatus::NonFinite};
    Complex den = 1.0 + u;
    if (at_pole(den, std::abs(u))) return {z_, StepStatus::Pole};
    Complex delta = alpha_ / den;
    if (!is_finite(delta)) return {z_, StepStatus::NonFinite};
    if (std::abs(delta) < kFreeze * (1.0 + std::abs(z_))) {
      enter_frozen(u, delta);
      return frozen_step();
    }
    z_ += delta;
    step_mag_ = std::abs(delta);
    double lf = f_->log_jet(z_).v.real();
    offset_ = std::isfinite(lf) ? lf - base_
                                : std::numeric_limits<double>::quiet_NaN();
    return {z_, StepStatus::Ok};
  }

  Complex current() const override { return frozen_ ? anchor_ + drift_ : z_; }
  double step_magnitude() const override { return step_mag_; }
  double log_f_base() const override { return base_; }
  double log_f_offset() const override { return offset_; }

 private:
  void enter_frozen(Complex u, Complex delta) {
    frozen_ = true;
    anchor_ = z_;
    drift_ = Complex(0.0, 0.0);
    delta_ = delta;
    dw_ = (delta + u * expm1c(two_pi_i() * delta) / two_pi_i()) / alpha_;
  }

  StepResult frozen_step() {
    drift_ += delta_;
    step_mag_ = std::abs(delta_);
    offset_ -= dw_.real();
    z_ = anchor_ + drift_;
    return {z_, StepStatus::Ok};
  }

  static constexpr double kFreeze = 1e-14;

  double alpha_;
  const EntireFunction* f_;
  Complex z_;
  double step_mag_ = 0.0;
  double base_ = 0.0;
  double offset_ = 0.0;

  bool frozen_ = false;
  Complex anchor_{}, drift_{}, delta_{}, dw_{};
};

NewtonMap make_n_alpha(double alpha) {
  auto f = std::make_shared<EntireFunction>(make_f_alpha(alpha));
  auto step = [alpha](Complex z) -> StepResult {
    Complex u = std::exp(two_pi_i() * z);
    if (!is_finite(u)) return {z, StepStatus::NonFinite};
    Complex den = 1.0 + u;
    if (at_pole(den, std::abs(u))) return {z, StepStatus::Pole};
    Complex next = z + alpha / den;
    if (!is_finite(next)) return {z, StepStatus::NonFinite};
    return {next, StepStatus::Ok};
  };
  auto sessions = [alpha, f](Complex z0) -> std::unique_ptr<OrbitSession> {
    return std::make_unique<NAlphaSession>(alpha, f.get(), z0);
  };
  return NewtonMap("n_alpha(alpha=" + std::to_string(alpha) + ")", std::move(step),
                   *f, std::move(sessions));
}

NewtonMap make_sine_map(const SineFamilyParams& p) {
  double alpha = p.alpha, eps = p.epsilon;
  auto step = [alpha, eps](Complex z) -> StepResult {
    Complex s = std::sin(2.0 * kPi * z);
    if (!is_finite(s)) return {z, StepStatus::NonFinite};
    Complex den = 1.0 + eps * s;
    if (at_pole(den, std::abs(eps * s))) return {z, StepStatus::Pole};
    Complex next = z + alpha / den;
    if (!is_finite(next)) return {z, StepStatus::NonFinite};
    return {next, StepStatus::Ok};
  };
  return NewtonMap("sine(alpha=" + std::to_string(alpha) +
                       ",eps=" + std::to_string(eps) + ")",
                   std::move(step), make_sine_f(p));
}

NewtonMap make_expexp_map(double alpha) {
  auto step = [alpha](Complex z) -> StepResult {
    Complex inner = std::exp(two_pi_i() * z);
    if (!is_finite(inner)) return {z, StepStatus::NonFinite};
    Complex delta = alpha * std::exp(inner);
    if (!is_finite(delta)) return {z, StepStatus::NonFinite};
    return {z + delta, StepStatus::Ok};
  };
  return NewtonMap("expexp(alpha=" + std::to_string(alpha) + ")", std::move(step),
                   make_expexp_f(alpha));
}

EntireFunction make_g_alpha(double alpha) {
  EntireFunction f;
  f.label = "g_alpha(alpha=" + std::to_string(alpha) + ")";
  f.jet = [alpha](Complex z) { return quotient::g_alpha_jet(alpha, z); };
  return f;
}

EntireFunction make_h_alpha(double alpha) {
  EntireFunction f;
  f.label = "h_alpha(alpha=" + std::to_string(alpha) + ")";
  f.jet = [alpha](Complex w) { return quotient::h_alpha_jet(alpha, w); };
  return f;
}

EntireFunction make_poly_exp(const std::string& p_src, const std::string& q_src) {
  auto p = std::make_shared<const expr::ExprAst>(
      expr::parse_function(p_src, expr::Mode::Entire));
  auto q = std::make_shared<const expr::ExprAst>(
      expr::parse_function(q_src, expr::Mode::Entire));
  EntireFunction f;
  f.label = "(" + p_src + ")*exp(" + q_src + ")";
  f.jet = [p, q](Complex z) -> Jet {
    Jet pj = expr::eval_jet(*p, z);
    Jet qj = expr::eval_jet(*q, z);
    Complex e = std::exp(qj.v);
    return {pj.v * e, (pj.d + pj.v * qj.d) * e};
  };
  return f;
}

double positive_real_param(const Params& params, const std::string& key) {
  Complex v = complex_param(params, key);
  if (std::abs(v.imag()) > 1e-12 * (1.0 + std::abs(v.real())) || v.real() <= 0.0) {
    throw std::invalid_argument("parameter '" + key + "' must be a positive real");
  }
  return v.real();
}

}  // namespace

double real_param(const Params& params, const std::string& key) {
  Complex v = complex_param(params, key);
  if (std::abs(v.imag()) > 1e-12 * (1.0 + std::abs(v.real()))) {
    throw std::invalid_argument("parameter '" + key + "' must be real");
  }
  return v.real();
}

double real_param(const Params& params, const std::string& key, double fallback) {
  if (params.find(key) == params.end()) return fallback;
  return real_param(params, key);
}

std::variant<EntireFunction, NewtonMap> make(std::string_view family,
                                             const Params& params) {
  std::string fam(family);
  if (fam == "f_alpha") return make_f_alpha(positive_real_param(params, "alpha"));
  if (fam == "n_alpha") return make_n_alpha(positive_real_param(params, "alpha"));
  if (fam == "sine") {
    auto p = SineFamilyParams::make(real_param(params, "alpha"),
                                    real_param(params, "epsilon"));
    return make_sine_map(p);
  }
  if (fam == "expexp") return make_expexp_map(positive_real_param(params, "alpha"));
  if (fam == "expexp_f") return make_expexp_f(positive_real_param(params, "alpha"));
  if (fam == "g_alpha") return make_g_alpha(positive_real_param(params, "alpha"));
  if (fam == "h_alpha") return make_h_alpha(positive_real_param(params, "alpha"));
  if (fam == "poly") {
    return from_expression(
        expr::parse_function(formula_param(params, "p"), expr::Mode::Entire));
  }
  if (fam == "poly_exp") {
    return make_poly_exp(formula_param(params, "p"), formula_param(params, "q"));
  }
  throw std::invalid_argument("unknown catalog family '" + fam + "'");
}

EntireFunction entire_function(const MapSpec& spec) {
  if (!spec.formula.empty()) {
    return from_expression(expr::parse_function(spec.formula, expr::Mode::Entire));
  }
  auto v = make(spec.family, spec.params);
  if (std::holds_alternative<EntireFunction>(v)) {
    return std::get<EntireFunction>(std::move(v));
  }
  const NewtonMap& map = std::get<NewtonMap>(v);
  if (!map.function()) {
    throw std::invalid_argument("family '" + spec.family +
                                "' has no associated entire function");
  }
  return *map.function();
}

NewtonMap newton_map(const MapSpec& spec) {
  if (!spec.formula.empty()) {
    return NewtonMap::from_function(
        from_expression(expr::parse_function(spec.formula, expr::Mode::Entire)));
  }
  auto v = make(spec.family, spec.params);
  if (std::holds_alternative<NewtonMap>(v)) {
    return std::get<NewtonMap>(std::move(v));
  }
  if (spec.family == "g_alpha" || spec.family == "h_alpha") {
    throw std::invalid_argument("family '" + spec.family +
                                "' is not an entire function; no Newton map");
  }
  return NewtonMap::from_function(std::get<EntireFunction>(std::move(v)));
}

}  // namespace catalog

}  // namespace newton::functions
