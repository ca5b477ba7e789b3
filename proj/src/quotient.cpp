#include "newton/quotient.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "newton/functions.hpp"

namespace newton::quotient {

int SineFamilyParams::m_eps_for(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0,1)");
  }
  return static_cast<int>(
      std::floor((1.0 - epsilon) * (1.0 - epsilon) / (2.0 * kPi * epsilon)));
}

SineFamilyParams SineFamilyParams::make(double alpha, double epsilon) {
  int m = m_eps_for(epsilon);
  if (m < 1) {
    throw std::invalid_argument("epsilon too large: m_eps = 0 leaves no valid alpha");
  }
  if (!(alpha > 0.0 && alpha <= static_cast<double>(m))) {
    throw std::invalid_argument("alpha must lie in (0, m_eps]");
  }
  SineFamilyParams p{alpha, epsilon, m};
  if (!(p.derivative_lower_bound() > 0.0)) {
    throw std::invalid_argument("parameters violate the N' > 0 bound");
  }
  return p;
}

double SineFamilyParams::derivative_lower_bound() const {
  return 1.0 - 2.0 * kPi * epsilon * alpha / ((1.0 - epsilon) * (1.0 - epsilon));
}

Complex project(Complex Z) { return std::exp(two_pi_i() * Z); }

namespace {
std::string param_17g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace

double check_semiconjugacy(double alpha, std::span<const Complex> samples) {
  functions::catalog::Params params;
  params["alpha"] = param_17g(alpha);
  auto map = std::get<functions::NewtonMap>(functions::catalog::make("n_alpha", params));
  double worst = 0.0;
  for (Complex Z : samples) {
    Complex u = project(Z);
    if (1.0 + u == Complex(0.0, 0.0)) {
      throw std::invalid_argument("sample lies on a pole of N_alpha");
    }
    functions::StepResult s = map.step(Z);
    if (!s.ok()) throw std::invalid_argument("sample lies on a pole of N_alpha");
    Complex lhs = project(s.z);
    Complex rhs = u * std::exp(two_pi_i() * alpha / (1.0 + u));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

double check_semiconjugacy_expexp(double alpha, std::span<const Complex> samples) {
  functions::catalog::Params params;
  params["alpha"] = param_17g(alpha);
  auto map = std::get<functions::NewtonMap>(functions::catalog::make("expexp", params));
  double worst = 0.0;
  for (Complex Z : samples) {
    Complex u = project(Z);
    functions::StepResult s = map.step(Z);
    if (!s.ok()) throw std::invalid_argument("sample overflows the expexp map");
    Complex lhs = project(s.z);
    Complex rhs = u * std::exp(two_pi_i() * alpha * std::exp(u));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

Jet g_alpha_jet(double alpha, Complex z) {
  if (1.0 + z == Complex(0.0, 0.0)) {
    throw std::invalid_argument("g_alpha has an essential singularity at z = -1");
  }
  Complex one_plus = 1.0 + z;
  Complex e = std::exp(two_pi_i() * alpha / one_plus);
  Complex val = z * e;
  Complex der = e * (1.0 - two_pi_i() * alpha * z / (one_plus * one_plus));
  return {val, der};
}

Complex g_alpha_eval(double alpha, Complex z) { return g_alpha_jet(alpha, z).v; }

Jet h_alpha_jet(double alpha, Complex w) {
  Complex e = std::exp(two_pi_i() * alpha * w);
  Complex den = w + (1.0 - w) * e;
  if (den == Complex(0.0, 0.0)) {
    throw std::invalid_argument("h_alpha evaluated at a pole");
  }
  Complex den_d = 1.0 + e * (two_pi_i() * alpha * (1.0 - w) - 1.0);
  Complex val = w / den;
  Complex der = (den - w * den_d) / (den * den);
  return {val, der};
}

Complex h_alpha_eval(double alpha, Complex w) { return h_alpha_jet(alpha, w).v; }

std::pair<Complex, Complex> g_alpha_critical_points(double alpha) {
  if (alpha == 0.0) throw std::invalid_argument("alpha must be nonzero");
  // (1+z)^2 - 2 pi i alpha z = z^2 + (2 - 2 pi i alpha) z + 1
  Complex b = 2.0 - two_pi_i() * alpha;
  Complex sq = std::sqrt(b * b - 4.0);
  // pick the sign that avoids cancellation, then use the unit product
  Complex big = (std::real(std::conj(b) * sq) >= 0.0) ? -0.5 * (b + sq)
                                                      : -0.5 * (b - sq);
  return {big, 1.0 / big};
}

GExpansion g_alpha_expansion(double alpha) {
  Complex a = two_pi_i() * alpha;
  return {a, a * a * 0.5 - a};
}

AsymptoticLimits h_alpha_asymptotic_limits(double alpha, double t_max) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(t_max >= 50.0)) throw std::invalid_argument("t_max must be at least 50");
  auto settled = [alpha, t_max](double sign) -> Complex {
    Complex final_val{};
    Complex target{};
    for (double scale : {0.8, 0.9, 1.0}) {
      Complex w = Complex(0.0, sign * scale * t_max);
      Complex h = h_alpha_eval(alpha, w);
      Complex snap = std::abs(h) < 0.5 ? Complex(0.0, 0.0) : Complex(1.0, 0.0);
      if (scale == 0.8) {
        target = snap;
      } else if (snap != target) {
        throw std::runtime_error("h_alpha limit not settled below t_max");
      }
      if (std::abs(h - snap) > 1e-6) {
        throw std::runtime_error("h_alpha limit not converged below t_max");
      }
      final_val = h;
    }
    return final_val;
  };
  return {settled(+1.0), settled(-1.0)};
}

RotationEstimate rotation_number(const SineFamilyParams& params, double x0, long n) {
  if (n < 1000) throw std::invalid_argument("n must be at least 1000");
  double x = x0 - std::floor(x0);
  double start = x;
  long wraps = 0;
  for (long k = 0; k < n; ++k) {
    double step = params.alpha / (1.0 + params.epsilon * std::sin(2.0 * kPi * x));
    if (!(step > 0.0)) {
      throw std::runtime_error("monotonicity violation while iterating the lift");
    }
    x += step;
    if (x >= 1.0) {
      double whole = std::floor(x);
      wraps += static_cast<long>(whole);
      x -= whole;
    }
  }
  double rho = (static_cast<double>(wraps) + x - start) / static_cast<double>(n);
  return {rho, n, 1.0 / static_cast<double>(n)};
}

double find_alpha_for_rotation(double epsilon, double target_rho, double tol) {
  if (!(tol >= 1e-6)) throw std::invalid_argument("tol must be at least 1e-6");
  int m_eps = SineFamilyParams::m_eps_for(epsilon);
  if (!(target_rho > 0.0 && target_rho < static_cast<double>(m_eps))) {
    throw std::invalid_argument("target rotation number outside (0, m_eps)");
  }
  long n = std::max<long>(1000, std::lround(10.0 / tol));
  double lo = 0.0;  // Rot -> 0 as alpha -> 0
  double hi = static_cast<double>(m_eps);
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    auto est = rotation_number(SineFamilyParams::make(mid, epsilon), 0.0, n);
    if (std::abs(est.rho - target_rho) <= 0.8 * tol) return mid;
    if (est.rho < target_rho) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-14) break;
  }
  auto final_est = rotation_number(SineFamilyParams::make(mid, epsilon), 0.0, n);
  if (std::abs(final_est.rho - target_rho) > tol) {
    throw std::runtime_error("bisection failed to reach the target rotation number");
  }
  return mid;
}

}  // namespace newton::quotient
