#pragma once

#include <span>
#include <stdexcept>
#include <utility>

#include "newton/complex.hpp"
#include "newton/jet.hpp"

namespace newton::quotient {

// Parameters of the circle-map family Z + alpha/(1 + eps sin(2 pi Z)).
// Validity: 0 < eps < 1 and 0 < alpha <= m_eps = floor((1-eps)^2/(2 pi eps)),
// which keeps N'(Z) >= 1 - 2 pi eps alpha/(1-eps)^2 > 0 on the real axis.
struct SineFamilyParams {
  double alpha;
  double epsilon;
  int m_eps;

  static int m_eps_for(double epsilon);
  static SineFamilyParams make(double alpha, double epsilon);
  double derivative_lower_bound() const;
};

struct RotationEstimate {
  double rho;
  long n_iter;
  double error_bound;  // crude 1/n bound on the translation-number estimate
};

// The universal covering Z -> e^{2 pi i Z}. Overflows (Im Z very negative)
// surface as a non-finite value.
Complex project(Complex Z);

// max over samples of |e^{2 pi i N_a(Z)} - g_a(e^{2 pi i Z})| for the map
// N_a(Z) = Z + a/(1+e^{2 pi i Z}). Throws if a sample sits on a pole.
double check_semiconjugacy(double alpha, std::span<const Complex> samples);

// Same check for N_a(Z) = Z + a e^{e^{2 pi i Z}} against g(z) = z e^{2 pi i a e^z}.
double check_semiconjugacy_expexp(double alpha, std::span<const Complex> samples);

Jet g_alpha_jet(double alpha, Complex z);
Complex g_alpha_eval(double alpha, Complex z);
Jet h_alpha_jet(double alpha, Complex w);
Complex h_alpha_eval(double alpha, Complex w);

// The two critical points of g_alpha: roots of (1+z)^2 - 2 pi i alpha z = 0.
// Their product is 1 by construction.
std::pair<Complex, Complex> g_alpha_critical_points(double alpha);

// Two-term expansion of g_alpha at infinity: g(z) = z + a + b/z + O(1/z^2)
// with a = 2 pi i alpha and b = a^2/2 - a.
struct GExpansion {
  Complex a;
  Complex b;
};
GExpansion g_alpha_expansion(double alpha);

struct AsymptoticLimits {
  Complex limit_up;    // lim h(+it)
  Complex limit_down;  // lim h(-it)
};

// Numerical limits of h_alpha along the imaginary axis; the pair is {0, 1}.
// Throws when the values have not settled to 1e-6 by t_max.
AsymptoticLimits h_alpha_asymptotic_limits(double alpha, double t_max);

// Translation number estimate (N^n(x0) - x0)/n of the real sine-family map.
RotationEstimate rotation_number(const SineFamilyParams& params, double x0, long n);

// Bisection on alpha for a target rotation number in (0, m_eps); the
// estimator runs with n ~ 10/tol iterations.
double find_alpha_for_rotation(double epsilon, double target_rho, double tol);

}  // namespace newton::quotient
