#pragma once

#include <cmath>
#include <complex>

namespace newton {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

inline bool is_finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// 2*pi*i, the lattice generator of exp and the covering map Z -> e^{2 pi i Z}.
inline Complex two_pi_i() { return Complex(0.0, 2.0 * kPi); }

// exp(x) - 1 with full relative accuracy for tiny complex x.
inline Complex expm1c(Complex x) {
  if (std::abs(x) < 1e-8) {
    return x * (1.0 + x * 0.5 + x * x / 6.0);
  }
  return std::exp(x) - 1.0;
}

}  // namespace newton
