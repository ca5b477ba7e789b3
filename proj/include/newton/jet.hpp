#pragma once

#include "newton/complex.hpp"

namespace newton {

// First-order jet (value, derivative) of a holomorphic function at a point.
// The arithmetic below is forward-mode dual-number arithmetic over C: the
// chain and product rules are applied exactly, so the derivative of a
// constant is exactly 0 and the derivative of the variable is exactly 1.
struct Jet {
  Complex v{};  // f(z)
  Complex d{};  // f'(z)

  bool finite() const { return is_finite(v) && is_finite(d); }
};

inline Jet jet_const(Complex c) { return {c, Complex(0.0, 0.0)}; }
inline Jet jet_var(Complex z) { return {z, Complex(1.0, 0.0)}; }

inline Jet operator-(const Jet& a) { return {-a.v, -a.d}; }
inline Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.d + b.d}; }
inline Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.d - b.d}; }
inline Jet operator*(const Jet& a, const Jet& b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d};
}
inline Jet operator/(const Jet& a, const Jet& b) {
  Complex q = a.v / b.v;
  return {q, (a.d - q * b.d) / b.v};
}

inline Jet operator*(Complex c, const Jet& a) { return {c * a.v, c * a.d}; }
inline Jet operator*(const Jet& a, Complex c) { return {a.v * c, a.d * c}; }
inline Jet operator+(const Jet& a, Complex c) { return {a.v + c, a.d}; }
inline Jet operator+(Complex c, const Jet& a) { return {c + a.v, a.d}; }
inline Jet operator-(const Jet& a, Complex c) { return {a.v - c, a.d}; }
inline Jet operator-(Complex c, const Jet& a) { return {c - a.v, -a.d}; }

inline Jet exp(const Jet& a) {
  Complex e = std::exp(a.v);
  return {e, e * a.d};
}
inline Jet sin(const Jet& a) { return {std::sin(a.v), std::cos(a.v) * a.d}; }
inline Jet cos(const Jet& a) { return {std::cos(a.v), -std::sin(a.v) * a.d}; }
inline Jet log(const Jet& a) { return {std::log(a.v), a.d / a.v}; }

// Integer power by binary exponentiation; negative exponents go through the
// division rule.
inline Jet pow(const Jet& a, long n) {
  if (n < 0) return jet_const(1.0) / pow(a, -n);
  Jet result = jet_const(1.0);
  Jet base = a;
  unsigned long k = static_cast<unsigned long>(n);
  while (k) {
    if (k & 1UL) result = result * base;
    k >>= 1UL;
    if (k) base = base * base;
  }
  return result;
}

}  // namespace newton
