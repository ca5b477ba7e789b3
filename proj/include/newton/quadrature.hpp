#pragma once

#include <functional>
#include <stdexcept>

#include "newton/complex.hpp"

namespace newton {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadratureResult {
  Complex value{};
  double est_error = 0.0;  // Richardson estimate |I_k - I_{k-1}|
  int panels = 0;
};

// Composite 16-point Gauss-Legendre along the straight segment z0 -> z1.
// Panel count starts at `initial_panels` and doubles until the Richardson
// estimate drops below `tol`. Throws QuadratureError on a non-finite
// integrand value or when the tolerance is not reached.
QuadratureResult integrate_segment(const std::function<Complex(Complex)>& g,
                                   Complex z0, Complex z1, double tol = 1e-10,
                                   int initial_panels = 1, int max_doublings = 12);

// One composite pass at a fixed panel count.
Complex composite_gauss16(const std::function<Complex(Complex)>& g, Complex z0,
                          Complex z1, int panels);

}  // namespace newton
