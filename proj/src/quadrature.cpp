#include "newton/quadrature.hpp"

#include <array>
#include <cmath>

namespace newton {

namespace {

// 16-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<std::array<double, 2>, 16> kGauss16 = {{
    {-0.98940093499164994, 0.027152459411754037},
    {-0.9445750230732326, 0.062253523938647706},
    {-0.86563120238783176, 0.095158511682492591},
    {-0.755404408355003, 0.12462897125553403},
    {-0.61787624440264377, 0.14959598881657676},
    {-0.45801677765722737, 0.16915651939500262},
    {-0.28160355077925892, 0.18260341504492361},
    {-0.095012509837637454, 0.18945061045506859},
    {0.095012509837637454, 0.18945061045506859},
    {0.28160355077925892, 0.18260341504492361},
    {0.45801677765722737, 0.16915651939500262},
    {0.61787624440264377, 0.14959598881657676},
    {0.755404408355003, 0.12462897125553403},
    {0.86563120238783176, 0.095158511682492591},
    {0.9445750230732326, 0.062253523938647706},
    {0.98940093499164994, 0.027152459411754037},
}};

}  // namespace

Complex composite_gauss16(const std::function<Complex(Complex)>& g, Complex z0,
                          Complex z1, int panels) {
  Complex dz = (z1 - z0) / static_cast<double>(panels);
  Complex total(0.0, 0.0);
  for (int p = 0; p < panels; ++p) {
    Complex a = z0 + dz * static_cast<double>(p);
    Complex mid = a + 0.5 * dz;
    Complex acc(0.0, 0.0);
    for (const auto& nw : kGauss16) {
      Complex zeta = mid + (0.5 * nw[0]) * dz;
      Complex val = g(zeta);
      if (!is_finite(val)) throw QuadratureError("non-finite integrand value");
      acc += nw[1] * val;
    }
    total += acc * (0.5 * dz);
  }
  return total;
}

QuadratureResult integrate_segment(const std::function<Complex(Complex)>& g,
                                   Complex z0, Complex z1, double tol,
                                   int initial_panels, int max_doublings) {
  if (initial_panels < 1) initial_panels = 1;
  if (z0 == z1) return {Complex(0.0, 0.0), 0.0, initial_panels};
  int panels = initial_panels;
  Complex prev = composite_gauss16(g, z0, z1, panels);
  for (int k = 0; k < max_doublings; ++k) {
    panels *= 2;
    Complex cur = composite_gauss16(g, z0, z1, panels);
    double est = std::abs(cur - prev);
    if (est < tol) return {cur, est, panels};
    prev = cur;
  }
  throw QuadratureError("quadrature did not reach tolerance at max subdivisions");
}

}  // namespace newton
