#pragma once

#include <vector>

namespace spinchain::num {

// Golden-section minimization of a unimodal function over [lo, hi] to an
// argument tolerance tol; returns the bracket midpoint.
template <class F>
double golden_min(F&& f, double lo, double hi, double tol) {
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

// Catmull-Rom interpolation of values tabulated on a uniform grid over
// [0, span]; clamped at the ends.
double interp_uniform(const std::vector<double>& values, double span, double x);

}  // namespace spinchain::num
