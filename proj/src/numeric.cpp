#include "spinchain/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace spinchain::num {

double interp_uniform(const std::vector<double>& values, double span, double x) {
  const std::size_t m = values.size();
  if (m == 0) throw std::domain_error("interp_uniform: empty table");
  if (m == 1) return values[0];
  const double h = span / static_cast<double>(m - 1);
  double s = x / h;
  if (s <= 0.0) return values.front();
  if (s >= static_cast<double>(m - 1)) return values.back();
  auto j = static_cast<std::size_t>(s);
  if (j > m - 2) j = m - 2;
  const double u = s - static_cast<double>(j);
  const double p1 = values[j];
  const double p2 = values[j + 1];
  const double p0 = j > 0 ? values[j - 1] : 2.0 * p1 - p2;
  const double p3 = j + 2 < m ? values[j + 2] : 2.0 * p2 - p1;
  const double u2 = u * u;
  return 0.5 * ((2.0 * p1) + (-p0 + p2) * u + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u2 +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * u2 * u);
}

}  // namespace spinchain::num
