#include "fragkin/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "fragkin/errors.hpp"

namespace fragkin {

double gauss_legendre(const std::function<double(double)>& f, double a, double b) {
  if (b <= a) return 0.0;
  return boost::math::quadrature::gauss<double, 8>::integrate(f, a, b);
}

double integrate_from_zero(const std::function<double(double)>& f, double upper, std::size_t nodes) {
  if (!(upper > 0.0)) throw InvalidArgument("integration upper limit must be positive");
  if (nodes < 64) throw InvalidArgument("at least 64 quadrature nodes required");
  // Cap the depth so upper / 2^panels stays a normal double.
  const std::size_t panels = std::min<std::size_t>(nodes / 8, 900);
  double sum = 0.0;
  double hi = upper;
  for (std::size_t k = 0; k + 1 < panels; ++k) {
    const double lo = 0.5 * hi;
    sum += gauss_legendre(f, lo, hi);
    hi = lo;
  }
  // Innermost panel [0, hi]: Gauss nodes are interior, so f(0) is never sampled.
  sum += gauss_legendre(f, 0.0, hi);
  return sum;
}

double integrate_geometric(const std::function<double(double)>& f, double a, double b) {
  if (b <= a) return 0.0;
  if (a < 0.0) throw InvalidArgument("integrate_geometric: negative lower limit");
  if (a == 0.0) return integrate_from_zero(f, b);
  const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil(std::log2(b / a))));
  const double q = std::pow(b / a, 1.0 / static_cast<double>(panels));
  double sum = 0.0;
  double lo = a;
  for (std::size_t k = 0; k < panels; ++k) {
    const double hi = k + 1 == panels ? b : lo * q;
    sum += gauss_legendre(f, lo, hi);
    lo = hi;
  }
  return sum;
}

}  // namespace fragkin
