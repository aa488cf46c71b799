#include "fragkin/coag_kernel.hpp"

#include <cmath>
#include <sstream>

#include "fragkin/errors.hpp"

namespace fragkin {

CoagKernel CoagKernel::zero(double c_kappa, double rho) {
  CoagKernel k = custom([](double, double) { return 0.0; }, c_kappa, rho, "zero");
  k.zero_ = true;
  return k;
}

CoagKernel CoagKernel::constant(double kappa0, double c_kappa, double rho) {
  if (!(kappa0 >= 0.0)) throw InvalidArgument("constant coagulation kernel must be non-negative");
  std::ostringstream os;
  os << "constant(" << kappa0 << ")";
  CoagKernel k = custom([kappa0](double, double) { return kappa0; }, c_kappa, rho, os.str());
  k.zero_ = kappa0 == 0.0;
  return k;
}

CoagKernel CoagKernel::sum_power(double kappa0, double exponent, double c_kappa, double rho) {
  if (!(kappa0 >= 0.0)) throw InvalidArgument("sum-power coagulation kernel must be non-negative");
  std::ostringstream os;
  os << "sum_power(" << kappa0 << ", a=" << exponent << ")";
  CoagKernel k = custom(
      [kappa0, exponent](double xi, double eta) {
        return kappa0 * (std::pow(1.0 + xi, exponent) + std::pow(1.0 + eta, exponent));
      },
      c_kappa, rho, os.str());
  k.zero_ = kappa0 == 0.0;
  return k;
}

CoagKernel CoagKernel::custom(SizeFn2 fn, double c_kappa, double rho, std::string label) {
  if (!fn) throw InvalidArgument("coagulation kernel requires an evaluator");
  if (!(c_kappa > 0.0)) throw InvalidArgument("c_kappa must be positive");
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("rho must lie in (0,1)");
  CoagKernel k;
  k.eval_ = std::move(fn);
  k.c_kappa_ = c_kappa;
  k.rho_ = rho;
  k.description_ = std::move(label);
  return k;
}

CoagKernel CoagKernel::with_spatial_modulation(SpatialFn s, double bound) const {
  if (!(bound > 0.0)) throw InvalidArgument("spatial modulation bound must be positive");
  CoagKernel k = *this;
  k.spatial_ = std::move(s);
  k.spatial_bound_ = bound;
  return k;
}

}  // namespace fragkin
