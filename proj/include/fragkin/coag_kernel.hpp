#pragma once

#include <functional>
#include <string>

#include "fragkin/rates.hpp"

namespace fragkin {

/// Symmetric coagulation kernel kappa(x, xi, eta) = s(x) * k(xi, eta), with the
/// user-declared domination constants c_kappa and rho in (0, 1):
///   k(xi, eta) <= c_kappa [beta_env(xi)^rho + beta_env(eta)^rho].
class CoagKernel {
 public:
  using SizeFn2 = std::function<double(double, double)>;
  using SpatialFn = std::function<double(const Position&)>;

  static CoagKernel zero(double c_kappa = 1.0, double rho = 0.5);
  static CoagKernel constant(double kappa0, double c_kappa, double rho);
  /// kappa0 * [(1 + xi)^a + (1 + eta)^a]
  static CoagKernel sum_power(double kappa0, double exponent, double c_kappa, double rho);
  static CoagKernel custom(SizeFn2 k, double c_kappa, double rho, std::string label = "custom");

  /// Copy with a bounded non-negative spatial factor s(x) <= bound.
  CoagKernel with_spatial_modulation(SpatialFn s, double bound) const;

  double operator()(double xi, double eta) const { return eval_(xi, eta); }
  double spatial(const Position& x) const { return spatial_ ? spatial_(x) : 1.0; }
  bool has_spatial_modulation() const noexcept { return static_cast<bool>(spatial_); }
  double spatial_bound() const noexcept { return spatial_bound_; }
  bool is_zero() const noexcept { return zero_; }

  double c_kappa() const noexcept { return c_kappa_; }
  double rho() const noexcept { return rho_; }
  const std::string& describe() const noexcept { return description_; }

 private:
  CoagKernel() = default;

  SizeFn2 eval_;
  SpatialFn spatial_;
  double spatial_bound_ = 1.0;
  double c_kappa_ = 1.0;
  double rho_ = 0.5;
  bool zero_ = false;
  std::string description_;
};

}  // namespace fragkin
