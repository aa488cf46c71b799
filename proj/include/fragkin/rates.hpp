#pragma once

#include <array>
#include <functional>
#include <optional>

namespace fragkin {

/// Power-law rate parameters:
///   alpha(xi) = alpha_scale * (1 + xi)^(-2 theta_alpha / d)
///   beta_env(xi) = beta_scale * (1 + xi)^(theta_beta)
/// The envelope constants are the declared bounds the certifier checks
/// alpha(xi)(1+xi)^(2 theta_alpha/d) and beta_env(xi)(1+xi)^(-theta_beta) against.
struct PowerLaw {
  int dim = 1;
  double theta_alpha = 0.2;
  double theta_beta = 0.5;
  double alpha_scale = 1.0;
  double beta_scale = 1.0;
  double c_alpha_lower = 1.0;
  double c_alpha_upper = 1.0;
  double c_beta_lower = 1.0;
  double c_beta_upper = 1.0;
};

using Position = std::array<double, 2>;

/// Diffusion rate alpha(xi), fragmentation envelope beta_env(xi), and the
/// optional spatial modulation beta(x, xi) = m(x, xi) * beta_env(xi) with
/// m in [1, C_beta].  Immutable; evaluators must be pure.
class RateModel {
 public:
  using SizeFn = std::function<double(double)>;
  using Modulation = std::function<double(const Position&, double)>;

  static RateModel constant(double alpha, double beta);
  static RateModel power(const PowerLaw& law);
  static RateModel custom(SizeFn alpha, SizeFn beta_envelope);

  /// Copy with a spatial modulation factor; `c_beta` is its declared upper bound.
  RateModel with_modulation(Modulation m, double c_beta) const;
  /// Copy with the envelope replaced but any power-law metadata kept, so the
  /// certifier and size-monotonicity check see the perturbed shape.
  RateModel with_beta_envelope(SizeFn beta_envelope) const;
  RateModel with_alpha(SizeFn alpha) const;

  double alpha(double xi) const { return alpha_(xi); }
  double beta_envelope(double xi) const { return beta_env_(xi); }
  double modulation(const Position& x, double xi) const { return modulation_ ? modulation_(x, xi) : 1.0; }
  double beta(const Position& x, double xi) const { return modulation(x, xi) * beta_env_(xi); }

  bool has_modulation() const noexcept { return static_cast<bool>(modulation_); }
  double c_beta() const noexcept { return c_beta_; }
  const std::optional<PowerLaw>& power_law() const noexcept { return power_; }

 private:
  RateModel(SizeFn alpha, SizeFn beta_env) : alpha_(std::move(alpha)), beta_env_(std::move(beta_env)) {}

  SizeFn alpha_;
  SizeFn beta_env_;
  Modulation modulation_;
  double c_beta_ = 1.0;
  std::optional<PowerLaw> power_;
};

}  // namespace fragkin
