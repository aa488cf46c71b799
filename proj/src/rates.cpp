#include "fragkin/rates.hpp"

#include <cmath>

#include "fragkin/errors.hpp"

namespace fragkin {

RateModel RateModel::constant(double alpha, double beta) {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw InvalidArgument("constant rates must be non-negative");
  return RateModel([alpha](double) { return alpha; }, [beta](double) { return beta; });
}

RateModel RateModel::power(const PowerLaw& law) {
  if (law.dim != 1 && law.dim != 2) throw InvalidArgument("power rates: dimension must be 1 or 2");
  if (!(law.theta_alpha > 0.0) || !(law.theta_beta > 0.0))
    throw InvalidArgument("power rates: exponents must be positive");
  if (!(law.alpha_scale > 0.0) || !(law.beta_scale > 0.0))
    throw InvalidArgument("power rates: scales must be positive");
  const double a_exp = -2.0 * law.theta_alpha / law.dim;
  const double b_exp = law.theta_beta;
  RateModel r([s = law.alpha_scale, a_exp](double xi) { return s * std::pow(1.0 + xi, a_exp); },
              [s = law.beta_scale, b_exp](double xi) { return s * std::pow(1.0 + xi, b_exp); });
  r.power_ = law;
  return r;
}

RateModel RateModel::custom(SizeFn alpha, SizeFn beta_envelope) {
  if (!alpha || !beta_envelope) throw InvalidArgument("custom rates require both evaluators");
  return RateModel(std::move(alpha), std::move(beta_envelope));
}

RateModel RateModel::with_modulation(Modulation m, double c_beta) const {
  if (!(c_beta >= 1.0)) throw InvalidArgument("C_beta must be >= 1");
  RateModel r = *this;
  r.modulation_ = std::move(m);
  r.c_beta_ = c_beta;
  return r;
}

RateModel RateModel::with_beta_envelope(SizeFn beta_envelope) const {
  RateModel r = *this;
  r.beta_env_ = std::move(beta_envelope);
  return r;
}

RateModel RateModel::with_alpha(SizeFn alpha) const {
  RateModel r = *this;
  r.alpha_ = std::move(alpha);
  return r;
}

}  // namespace fragkin
