#include "fragkin/picard.hpp"

#include <algorithm>
#include <cmath>

#include "fragkin/errors.hpp"

namespace fragkin {

namespace {

double distance(const Field& a, const Field& b, double p, double ell, const RateModel& rates) {
  Field diff = a;
  diff.axpy(-1.0, b);
  return weighted_seminorm(diff, p, ell, 0.0, rates);
}

}  // namespace

LinearPropagator::LinearPropagator(const Models& models, double step, std::size_t substeps, double safety,
                                   unsigned threads)
    : models_(models),
      h_(step / static_cast<double>(std::max<std::size_t>(substeps, 1))),
      substeps_(std::max<std::size_t>(substeps, 1)),
      inner_(std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(h_ * models.frag.beta_max() / safety)))),
      half_(models.space, models.sizes, models.rates, 0.5 * h_, false, threads),
      k1_(models.space, models.sizes),
      k2_(models.space, models.sizes),
      u1_(models.space, models.sizes) {
  if (!(step > 0.0)) throw InvalidArgument("propagator step must be positive");
}

void LinearPropagator::apply(Field& u) {
  const double g = h_ / static_cast<double>(inner_);
  for (std::size_t s = 0; s < substeps_; ++s) {
    half_.apply(u);
    for (std::size_t r = 0; r < inner_; ++r) {
      models_.frag.apply(u, k1_);
      std::copy(u.values().begin(), u.values().end(), u1_.values().begin());
      u1_.axpy(g, k1_);
      models_.frag.apply(u1_, k2_);
      u.axpy(0.5 * g, k1_);
      u.axpy(0.5 * g, k2_);
    }
    half_.apply(u);
  }
}

PicardReport picard_solve(const Field& u0, double T, const SolverConfig& config, const Models& models, double p,
                          double ell) {
  config.validate();
  if (!(T > 0.0)) throw InvalidArgument("Picard horizon must be positive");
  if (!(u0.space() == *models.space) || !(u0.sizes() == *models.sizes))
    throw InvalidArgument("initial field does not match the model grids");
  const auto n = static_cast<std::size_t>(config.picard_nodes);
  const double delta = T / static_cast<double>(n);

  PicardReport rep;
  rep.T = T;
  rep.nodes = n;

  // Substep count: double until S(delta) u0 moves by less than 1e-6 relative.
  std::size_t sub = 2;
  double err = 0.0;
  for (;;) {
    Field a = u0, b = u0;
    LinearPropagator(models, delta, sub, config.safety, config.threads).apply(a);
    LinearPropagator(models, delta, 2 * sub, config.safety, config.threads).apply(b);
    const double scale = weighted_seminorm(b, 1.0, ell, 0.0, models.rates);
    err = scale > 0.0 ? distance(a, b, 1.0, ell, models.rates) / scale : 0.0;
    sub *= 2;
    if (err <= 1e-6 || sub >= 64) break;
  }
  rep.substeps = sub;
  rep.propagator_error = err;
  LinearPropagator S(models, delta, sub, config.safety, config.threads);

  // v0(t_k) = S(delta)^k u0
  std::vector<Field> v0;
  v0.reserve(n + 1);
  v0.push_back(u0);
  for (std::size_t k = 1; k <= n; ++k) {
    Field next = v0.back();
    S.apply(next);
    v0.push_back(std::move(next));
  }
  double scale = 0.0;
  for (const auto& f : v0) scale = std::max(scale, weighted_seminorm(f, p, ell, 0.0, models.rates));

  std::vector<Field> v = v0;
  std::vector<Field> c(n + 1, Field(models.space, models.sizes));
  int non_contracting = 0;
  for (int k = 0; k < config.picard_kmax; ++k) {
    for (std::size_t j = 0; j <= n; ++j) models.coag.apply(v[j], v[j], c[j], nullptr, config.threads);
    // J_j = S J_{j-1} + (delta/2) S C_{j-1} + (delta/2) C_j
    std::vector<Field> next;
    next.reserve(n + 1);
    next.push_back(v0[0]);
    Field J(models.space, models.sizes);
    for (std::size_t j = 1; j <= n; ++j) {
      J.axpy(0.5 * delta, c[j - 1]);
      S.apply(J);
      J.axpy(0.5 * delta, c[j]);
      Field vj = v0[j];
      vj += J;
      next.push_back(std::move(vj));
    }
    double d = 0.0;
    for (std::size_t j = 0; j <= n; ++j) d = std::max(d, distance(next[j], v[j], p, ell, models.rates));
    if (!std::isfinite(d)) throw NumericalFault("Picard iterate became non-finite");
    if (!rep.distances.empty()) {
      const double prev = rep.distances.back();
      const double ratio = prev > 0.0 ? d / prev : 0.0;
      rep.ratios.push_back(ratio);
      non_contracting = ratio >= 1.0 ? non_contracting + 1 : 0;
    }
    rep.distances.push_back(d);
    v = std::move(next);
    if (d <= config.picard_tol * scale) {
      rep.converged = true;
      break;
    }
    if (non_contracting >= 3) throw NumericalFault("no contraction at this T");
  }
  rep.trajectory = std::move(v);
  return rep;
}

}  // namespace fragkin
