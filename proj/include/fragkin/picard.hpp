#pragma once

#include <cstddef>
#include <vector>

#include "fragkin/integrator.hpp"

namespace fragkin {

/// Linear diffusion-fragmentation propagator S(t) approximated by Strang
/// substeps D(h/2) B(h) D(h/2), B integrated by two-stage Runge-Kutta.  Not
/// positivity-guarded: it is applied to signed fields.
class LinearPropagator {
 public:
  LinearPropagator(const Models& models, double step, std::size_t substeps, double safety, unsigned threads = 1);

  /// u <- S(step) u
  void apply(Field& u);
  std::size_t substeps() const noexcept { return substeps_; }

 private:
  const Models& models_;
  double h_;
  std::size_t substeps_;
  std::size_t inner_;
  DiffusionPropagator half_;
  Field k1_, k2_, u1_;
};

struct PicardReport {
  double T = 0.0;
  std::size_t nodes = 0;
  /// d_k = max over time nodes of ||v^{k+1} - v^k||_{X^p_ell}.
  std::vector<double> distances;
  /// d_{k+1} / d_k
  std::vector<double> ratios;
  bool converged = false;
  std::size_t substeps = 0;
  /// Relative X^1_ell change of S(T/nodes) u0 when its substep count is doubled.
  double propagator_error = 0.0;
  /// Last iterate at every time node; back() is t = T.
  std::vector<Field> trajectory;
};

/// Fixed-point iteration of the mild formulation
///   v^{k+1}(t) = S(t) u0 + int_0^t S(t - tau) C(v^k(tau), v^k(tau)) dtau
/// on `config.picard_nodes` uniform time nodes with trapezoid quadrature in
/// tau.  Convergence: d_k <= picard_tol * max_t ||v^0(t)||.  Three
/// consecutive ratios >= 1 raise NumericalFault("no contraction at this T").
PicardReport picard_solve(const Field& u0, double T, const SolverConfig& config, const Models& models, double p,
                          double ell);

}  // namespace fragkin
