#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "fragkin/grids.hpp"
#include "fragkin/rates.hpp"

namespace fragkin {

/// Discrete heat kernel G = e^{t alpha Laplacian}(impulse / h^d) measured
/// against the Gaussian envelope (alpha t)^{-d/2} exp(-|x|^2 / (16 alpha t)).
struct BoundReport {
  double alpha = 0.0;
  double t = 0.0;
  double peak = 0.0;
  double mass = 0.0;
  /// Most negative raw value relative to the peak, before any clamping.
  double min_relative = 0.0;
  bool nonnegative = false;
  /// Smallest C with G <= C * envelope at every point above the round-off floor.
  double constant = 0.0;
  std::size_t points_compared = 0;
};

/// Requires sqrt(4 alpha t) <= L/8.
BoundReport green_bound_check(double alpha, double t, const SpaceGrid& grid);

/// Log-log fit of a norm ratio against t.
struct SlopeReport {
  std::vector<double> t;
  std::vector<double> ratio;
  double slope = 0.0;
  double intercept = 0.0;
  /// Root-mean-square residual of the log-log fit.
  double residual = 0.0;
  double target = 0.0;
};

/// Least-squares slope of log(y) on log(x); needs at least 4 points.
std::pair<double, double> fit_loglog(const std::vector<double>& x, const std::vector<double>& y, double* rms = nullptr);

/// Plain L^p norm on the torus, ( sum h^d |f|^p )^{1/p}; p may be +inf.
double lp_norm(const std::vector<double>& f, const SpaceGrid& grid, double p);

/// Scalar heat semigroup with rate alpha and loss beta.  For each t the
/// ratio ||e^{tA} f_t||_q / ||f_t||_p is measured on f_t = e^{tA} u0, the
/// datum smoothed over the same time; with u0 an impulse this family
/// saturates the L^p -> L^q operator norm, so the slope approaches
/// -(d/2)(1/p - 1/q).  q may be +inf.
SlopeReport hypercontractivity_scalar(const std::vector<double>& u0, const SpaceGrid& grid, double alpha, double beta,
                                      double p, double q, const std::vector<double>& t_grid);

/// Loss-diffusion semigroup of the vector problem in X^p_ell -> X^q_ell.
/// Data concentrated on one size node reduce the operator norm to
/// max_i e^{-beta_env(xi_i) t} * (scalar ratio at alpha(xi_i)); the ell weight
/// cancels.  Target: -(d / (2 delta*)) (1/p - 1/q) with delta* = max_delta
/// for power rates, else -(d/2)(1/p - 1/q).
SlopeReport hypercontractivity_vector(const SpaceGrid& grid, const RateModel& rates, const SizeGrid& sizes, double p,
                                      double q, const std::vector<double>& t_grid);

struct MonotonicityReport {
  bool pass = true;
  /// Largest value of lhs - rhs over all pairs and points (<= tol on pass).
  double worst_excess = 0.0;
  std::pair<double, double> worst_pair{0.0, 0.0};
  std::size_t worst_cell = 0;
  std::size_t pairs_checked = 0;
};

/// For each pair xi0 <= xi1 checks, at every cell,
///   alpha(xi1)^{d/2} e^{-beta_env(xi1) t} heat_{alpha(xi1) t} phi
///     <= alpha(xi0)^{d/2} e^{-beta_env(xi0) t} heat_{alpha(xi0) t} phi + tol.
/// Throws unless the rates carry power-law metadata.
MonotonicityReport size_monotonicity_check(const std::vector<double>& phi, const SpaceGrid& grid,
                                           const RateModel& rates, double t,
                                           const std::vector<std::pair<double, double>>& pairs, double tol = 1e-10);

/// Centred Gaussian exp(-|x - L/2|^2 / (2 width^2)) sampled on the grid.
std::vector<double> gaussian_profile(const SpaceGrid& grid, double width, double amplitude = 1.0);

}  // namespace fragkin
