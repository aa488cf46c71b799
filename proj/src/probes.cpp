#include "fragkin/probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fragkin/diffusion.hpp"
#include "fragkin/errors.hpp"
#include "fragkin/moments.hpp"

namespace fragkin {

namespace {

std::vector<double> impulse(const SpaceGrid& grid) {
  std::vector<double> f(grid.num_cells(), 0.0);
  f[0] = 1.0 / grid.cell_volume();
  return f;
}

void check_t_grid(const std::vector<double>& t_grid) {
  if (t_grid.size() < 4) throw InvalidArgument("degenerate fit: at least 4 time points are required");
  for (double t : t_grid)
    if (!(t > 0.0)) throw InvalidArgument("probe times must be positive");
}

}  // namespace

BoundReport green_bound_check(double alpha, double t, const SpaceGrid& grid) {
  if (!(alpha > 0.0) || !(t > 0.0)) throw InvalidArgument("green bound check needs alpha > 0 and t > 0");
  if (std::sqrt(4.0 * alpha * t) > grid.length() / 8.0) throw InvalidArgument("torus too small for bound check");

  auto g = impulse(grid);
  SpectralHeat heat(grid);
  heat.apply(g, alpha * t);

  BoundReport r;
  r.alpha = alpha;
  r.t = t;
  r.peak = *std::max_element(g.begin(), g.end());
  double mass = 0.0;
  double lowest = 0.0;
  for (double v : g) {
    mass += v;
    lowest = std::min(lowest, v);
  }
  r.mass = mass * grid.cell_volume();
  r.min_relative = lowest / r.peak;
  r.nonnegative = r.min_relative >= -DiffusionPropagator::clamp_tolerance;

  // Compare only where G stands above transform round-off; below it the
  // ratio against a super-exponentially small envelope is noise.
  const double floor = 1e-13 * r.peak;
  const double at = alpha * t;
  const double d = grid.dim();
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (g[c] <= floor) continue;
    const double x = grid.periodic_distance_from_origin(c);
    // log-space to avoid underflow of the envelope
    const double log_env = -0.5 * d * std::log(at) - x * x / (16.0 * at);
    r.constant = std::max(r.constant, std::exp(std::log(g[c]) - log_env));
    ++r.points_compared;
  }
  return r;
}

std::pair<double, double> fit_loglog(const std::vector<double>& x, const std::vector<double>& y, double* rms) {
  if (x.size() != y.size() || x.size() < 4) throw InvalidArgument("degenerate fit: at least 4 points are required");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("log-log fit needs positive data");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) throw InvalidArgument("degenerate fit: abscissae coincide");
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  if (rms) {
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = std::log(y[i]) - (intercept + slope * std::log(x[i]));
      ss += e * e;
    }
    *rms = std::sqrt(ss / n);
  }
  return {slope, intercept};
}

double lp_norm(const std::vector<double>& f, const SpaceGrid& grid, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  for (double v : f) s += std::pow(std::abs(v), p);
  return std::pow(s * grid.cell_volume(), 1.0 / p);
}

SlopeReport hypercontractivity_scalar(const std::vector<double>& u0, const SpaceGrid& grid, double alpha, double beta,
                                      double p, double q, const std::vector<double>& t_grid) {
  check_t_grid(t_grid);
  if (!(q >= p) || !(p >= 1.0)) throw InvalidArgument("hyper-contractivity probe needs 1 <= p <= q");
  if (u0.size() != grid.num_cells()) throw InvalidArgument("initial profile does not match the grid");
  if (!(alpha > 0.0) || !(beta >= 0.0)) throw InvalidArgument("probe needs alpha > 0 and beta >= 0");

  SpectralHeat heat(grid);
  SlopeReport r;
  for (double t : t_grid) {
    std::vector<double> f = u0;
    heat.apply(f, alpha * t);
    std::vector<double> g = f;
    heat.apply(g, alpha * t, beta * t);
    r.t.push_back(t);
    r.ratio.push_back(lp_norm(g, grid, q) / lp_norm(f, grid, p));
  }
  const double a = 1.0 / p - (std::isinf(q) ? 0.0 : 1.0 / q);
  std::tie(r.slope, r.intercept) = fit_loglog(r.t, r.ratio, &r.residual);
  r.target = -0.5 * grid.dim() * a;
  return r;
}

SlopeReport hypercontractivity_vector(const SpaceGrid& grid, const RateModel& rates, const SizeGrid& sizes, double p,
                                      double q, const std::vector<double>& t_grid) {
  check_t_grid(t_grid);
  if (!(q >= p) || !(p >= 1.0)) throw InvalidArgument("hyper-contractivity probe needs 1 <= p <= q");
  const auto u0 = impulse(grid);
  SpectralHeat heat(grid);
  SlopeReport r;
  for (double t : t_grid) {
    double best = 0.0;
    for (double xi : sizes.nodes()) {
      const double at = rates.alpha(xi) * t;
      const double decay = rates.beta_envelope(xi) * t;
      if (std::sqrt(4.0 * at) > grid.length() / 8.0) throw InvalidArgument("torus too small for the probe times");
      std::vector<double> f = u0;
      heat.apply(f, at);
      std::vector<double> g = f;
      heat.apply(g, at);
      best = std::max(best, std::exp(-decay) * lp_norm(g, grid, q) / lp_norm(f, grid, p));
    }
    r.t.push_back(t);
    r.ratio.push_back(best);
  }
  const double a = 1.0 / p - (std::isinf(q) ? 0.0 : 1.0 / q);
  std::tie(r.slope, r.intercept) = fit_loglog(r.t, r.ratio, &r.residual);
  const double d = grid.dim();
  if (const auto& law = rates.power_law()) {
    const double dstar = max_delta(law->theta_alpha, law->theta_beta, law->dim);
    r.target = -(d / (2.0 * dstar)) * a;
  } else {
    r.target = -0.5 * d * a;
  }
  return r;
}

MonotonicityReport size_monotonicity_check(const std::vector<double>& phi, const SpaceGrid& grid,
                                           const RateModel& rates, double t,
                                           const std::vector<std::pair<double, double>>& pairs, double tol) {
  if (!rates.power_law()) throw InvalidArgument("size-monotonicity check requires power-mode rates");
  if (phi.size() != grid.num_cells()) throw InvalidArgument("profile does not match the grid");
  if (std::any_of(phi.begin(), phi.end(), [](double v) { return !(v >= 0.0); }))
    throw InvalidArgument("size-monotonicity check needs a non-negative profile");
  if (!(t > 0.0)) throw InvalidArgument("t must be positive");

  const double half_d = 0.5 * grid.dim();
  SpectralHeat heat(grid);
  auto scaled_heat = [&](double xi) {
    std::vector<double> f = phi;
    const double a = rates.alpha(xi);
    heat.apply(f, a * t, rates.beta_envelope(xi) * t);
    const double w = std::pow(a, half_d);
    for (double& v : f) v *= w;
    return f;
  };

  MonotonicityReport rep;
  rep.worst_excess = -std::numeric_limits<double>::infinity();
  for (auto [xi0, xi1] : pairs) {
    if (!(xi0 > 0.0) || !(xi1 >= xi0)) throw InvalidArgument("size pairs must satisfy 0 < xi0 <= xi1");
    const auto small = scaled_heat(xi0);
    const auto large = scaled_heat(xi1);
    for (std::size_t c = 0; c < small.size(); ++c) {
      const double excess = large[c] - small[c];
      if (excess > rep.worst_excess) {
        rep.worst_excess = excess;
        rep.worst_pair = {xi0, xi1};
        rep.worst_cell = c;
      }
    }
    ++rep.pairs_checked;
  }
  rep.pass = rep.worst_excess <= tol;
  return rep;
}

std::vector<double> gaussian_profile(const SpaceGrid& grid, double width, double amplitude) {
  if (!(width > 0.0)) throw InvalidArgument("Gaussian width must be positive");
  std::vector<double> f(grid.num_cells());
  const double centre = 0.5 * grid.length();
  for (std::size_t c = 0; c < f.size(); ++c) {
    const auto x = grid.position(c);
    double r2 = (x[0] - centre) * (x[0] - centre);
    if (grid.dim() == 2) r2 += (x[1] - centre) * (x[1] - centre);
    f[c] = amplitude * std::exp(-r2 / (2.0 * width * width));
  }
  return f;
}

}  // namespace fragkin
