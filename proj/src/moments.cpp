#include "fragkin/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fragkin/errors.hpp"
#include "fragkin/quadrature.hpp"

namespace fragkin {

namespace {

double checked(const FragKernel& k, double xi, double eta) {
  const double g = k(xi, eta);
  if (g < 0.0) throw InvalidArgument("kernel violates non-negativity at xi=" + std::to_string(xi));
  return g;
}

std::vector<double> largest_half(const std::vector<double>& eta_samples) {
  if (eta_samples.size() < 4) throw InvalidArgument("at least four eta samples are required");
  if (!std::is_sorted(eta_samples.begin(), eta_samples.end()) || !(eta_samples.front() > 0.0))
    throw InvalidArgument("eta samples must be positive and increasing");
  const std::size_t keep = (eta_samples.size() + 1) / 2;
  return {eta_samples.end() - static_cast<std::ptrdiff_t>(keep), eta_samples.end()};
}

template <class Proxy>
EllBar threshold(const std::vector<double>& ell_grid, const std::vector<double>& eta_samples, Proxy proxy) {
  if (ell_grid.empty() || !std::is_sorted(ell_grid.begin(), ell_grid.end()))
    throw InvalidArgument("ell grid must be non-empty and ascending");
  if (eta_samples.size() < 2) throw InvalidArgument("at least two eta samples are required");
  const double eta_prev = eta_samples[eta_samples.size() - 2];
  const double eta_last = eta_samples.back();

  std::vector<bool> bounded(ell_grid.size());
  for (std::size_t k = 0; k < ell_grid.size(); ++k) {
    const double a = proxy(ell_grid[k], eta_prev);
    const double b = proxy(ell_grid[k], eta_last);
    bounded[k] = std::isfinite(b) && b <= 1.1 * a + std::numeric_limits<double>::min();
  }
  if (!bounded.back()) return {};
  std::size_t first = ell_grid.size() - 1;
  while (first > 0 && bounded[first - 1]) --first;
  return {ell_grid[first], true};
}

}  // namespace

double frag_conservativity_residual(const FragKernel& k, double eta, std::size_t m_quad) {
  if (!(eta > 0.0)) throw InvalidArgument("eta must be positive");
  if (m_quad < 64) throw InvalidArgument("m_quad must be at least 64");
  const double mass = integrate_from_zero([&](double xi) { return xi * checked(k, xi, eta); }, eta, m_quad);
  return std::abs(mass - eta) / eta;
}

std::vector<double> default_eta_samples() { return {10.0, 30.0, 100.0, 300.0, 1000.0}; }

std::vector<double> default_ell_grid() { return {0.0, 0.25, 0.5, 0.75, 1.0, 2.0, 5.0, 9.0, 20.0, 50.0, 100.0}; }

double sigma_ell_at(const FragKernel& k, double ell, double eta, std::size_t m_quad) {
  if (!(ell >= 0.0)) throw InvalidArgument("ell must be >= 0");
  return integrate_from_zero([&](double xi) { return std::pow(xi / eta, ell) * checked(k, xi, eta); }, eta, m_quad);
}

double sigma_zero_ell_at(const FragKernel& k, double ell, double eta, std::size_t m_quad) {
  if (!(ell >= 0.0)) throw InvalidArgument("ell must be >= 0");
  return std::pow(eta, -ell) * integrate_from_zero([&](double xi) { return checked(k, xi, eta); }, eta, m_quad);
}

double sigma_ell(const FragKernel& k, double ell, const std::vector<double>& eta_samples) {
  double best = -std::numeric_limits<double>::infinity();
  for (double eta : largest_half(eta_samples)) best = std::max(best, sigma_ell_at(k, ell, eta));
  return best;
}

double sigma_zero_ell(const FragKernel& k, double ell, const std::vector<double>& eta_samples) {
  double best = -std::numeric_limits<double>::infinity();
  for (double eta : largest_half(eta_samples)) best = std::max(best, sigma_zero_ell_at(k, ell, eta));
  return best;
}

EllBars estimate_ell_bars(const FragKernel& k, const std::vector<double>& ell_grid,
                          const std::vector<double>& eta_samples) {
  EllBars out;
  out.ell0 = threshold(ell_grid, eta_samples, [&](double ell, double eta) { return sigma_zero_ell_at(k, ell, eta); });
  out.ell1 = threshold(ell_grid, eta_samples, [&](double ell, double eta) { return sigma_ell_at(k, ell, eta); });
  return out;
}

MomentReport compute_moment_report(const FragKernel& k, const std::vector<double>& ell_grid,
                                   const std::vector<double>& eta_samples) {
  MomentReport r;
  r.eta_samples = eta_samples;
  r.sigma_inf_estimate = std::numeric_limits<double>::infinity();
  for (double ell : ell_grid) {
    r.sigma0_table[ell] = sigma_zero_ell(k, ell, eta_samples);
    r.sigma_table[ell] = sigma_ell(k, ell, eta_samples);
    if (ell >= 1.0) r.sigma_inf_estimate = std::min(r.sigma_inf_estimate, r.sigma_table[ell]);
  }
  const auto bars = estimate_ell_bars(k, ell_grid, eta_samples);
  r.ell0_bar = bars.ell0;
  r.ell1_bar = bars.ell1;
  return r;
}

double kappa_delta(const RateModel& r, const SizeGrid& grid, double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in [0,1)");
  double best = std::numeric_limits<double>::infinity();
  for (double xi : grid.nodes()) {
    const double v = std::pow(r.alpha(xi), delta) * std::pow(r.beta_envelope(xi), 1.0 - delta);
    best = std::min(best, v);
  }
  return best;
}

double max_delta(double theta_alpha, double theta_beta, int dim) {
  if (!(theta_alpha > 0.0) || !(theta_beta > 0.0)) throw InvalidArgument("rate exponents must be positive");
  if (dim < 1) throw InvalidArgument("dimension must be positive");
  return dim * theta_beta / (2.0 * theta_alpha + dim * theta_beta);
}

}  // namespace fragkin
