#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "fragkin/frag_kernel.hpp"
#include "fragkin/grids.hpp"
#include "fragkin/rates.hpp"

namespace fragkin {

/// |int_0^eta xi gamma(xi, eta) dxi - eta| / eta.  Throws if a sampled kernel
/// value is negative.
double frag_conservativity_residual(const FragKernel& k, double eta, std::size_t m_quad = 1024);

/// {10, 30, 100, 300, 1000}
std::vector<double> default_eta_samples();
/// {0, 0.25, 0.5, 0.75, 1, 2, 5, 9, 20, 50, 100}
std::vector<double> default_ell_grid();

/// eta^-ell int_0^eta xi^ell gamma(xi, eta) dxi at a single eta.
double sigma_ell_at(const FragKernel& k, double ell, double eta, std::size_t m_quad = 1024);
/// eta^-ell int_0^eta gamma(xi, eta) dxi at a single eta.
double sigma_zero_ell_at(const FragKernel& k, double ell, double eta, std::size_t m_quad = 1024);

/// Finite-eta proxy of the limsup: max over the largest half of `eta_samples`.
double sigma_ell(const FragKernel& k, double ell, const std::vector<double>& eta_samples);
double sigma_zero_ell(const FragKernel& k, double ell, const std::vector<double>& eta_samples);

/// Grid estimate of an infimum threshold; `value` is empty when the proxy never
/// settles on the tested grid ("indeterminate").
struct EllBar {
  std::optional<double> value;
  bool stabilized = false;
};

struct EllBars {
  EllBar ell0;  // fragment-count threshold
  EllBar ell1;  // mass-spread threshold
};

/// Smallest grid ell from which every larger grid ell has a proxy that does
/// not grow by 10% or more between the two largest eta samples.
EllBars estimate_ell_bars(const FragKernel& k, const std::vector<double>& ell_grid,
                          const std::vector<double>& eta_samples);

struct MomentReport {
  std::map<double, double> sigma0_table;
  std::map<double, double> sigma_table;
  EllBar ell0_bar;
  EllBar ell1_bar;
  double sigma_inf_estimate = 0.0;
  std::vector<double> eta_samples;
};

MomentReport compute_moment_report(const FragKernel& k, const std::vector<double>& ell_grid = default_ell_grid(),
                                   const std::vector<double>& eta_samples = default_eta_samples());

/// min over size nodes of alpha(xi)^delta * beta_env(xi)^(1 - delta).
double kappa_delta(const RateModel& r, const SizeGrid& grid, double delta);

/// d theta_beta / (2 theta_alpha + d theta_beta): the largest delta keeping
/// alpha^delta beta_env^(1-delta) bounded below for power rates.
double max_delta(double theta_alpha, double theta_beta, int dim);

}  // namespace fragkin
