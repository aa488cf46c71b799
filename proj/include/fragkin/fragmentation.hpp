#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "fragkin/frag_kernel.hpp"
#include "fragkin/grids.hpp"
#include "fragkin/rates.hpp"

namespace fragkin {

/// Discrete fragmentation rate  (Bu)_i = sum_{j>i} G[i][j] beta(x, xi_j) u_j w_j - beta(x, xi_i) u_i.
///
/// Column j of G is rescaled so that  sum_i xi_i w_i G[i][j] + mu_j = xi_j
/// holds to round-off, where mu_j is the parent mass whose fragments fall
/// below xi_min.  That mass is reported as an underflow rate instead of
/// being lost.
class FragOperator {
 public:
  static FragOperator build(const FragKernel& kernel, const RateModel& rates, std::shared_ptr<const SizeGrid> sizes);

  std::size_t size() const noexcept { return m_; }
  const SizeGrid& sizes() const noexcept { return *sizes_; }
  double gain(std::size_t i, std::size_t j) const noexcept { return g_[i * m_ + j]; }
  /// Parent mass routed below xi_min per unit parent number, mu_j.
  double underflow_share(std::size_t j) const noexcept { return mu_[j]; }
  /// Factor applied to the raw column to enforce the mass identity (1 for empty columns).
  double rescale(std::size_t j) const noexcept { return rescale_[j]; }
  /// |sum_i xi_i w_i G[i][j] + mu_j - xi_j| / xi_j.
  double column_residual(std::size_t j) const;
  /// False for the zero kernel, whose operator is loss only.
  bool conservative() const noexcept { return conservative_; }
  double beta_max() const noexcept { return beta_max_; }

  /// out <- Bu.  When `underflow` is given it receives, per cell, the rate
  /// sum_j mu_j beta(x, xi_j) u_j w_j of mass leaving through xi_min.
  void apply(const Field& u, Field& out, std::vector<double>* underflow = nullptr) const;
  Field apply(const Field& u) const;

  /// d <- beta(x, xi_i), the per-particle loss rate.
  void loss_rates(const Field& u, Field& d) const;

  /// Spatial integral of the per-cell underflow rate.
  double underflow_rate(const Field& u) const;

 private:
  FragOperator() = default;
  void cell_rates(const Field& u, std::size_t cell, std::vector<double>& beta) const;

  std::shared_ptr<const SizeGrid> sizes_;
  RateModel rates_ = RateModel::constant(1.0, 1.0);
  std::size_t m_ = 0;
  std::vector<double> g_;
  std::vector<double> mu_;
  std::vector<double> rescale_;
  std::vector<double> beta_env_;
  double beta_max_ = 0.0;
  bool conservative_ = true;
};

}  // namespace fragkin
