#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "fragkin/coag_kernel.hpp"
#include "fragkin/grids.hpp"

namespace fragkin {

/// Where the particle created by a pair (i, j) goes: split between the
/// bracketing nodes a and a+1 with fractions that keep both its number (1)
/// and its mass (xi_i + xi_j).  `target < 0` marks a pair whose product lies
/// above xi_max.
struct PivotSplit {
  int target = -1;
  double lower = 0.0;  // fraction on node `target`
  double upper = 0.0;  // fraction on node `target + 1`
  bool overflow() const noexcept { return target < 0; }
};

/// Per-cell ledger rates of an apply: mass and number of particles formed above xi_max.
struct OverflowRates {
  std::vector<double> mass;
  std::vector<double> number;
};

/// Discrete symmetric bilinear coagulation rate C(u, v).
///
/// The continuum gain (1/4) int k [u v' + v u'] summed over ordered pairs of
/// a symmetric kernel equals (1/2) sum_{i,j} k_ij S_ij w_i w_j with
/// S_ij = (u_i v_j + v_i u_j) / 2; each such event creates one particle,
/// which the pivot table distributes over the two bracketing nodes.
class CoagOperator {
 public:
  static CoagOperator build(const CoagKernel& kernel, std::shared_ptr<const SizeGrid> sizes);

  std::size_t size() const noexcept { return m_; }
  double kernel(std::size_t i, std::size_t j) const noexcept { return k_[i * m_ + j]; }
  const PivotSplit& split(std::size_t i, std::size_t j) const noexcept { return pivots_[i * m_ + j]; }
  bool is_zero() const noexcept { return zero_; }

  /// out <- C(u, v).
  void apply(const Field& u, const Field& v, Field& out, OverflowRates* overflow = nullptr,
             unsigned threads = 1) const;
  Field apply(const Field& u, const Field& v) const;

  /// d <- s(x) sum_j k_ij u_j w_j, the per-particle loss rate of C(u, u).
  void loss_rates(const Field& u, Field& d) const;

  /// Largest per-particle loss rate sum_j k_ij u_j w_j over cells and nodes.
  double max_loss_rate(const Field& u) const;

  /// Spatial integral of the overflow mass rate of C(u, u).
  double overflow_mass_rate(const Field& u) const;

 private:
  CoagOperator() = default;

  std::shared_ptr<const SizeGrid> sizes_;
  CoagKernel::SpatialFn spatial_;
  std::size_t m_ = 0;
  std::vector<double> k_;
  std::vector<PivotSplit> pivots_;
  bool zero_ = false;

  // Gain in dot-product form.  For a fixed larger partner j, the pairs
  // (i <= j) with a common target node form contiguous runs of i, so each run
  // contributes two dot products instead of a scatter per pair.  Column j of
  // lo_/hi_ (offset j*m) holds, for pair (i, j), the event weight times the
  // lower/upper fraction; for overflow pairs it holds the event weight and the
  // event weight times the product mass.
  struct Run {
    std::uint32_t target;
    std::uint32_t begin;
    std::uint32_t end;
  };
  std::vector<double> lo_, hi_;
  std::vector<Run> runs_;
  std::vector<std::size_t> run_start_;     // runs of column j: [run_start_[j], run_start_[j+1])
  std::vector<std::size_t> overflow_from_;  // overflow pairs of column j: i in [overflow_from_[j], j]
};

}  // namespace fragkin
