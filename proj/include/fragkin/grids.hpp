#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace fragkin {

class RateModel;

/// Periodic box [0, L)^dim with n points per axis, n a power of two >= 8.
class SpaceGrid {
 public:
  SpaceGrid(int dim, double length, std::size_t points_per_axis);

  int dim() const noexcept { return dim_; }
  double length() const noexcept { return length_; }
  std::size_t points_per_axis() const noexcept { return n_; }
  double spacing() const noexcept { return length_ / static_cast<double>(n_); }
  double cell_volume() const noexcept;
  std::size_t num_cells() const noexcept;

  /// Cell-centre coordinates of a flat (row-major) cell index.
  std::array<double, 2> position(std::size_t cell) const noexcept;
  /// Axis indices of a flat cell index; the second entry is 0 in 1-d.
  std::array<std::size_t, 2> indices(std::size_t cell) const noexcept;
  std::size_t flat(std::size_t i, std::size_t j = 0) const noexcept;
  /// Euclidean distance to `cell` from cell 0 along the shortest periodic image.
  double periodic_distance_from_origin(std::size_t cell) const noexcept;
  /// Discrete angular wavenumber of axis index k: 2*pi/L * (k or k-n).
  double wavenumber(std::size_t k) const noexcept;

  bool operator==(const SpaceGrid&) const = default;

 private:
  int dim_;
  double length_;
  std::size_t n_;
};

/// Geometric size nodes xi_i = xi_min * r^i on [xi_min, xi_max] with
/// product-integration weights that are exact for integrands piecewise
/// linear in log(xi) between nodes.
class SizeGrid {
 public:
  SizeGrid(double xi_min, double xi_max, std::size_t count);

  std::size_t size() const noexcept { return nodes_.size(); }
  double xi_min() const noexcept { return nodes_.front(); }
  double xi_max() const noexcept { return nodes_.back(); }
  double ratio() const noexcept { return ratio_; }
  double node(std::size_t i) const noexcept { return nodes_[i]; }
  double weight(std::size_t i) const noexcept { return weights_[i]; }
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }

  bool operator==(const SizeGrid& o) const {
    return nodes_ == o.nodes_ && weights_ == o.weights_;
  }

 private:
  double ratio_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Density u(x, xi) stored space-major, size-minor: value(cell, i) lives at
/// cell * m + i.
class Field {
 public:
  Field(std::shared_ptr<const SpaceGrid> space, std::shared_ptr<const SizeGrid> sizes);

  const SpaceGrid& space() const noexcept { return *space_; }
  const SizeGrid& sizes() const noexcept { return *sizes_; }
  const std::shared_ptr<const SpaceGrid>& space_ptr() const noexcept { return space_; }
  const std::shared_ptr<const SizeGrid>& sizes_ptr() const noexcept { return sizes_; }

  std::size_t num_cells() const noexcept { return space_->num_cells(); }
  std::size_t num_sizes() const noexcept { return sizes_->size(); }

  double& operator()(std::size_t cell, std::size_t i) noexcept { return values_[cell * num_sizes() + i]; }
  double operator()(std::size_t cell, std::size_t i) const noexcept {
    return values_[cell * num_sizes() + i];
  }
  std::span<double> cell(std::size_t c) noexcept { return {values_.data() + c * num_sizes(), num_sizes()}; }
  std::span<const double> cell(std::size_t c) const noexcept {
    return {values_.data() + c * num_sizes(), num_sizes()};
  }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool same_grids(const Field& o) const noexcept;
  void fill(double v);
  double min() const noexcept;
  double max_abs() const noexcept;
  bool all_finite() const noexcept;
  bool is_physical() const noexcept { return min() >= 0.0; }

  Field& operator+=(const Field& o);
  Field& operator*=(double a);
  /// this += a * o
  void axpy(double a, const Field& o);

 private:
  std::shared_ptr<const SpaceGrid> space_;
  std::shared_ptr<const SizeGrid> sizes_;
  std::vector<double> values_;
};

/// Throws InvalidArgument unless the two fields share grids.
void require_same_grids(const Field& a, const Field& b, const char* where);

/// sum_i w_i f(xi_i); throws on a non-finite entry.
double quadrature_integrate(std::span<const double> f, const SizeGrid& grid);

/// Size weight of the X^p_{w,s} family evaluated at a node.
using SizeWeight = std::function<double(double xi)>;

/// Moment weight 1 + xi^ell for ell > 0, and 1 for ell == 0.
double moment_weight(double xi, double ell) noexcept;

/// ( sum_x h^d ( sum_i w_i weight(xi_i) |u(x, xi_i)| )^p )^(1/p); p may be +inf.
double weighted_norm(const Field& u, double p, const SizeWeight& weight);

/// X^p_{ell,s} seminorm: weight (1 + xi^ell) * beta_env(xi)^s.
double weighted_seminorm(const Field& u, double p, double ell, double s, const RateModel& rates);

/// Total size-mass  sum_x h^d sum_i w_i xi_i u.
double total_mass(const Field& u);
/// Total particle number  sum_x h^d sum_i w_i u.
double total_number(const Field& u);

}  // namespace fragkin
