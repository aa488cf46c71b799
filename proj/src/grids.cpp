#include "fragkin/grids.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fragkin/errors.hpp"
#include "fragkin/rates.hpp"

namespace fragkin {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

SpaceGrid::SpaceGrid(int dim, double length, std::size_t points_per_axis)
    : dim_(dim), length_(length), n_(points_per_axis) {
  if (dim != 1 && dim != 2) throw InvalidArgument("space dimension must be 1 or 2");
  if (!(length > 0.0) || !std::isfinite(length)) throw InvalidArgument("domain length must be positive");
  if (n_ < 8 || !is_power_of_two(n_))
    throw InvalidArgument("points per axis must be a power of two >= 8, got " + std::to_string(n_));
}

double SpaceGrid::cell_volume() const noexcept { return std::pow(spacing(), dim_); }

std::size_t SpaceGrid::num_cells() const noexcept { return dim_ == 1 ? n_ : n_ * n_; }

std::array<std::size_t, 2> SpaceGrid::indices(std::size_t cell) const noexcept {
  if (dim_ == 1) return {cell, 0};
  return {cell / n_, cell % n_};
}

std::size_t SpaceGrid::flat(std::size_t i, std::size_t j) const noexcept {
  i %= n_;
  if (dim_ == 1) return i;
  return i * n_ + (j % n_);
}

std::array<double, 2> SpaceGrid::position(std::size_t cell) const noexcept {
  const auto idx = indices(cell);
  const double h = spacing();
  return {h * static_cast<double>(idx[0]), dim_ == 2 ? h * static_cast<double>(idx[1]) : 0.0};
}

double SpaceGrid::periodic_distance_from_origin(std::size_t cell) const noexcept {
  const auto idx = indices(cell);
  const double h = spacing();
  double r2 = 0.0;
  for (int a = 0; a < dim_; ++a) {
    const auto k = idx[static_cast<std::size_t>(a)];
    const double d = h * static_cast<double>(std::min(k, n_ - k));
    r2 += d * d;
  }
  return std::sqrt(r2);
}

double SpaceGrid::wavenumber(std::size_t k) const noexcept {
  const double base = 2.0 * std::numbers::pi / length_;
  const auto signed_k = k <= n_ / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n_);
  return base * signed_k;
}

SizeGrid::SizeGrid(double xi_min, double xi_max, std::size_t count) {
  if (!(xi_min > 0.0) || !(xi_max > xi_min) || !std::isfinite(xi_max))
    throw InvalidArgument("size interval must satisfy 0 < xi_min < xi_max < inf");
  if (count < 2) throw InvalidArgument("size grid needs at least two nodes");

  const double log_span = std::log(xi_max / xi_min);
  const double step = log_span / static_cast<double>(count - 1);
  ratio_ = std::exp(step);
  nodes_.resize(count);
  for (std::size_t i = 0; i < count; ++i) nodes_[i] = xi_min * std::exp(step * static_cast<double>(i));
  nodes_.front() = xi_min;
  nodes_.back() = xi_max;

  // On [a, b] with f linear in log(xi):  int f dxi = a*(q - 1 - lam)/lam * f(a) + a*(lam*q - q + 1)/lam * f(b),
  // q = b/a, lam = log q.  Both coefficients are positive for q > 1.
  weights_.assign(count, 0.0);
  for (std::size_t i = 0; i + 1 < count; ++i) {
    const double a = nodes_[i];
    const double b = nodes_[i + 1];
    const double lam = std::log(b / a);
    const double qm1 = std::expm1(lam);
    const double left = a * (qm1 - lam) / lam;
    const double right = (b - a) - left;
    weights_[i] += left;
    weights_[i + 1] += right;
  }
}

Field::Field(std::shared_ptr<const SpaceGrid> space, std::shared_ptr<const SizeGrid> sizes)
    : space_(std::move(space)), sizes_(std::move(sizes)) {
  if (!space_ || !sizes_) throw InvalidArgument("field requires both grids");
  values_.assign(space_->num_cells() * sizes_->size(), 0.0);
}

bool Field::same_grids(const Field& o) const noexcept {
  return (space_ == o.space_ || *space_ == *o.space_) && (sizes_ == o.sizes_ || *sizes_ == *o.sizes_);
}

void Field::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

double Field::min() const noexcept {
  return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
}

double Field::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool Field::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Field& Field::operator+=(const Field& o) {
  require_same_grids(*this, o, "Field::operator+=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

Field& Field::operator*=(double a) {
  for (double& v : values_) v *= a;
  return *this;
}

void Field::axpy(double a, const Field& o) {
  require_same_grids(*this, o, "Field::axpy");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += a * o.values_[k];
}

void require_same_grids(const Field& a, const Field& b, const char* where) {
  if (!a.same_grids(b)) throw InvalidArgument(std::string(where) + ": grid mismatch");
}

double quadrature_integrate(std::span<const double> f, const SizeGrid& grid) {
  if (f.size() != grid.size()) throw InvalidArgument("quadrature_integrate: profile length differs from grid");
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i])) throw InvalidArgument("non-finite integrand");
    sum += grid.weight(i) * f[i];
  }
  return sum;
}

double moment_weight(double xi, double ell) noexcept { return ell == 0.0 ? 1.0 : 1.0 + std::pow(xi, ell); }

double weighted_norm(const Field& u, double p, const SizeWeight& weight) {
  if (!(p >= 1.0)) throw InvalidArgument("norm exponent p must be >= 1");
  const auto& sg = u.sizes();
  std::vector<double> node_weight(sg.size());
  for (std::size_t i = 0; i < sg.size(); ++i) node_weight[i] = sg.weight(i) * weight(sg.node(i));

  const double vol = u.space().cell_volume();
  const bool sup = std::isinf(p);
  double acc = 0.0;
  for (std::size_t c = 0; c < u.num_cells(); ++c) {
    const auto row = u.cell(c);
    double inner = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) inner += node_weight[i] * std::abs(row[i]);
    if (sup)
      acc = std::max(acc, inner);
    else if (p == 1.0)
      acc += vol * inner;
    else
      acc += vol * std::pow(inner, p);
  }
  if (sup || p == 1.0) return acc;
  return std::pow(acc, 1.0 / p);
}

double weighted_seminorm(const Field& u, double p, double ell, double s, const RateModel& rates) {
  if (!(ell >= 0.0) || !(s >= 0.0)) throw InvalidArgument("moment order and smoothness index must be >= 0");
  return weighted_norm(u, p, [&](double xi) {
    const double b = s == 0.0 ? 1.0 : std::pow(rates.beta_envelope(xi), s);
    return moment_weight(xi, ell) * b;
  });
}

double total_mass(const Field& u) {
  const auto& sg = u.sizes();
  double acc = 0.0;
  for (std::size_t c = 0; c < u.num_cells(); ++c) {
    const auto row = u.cell(c);
    double inner = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) inner += sg.weight(i) * sg.node(i) * row[i];
    acc += inner;
  }
  return acc * u.space().cell_volume();
}

double total_number(const Field& u) {
  const auto& sg = u.sizes();
  double acc = 0.0;
  for (std::size_t c = 0; c < u.num_cells(); ++c) {
    const auto row = u.cell(c);
    double inner = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) inner += sg.weight(i) * row[i];
    acc += inner;
  }
  return acc * u.space().cell_volume();
}

}  // namespace fragkin
