#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace fragkin {

/// Fragmentation kernel sampled on a node set: row j holds gamma(xi_i, xi_j)
/// for i <= j.  Off-node values are bilinear in (log xi, log eta); zero above
/// the diagonal and outside the node range.
class KernelTable {
 public:
  KernelTable(std::vector<double> nodes, std::vector<std::vector<double>> rows);

  /// Samples `gamma` at every node pair i <= j.
  static KernelTable sample(const std::function<double(double, double)>& gamma, std::vector<double> nodes);

  /// Reads the `# fragkin-kernel v1` text format.
  static KernelTable read(std::istream& in);
  static KernelTable load(const std::string& path);
  void write(std::ostream& out) const;

  double operator()(double xi, double eta) const;
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  double at(std::size_t i, std::size_t j) const { return rows_[j][i]; }

 private:
  double row_value(std::size_t j, double xi) const;

  std::vector<double> nodes_;
  std::vector<std::vector<double>> rows_;
};

/// Fragmentation kernel gamma(xi, eta): daughter density at size xi for a
/// parent of size eta; zero for xi > eta.
class FragKernel {
 public:
  enum class Family { Power, Homogeneous, Separable, Tabulated, Zero };

  /// gamma = (nu + 2)/eta * (xi/eta)^nu, -1 < nu <= 0.
  static FragKernel power(double nu);
  /// gamma = h(xi/eta) / eta.
  static FragKernel homogeneous(std::function<double(double)> h, std::string label = "h");
  /// gamma = eta h0(xi) / h1(eta), h1(eta) = int_0^eta xi h0(xi) dxi.  When
  /// `h1` is empty it is integrated numerically.
  static FragKernel separable(std::function<double(double)> h0, std::function<double(double)> h1 = {},
                              std::string label = "h0");
  static FragKernel tabulated(KernelTable table);
  static FragKernel zero();

  double operator()(double xi, double eta) const;

  Family family() const noexcept { return family_; }
  /// Exponent of the power family; NaN otherwise.
  double nu() const noexcept { return nu_; }
  std::string describe() const;
  const KernelTable* table() const noexcept { return table_.get(); }

  /// Kernel multiplied by a constant (breaks conservativity unless factor == 1).
  FragKernel scaled(double factor) const;

 private:
  FragKernel() = default;

  Family family_ = Family::Zero;
  double nu_ = 0.0;
  double scale_ = 1.0;
  std::string description_;
  std::function<double(double, double)> eval_;
  std::shared_ptr<const KernelTable> table_;
};

}  // namespace fragkin
