#include "fragkin/frag_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>

#include "fragkin/errors.hpp"
#include "fragkin/quadrature.hpp"

namespace fragkin {

namespace {

constexpr const char* kTableHeader = "# fragkin-kernel v1";

// Index j with nodes[j] <= x < nodes[j+1] and the log-linear fraction; nullopt outside.
struct Bracket {
  std::size_t lo;
  double frac;
};

std::optional<Bracket> bracket(const std::vector<double>& nodes, double x) {
  if (x < nodes.front() || x > nodes.back()) return std::nullopt;
  if (x == nodes.back()) return Bracket{nodes.size() - 1, 0.0};
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  const auto lo = static_cast<std::size_t>(it - nodes.begin()) - 1;
  if (x == nodes[lo]) return Bracket{lo, 0.0};
  const double frac = std::log(x / nodes[lo]) / std::log(nodes[lo + 1] / nodes[lo]);
  return Bracket{lo, frac};
}

}  // namespace

KernelTable::KernelTable(std::vector<double> nodes, std::vector<std::vector<double>> rows)
    : nodes_(std::move(nodes)), rows_(std::move(rows)) {
  if (nodes_.size() < 2) throw InvalidArgument("kernel table needs at least two nodes");
  if (rows_.size() != nodes_.size()) throw InvalidArgument("kernel table: one row per node required");
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    if (!(nodes_[j] > 0.0) || (j > 0 && !(nodes_[j] > nodes_[j - 1])))
      throw InvalidArgument("kernel table: nodes must be positive and strictly increasing");
    if (rows_[j].size() != j + 1) throw InvalidArgument("kernel table: row j must hold j+1 values");
    for (double v : rows_[j])
      if (!std::isfinite(v)) throw InvalidArgument("kernel table: non-finite entry");
  }
}

KernelTable KernelTable::sample(const std::function<double(double, double)>& gamma, std::vector<double> nodes) {
  std::vector<std::vector<double>> rows(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    rows[j].resize(j + 1);
    for (std::size_t i = 0; i <= j; ++i) rows[j][i] = gamma(nodes[i], nodes[j]);
  }
  return KernelTable(std::move(nodes), std::move(rows));
}

KernelTable KernelTable::read(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(kTableHeader, 0) != 0)
    throw CorruptionError("kernel table: missing '# fragkin-kernel v1' header");

  // Remaining content as whitespace-separated tokens with comments stripped.
  std::stringstream body;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    body << line << '\n';
  }
  std::size_t m = 0;
  if (!(body >> m) || m < 2) throw CorruptionError("kernel table: bad node count");
  std::vector<double> nodes(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t idx = 0;
    if (!(body >> idx >> nodes[k]) || idx != k) throw CorruptionError("kernel table: bad node line " + std::to_string(k));
  }
  std::vector<std::vector<double>> rows(m);
  for (std::size_t j = 0; j < m; ++j) {
    rows[j].resize(j + 1);
    for (std::size_t i = 0; i <= j; ++i)
      if (!(body >> rows[j][i])) throw CorruptionError("kernel table: truncated row " + std::to_string(j));
  }
  double extra = 0.0;
  if (body >> extra) throw CorruptionError("kernel table: trailing data");
  try {
    return KernelTable(std::move(nodes), std::move(rows));
  } catch (const InvalidArgument& e) {
    throw CorruptionError(e.what());
  }
}

KernelTable KernelTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open kernel table '" + path + "'");
  return read(in);
}

void KernelTable::write(std::ostream& out) const {
  out << kTableHeader << '\n';
  out << "# nodes: index xi\n" << nodes_.size() << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t k = 0; k < nodes_.size(); ++k) out << k << ' ' << nodes_[k] << '\n';
  out << "# row j: gamma(xi_i, xi_j) for i = 0..j\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? " " : "") << row[i];
    out << '\n';
  }
}

double KernelTable::row_value(std::size_t j, double xi) const {
  if (xi > nodes_[j]) return 0.0;
  const auto b = bracket(nodes_, xi);
  if (!b) return 0.0;
  const auto& row = rows_[j];
  if (b->frac == 0.0) return row[b->lo];
  // row[lo + 1] exists because xi <= nodes_[j] and xi > nodes_[lo].
  return (1.0 - b->frac) * row[b->lo] + b->frac * row[b->lo + 1];
}

double KernelTable::operator()(double xi, double eta) const {
  if (xi > eta) return 0.0;
  const auto b = bracket(nodes_, eta);
  if (!b) return 0.0;
  const double lower = row_value(b->lo, xi);
  if (b->frac == 0.0) return lower;
  return (1.0 - b->frac) * lower + b->frac * row_value(b->lo + 1, xi);
}

FragKernel FragKernel::power(double nu) {
  if (!(nu > -1.0 && nu <= 0.0)) throw InvalidArgument("power kernel requires -1 < nu <= 0");
  FragKernel k;
  k.family_ = Family::Power;
  k.nu_ = nu;
  std::ostringstream os;
  os << "power(nu=" << nu << ")";
  k.description_ = os.str();
  k.eval_ = [nu](double xi, double eta) {
    if (xi > eta || xi <= 0.0) return 0.0;
    return nu == 0.0 ? 2.0 / eta : (nu + 2.0) / eta * std::pow(xi / eta, nu);
  };
  return k;
}

FragKernel FragKernel::homogeneous(std::function<double(double)> h, std::string label) {
  if (!h) throw InvalidArgument("homogeneous kernel requires a profile");
  FragKernel k;
  k.family_ = Family::Homogeneous;
  k.nu_ = std::numeric_limits<double>::quiet_NaN();
  k.description_ = "homogeneous(" + label + ")";
  k.eval_ = [h = std::move(h)](double xi, double eta) {
    if (xi > eta || xi <= 0.0) return 0.0;
    return h(xi / eta) / eta;
  };
  return k;
}

FragKernel FragKernel::separable(std::function<double(double)> h0, std::function<double(double)> h1,
                                 std::string label) {
  if (!h0) throw InvalidArgument("separable kernel requires h0");
  if (!h1) {
    // One-entry memo per thread: kernel sweeps evaluate many xi at a fixed eta.
    auto token = std::make_shared<const char>('\0');
    h1 = [h0, token](double eta) {
      thread_local const void* owner = nullptr;
      thread_local double last_eta = -1.0;
      thread_local double last_value = 0.0;
      if (owner != token.get() || last_eta != eta) {
        last_value = integrate_from_zero([&](double x) { return x * h0(x); }, eta, 512);
        last_eta = eta;
        owner = token.get();
      }
      return last_value;
    };
  }
  FragKernel k;
  k.family_ = Family::Separable;
  k.nu_ = std::numeric_limits<double>::quiet_NaN();
  k.description_ = "separable(" + label + ")";
  k.eval_ = [h0 = std::move(h0), h1 = std::move(h1)](double xi, double eta) {
    if (xi > eta || xi <= 0.0) return 0.0;
    const double norm = h1(eta);
    return norm > 0.0 ? eta * h0(xi) / norm : 0.0;
  };
  return k;
}

FragKernel FragKernel::tabulated(KernelTable table) {
  FragKernel k;
  k.family_ = Family::Tabulated;
  k.nu_ = std::numeric_limits<double>::quiet_NaN();
  k.table_ = std::make_shared<const KernelTable>(std::move(table));
  k.description_ = "tabulated(" + std::to_string(k.table_->nodes().size()) + " nodes)";
  k.eval_ = [t = k.table_](double xi, double eta) { return (*t)(xi, eta); };
  return k;
}

FragKernel FragKernel::zero() {
  FragKernel k;
  k.family_ = Family::Zero;
  k.nu_ = std::numeric_limits<double>::quiet_NaN();
  k.description_ = "zero";
  k.eval_ = [](double, double) { return 0.0; };
  return k;
}

double FragKernel::operator()(double xi, double eta) const { return scale_ * eval_(xi, eta); }

std::string FragKernel::describe() const {
  if (scale_ == 1.0) return description_;
  std::ostringstream os;
  os << scale_ << "*" << description_;
  return os.str();
}

FragKernel FragKernel::scaled(double factor) const {
  FragKernel k = *this;
  k.scale_ *= factor;
  return k;
}

}  // namespace fragkin
