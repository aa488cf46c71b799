#include "fragkin/fragmentation.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "fragkin/errors.hpp"
#include "fragkin/moments.hpp"
#include "fragkin/quadrature.hpp"

namespace fragkin {

namespace {

constexpr double kBuildResidualLimit = 1e-3;

// Conservativity screen on grid parents well above xi_min (and inside a
// table's support), where the continuum identity is meaningful.
void require_conservative(const FragKernel& kernel, const SizeGrid& sg) {
  double lo = 100.0 * sg.xi_min();
  if (const auto* t = kernel.table()) lo = std::max(lo, 100.0 * t->nodes().front());
  double hi = sg.xi_max();
  if (const auto* t = kernel.table()) hi = std::min(hi, t->nodes().back());
  for (std::size_t j = 0; j < sg.size(); j += 8) {
    const double eta = sg.node(j);
    if (eta < lo || eta > hi) continue;
    const double r = frag_conservativity_residual(kernel, eta);
    if (r > kBuildResidualLimit)
      throw InvalidArgument("fragmentation kernel is not conservative: residual " + std::to_string(r) +
                            " at eta=" + std::to_string(eta));
  }
}

}  // namespace

FragOperator FragOperator::build(const FragKernel& kernel, const RateModel& rates,
                                 std::shared_ptr<const SizeGrid> sizes) {
  if (!sizes) throw InvalidArgument("fragmentation operator needs a size grid");
  const SizeGrid& sg = *sizes;
  FragOperator op;
  op.sizes_ = sizes;
  op.rates_ = rates;
  op.m_ = sg.size();
  const std::size_t m = op.m_;
  op.g_.assign(m * m, 0.0);
  op.mu_.assign(m, 0.0);
  op.rescale_.assign(m, 1.0);
  op.beta_env_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    op.beta_env_[i] = rates.beta_envelope(sg.node(i));
    if (!(op.beta_env_[i] >= 0.0) || !std::isfinite(op.beta_env_[i]))
      throw InvalidArgument("fragmentation rate must be finite and >= 0");
    op.beta_max_ = std::max(op.beta_max_, op.beta_env_[i]);
  }
  if (rates.has_modulation()) op.beta_max_ *= rates.c_beta();

  if (kernel.family() == FragKernel::Family::Zero) {
    op.conservative_ = false;
    return op;
  }

  // Raw entries are cell averages of gamma(., xi_j) over the dual cell of
  // node i; the top cell reaches up to the parent, the bottom cell starts at
  // xi_min.  Averaging rather than point sampling keeps rescale factors near
  // 1 even for kernels singular at xi -> 0.
  const double half = std::sqrt(sg.ratio());
  bool any_mass = false;
  for (std::size_t j = 0; j < m; ++j) {
    const double eta = sg.node(j);
    auto gamma = [&](double xi) { return kernel(xi, eta); };
    double raw_mass = 0.0;
    for (std::size_t i = 0; i < j; ++i) {
      const double a = i == 0 ? sg.node(0) : sg.node(i) / half;
      const double b = i + 1 == j ? eta : sg.node(i) * half;
      const double integral = gauss_legendre(gamma, a, b);
      if (integral < 0.0) throw InvalidArgument("kernel violates non-negativity");
      op.g_[i * m + j] = integral / sg.weight(i);
      raw_mass += sg.node(i) * sg.weight(i) * op.g_[i * m + j];
    }
    double mu = j == 0 ? eta : integrate_from_zero([&](double xi) { return xi * gamma(xi); }, sg.xi_min());
    mu = std::clamp(mu, 0.0, eta);
    const double target = eta - mu;
    op.mu_[j] = mu;
    if (raw_mass > 0.0) {
      const double f = target / raw_mass;
      for (std::size_t i = 0; i < j; ++i) op.g_[i * m + j] *= f;
      op.rescale_[j] = f;
    }
    if (j > 0 && (raw_mass > 0.0 || mu > 0.0)) any_mass = true;
  }

  if (!any_mass) {
    // Zero kernel in tabulated or functional form: loss only.
    std::fill(op.g_.begin(), op.g_.end(), 0.0);
    std::fill(op.mu_.begin(), op.mu_.end(), 0.0);
    op.conservative_ = false;
    return op;
  }
  for (std::size_t j = 1; j < m; ++j) {
    double resolved = 0.0;
    for (std::size_t i = 0; i < j; ++i) resolved += op.g_[i * m + j];
    const double target = sg.node(j) - op.mu_[j];
    if (resolved == 0.0 && target > 1e-12 * sg.node(j) && op.beta_env_[j] > 0.0)
      throw InvalidArgument("kernel unresolvable on grid at parent xi=" + std::to_string(sg.node(j)));
  }
  require_conservative(kernel, sg);
  return op;
}

double FragOperator::column_residual(std::size_t j) const {
  const SizeGrid& sg = *sizes_;
  double mass = mu_.at(j);
  for (std::size_t i = 0; i < j; ++i) mass += sg.node(i) * sg.weight(i) * g_[i * m_ + j];
  return std::abs(mass - sg.node(j)) / sg.node(j);
}

void FragOperator::cell_rates(const Field& u, std::size_t cell, std::vector<double>& beta) const {
  beta = beta_env_;
  if (!rates_.has_modulation()) return;
  const auto x = u.space().position(cell);
  for (std::size_t i = 0; i < m_; ++i) beta[i] *= rates_.modulation(x, sizes_->node(i));
}

void FragOperator::apply(const Field& u, Field& out, std::vector<double>* underflow) const {
  if (!(u.sizes() == *sizes_)) throw InvalidArgument("fragmentation: field size grid does not match the operator");
  require_same_grids(u, out, "fragmentation apply");
  const SizeGrid& sg = *sizes_;
  if (underflow) underflow->assign(u.num_cells(), 0.0);
  std::vector<double> beta;
  const auto mi = static_cast<Eigen::Index>(m_);
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> G(g_.data(), mi, mi);
  Eigen::VectorXd flux(mi), gain(mi);
  for (std::size_t c = 0; c < u.num_cells(); ++c) {
    cell_rates(u, c, beta);
    const auto row = u.cell(c);
    auto dst = out.cell(c);
    double under = 0.0;
    for (std::size_t j = 0; j < m_; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      flux[jj] = beta[j] * row[j] * sg.weight(j);
      under += mu_[j] * flux[jj];
    }
    gain = G.triangularView<Eigen::StrictlyUpper>() * flux;
    for (std::size_t i = 0; i < m_; ++i) dst[i] = gain[static_cast<Eigen::Index>(i)] - beta[i] * row[i];
    if (underflow) (*underflow)[c] = under;
  }
}

Field FragOperator::apply(const Field& u) const {
  Field out(u.space_ptr(), u.sizes_ptr());
  apply(u, out);
  return out;
}

void FragOperator::loss_rates(const Field& u, Field& d) const {
  require_same_grids(u, d, "fragmentation loss rates");
  std::vector<double> beta;
  for (std::size_t c = 0; c < u.num_cells(); ++c) {
    cell_rates(u, c, beta);
    std::copy(beta.begin(), beta.end(), d.cell(c).begin());
  }
}

double FragOperator::underflow_rate(const Field& u) const {
  if (!(u.sizes() == *sizes_)) throw InvalidArgument("fragmentation: field size grid does not match the operator");
  const SizeGrid& sg = *sizes_;
  std::vector<double> beta;
  double total = 0.0;
  for (std::size_t c = 0; c < u.num_cells(); ++c) {
    cell_rates(u, c, beta);
    const auto row = u.cell(c);
    for (std::size_t j = 0; j < m_; ++j) total += mu_[j] * beta[j] * row[j] * sg.weight(j);
  }
  return total * u.space().cell_volume();
}

}  // namespace fragkin
