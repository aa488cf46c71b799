#include "fragkin/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "fragkin/checkpoint.hpp"
#include "fragkin/errors.hpp"

namespace fragkin::detail {
const std::vector<std::pair<std::string, std::string>>& preset_table();
}

namespace fragkin {

namespace {

// Rows "xi alpha beta_env", increasing xi; values between rows are
// interpolated linearly in log-log, and held constant beyond the ends.
struct RateTable {
  std::vector<double> log_xi, log_alpha, log_beta;

  static RateTable load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open rate table '" + path + "'");
    RateTable t;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      std::istringstream row(line);
      double xi, a, b;
      if (!(row >> xi)) continue;
      if (!(row >> a >> b) || !(xi > 0.0) || !(a > 0.0) || !(b > 0.0))
        throw CorruptionError("rate table '" + path + "' line " + std::to_string(line_no) +
                              ": expected three positive numbers");
      if (!t.log_xi.empty() && std::log(xi) <= t.log_xi.back())
        throw CorruptionError("rate table '" + path + "': sizes must increase");
      t.log_xi.push_back(std::log(xi));
      t.log_alpha.push_back(std::log(a));
      t.log_beta.push_back(std::log(b));
    }
    if (t.log_xi.size() < 2) throw CorruptionError("rate table '" + path + "' needs at least two rows");
    return t;
  }

  double eval(const std::vector<double>& ys, double xi) const {
    const double x = std::log(xi);
    if (x <= log_xi.front()) return std::exp(ys.front());
    if (x >= log_xi.back()) return std::exp(ys.back());
    const auto k = static_cast<std::size_t>(std::upper_bound(log_xi.begin(), log_xi.end(), x) - log_xi.begin());
    const double s = (x - log_xi[k - 1]) / (log_xi[k] - log_xi[k - 1]);
    return std::exp(ys[k - 1] + s * (ys[k] - ys[k - 1]));
  }
};

// Size profile normalised to unit discrete number sum_i w_i f_i = 1.
std::vector<double> size_profile(const InitialConfig& ic, const SizeGrid& sg) {
  const std::size_t m = sg.size();
  std::vector<double> f(m, 0.0);
  if (ic.size_profile == "monodisperse") {
    std::size_t best = 0;
    for (std::size_t i = 1; i < m; ++i)
      if (std::abs(std::log(sg.node(i) / ic.size_mean)) < std::abs(std::log(sg.node(best) / ic.size_mean))) best = i;
    f[best] = 1.0 / sg.weight(best);
    return f;
  }
  for (std::size_t i = 0; i < m; ++i) {
    const double xi = sg.node(i);
    if (ic.size_profile == "exponential") {
      f[i] = std::exp(-xi / ic.size_mean);
    } else {
      const double z = std::log(xi / ic.size_mean) / ic.size_width;
      f[i] = std::exp(-0.5 * z * z) / xi;
    }
  }
  const double n = quadrature_integrate(f, sg);
  if (!(n > 0.0)) throw InvalidArgument("initial size profile has no mass on the size grid");
  for (double& v : f) v /= n;
  return f;
}

}  // namespace

RateModel build_rates(const RunConfiguration& config) {
  const auto& r = config.rates;
  RateModel rates = RateModel::constant(r.alpha, r.beta);
  if (r.mode == "power") {
    PowerLaw law;
    law.dim = config.grids.dim;
    law.theta_alpha = r.theta_alpha;
    law.theta_beta = r.theta_beta;
    law.alpha_scale = r.alpha_scale;
    law.beta_scale = r.beta_scale;
    law.c_alpha_lower = r.c_alpha_lower;
    law.c_alpha_upper = r.c_alpha_upper;
    law.c_beta_lower = r.c_beta_lower;
    law.c_beta_upper = r.c_beta_upper;
    rates = RateModel::power(law);
  } else if (r.mode == "tabulated") {
    auto table = std::make_shared<const RateTable>(RateTable::load(r.table));
    rates = RateModel::custom([table](double xi) { return table->eval(table->log_alpha, xi); },
                              [table](double xi) { return table->eval(table->log_beta, xi); });
  }
  if (r.modulation > 0.0) {
    const double a = r.modulation;
    const double L = config.grids.length;
    rates = rates.with_modulation(
        [a, L](const Position& x, double) {
          return 1.0 + a * 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * x[0] / L));
        },
        1.0 + a);
  }
  return rates;
}

FragKernel build_frag_kernel(const RunConfiguration& config) {
  const auto& f = config.frag_kernel;
  const double nu = f.nu;
  if (f.family == "power") return FragKernel::power(nu);
  if (f.family == "zero") return FragKernel::zero();
  if (f.family == "tabulated") return FragKernel::tabulated(KernelTable::load(f.table));
  const bool uniform = f.profile == "uniform";
  if (f.family == "homogeneous") {
    if (uniform) return FragKernel::homogeneous([](double) { return 2.0; }, "2");
    return FragKernel::homogeneous([nu](double z) { return (nu + 2.0) * std::pow(z, nu); },
                                   "(nu+2) z^" + format_double(nu));
  }
  if (uniform)
    return FragKernel::separable([](double) { return 1.0; }, [](double eta) { return 0.5 * eta * eta; }, "1");
  return FragKernel::separable([nu](double xi) { return std::pow(xi, nu); },
                               [nu](double eta) { return std::pow(eta, nu + 2.0) / (nu + 2.0); },
                               "xi^" + format_double(nu));
}

CoagKernel build_coag_kernel(const RunConfiguration& config) {
  const auto& k = config.coag_kernel;
  if (k.family == "constant") return CoagKernel::constant(k.kappa0, k.c_kappa, k.rho);
  if (k.family == "sum_power") return CoagKernel::sum_power(k.kappa0, k.exponent, k.c_kappa, k.rho);
  return CoagKernel::zero(k.c_kappa, k.rho);
}

Scenario build_scenario(const RunConfiguration& config) {
  Scenario s;
  s.config = config;
  const auto& g = config.grids;
  auto space = std::make_shared<const SpaceGrid>(g.dim, g.length, static_cast<std::size_t>(g.n));
  auto sizes = std::make_shared<const SizeGrid>(g.xi_min, g.xi_max, static_cast<std::size_t>(g.m));
  s.models = std::make_unique<Models>(
      Models::build(space, sizes, build_rates(config), build_frag_kernel(config), build_coag_kernel(config)));

  const auto& a = config.analysis;
  s.moments = compute_moment_report(s.models->frag_kernel, a.ell_grid.empty() ? default_ell_grid() : a.ell_grid,
                                    a.eta_samples.empty() ? default_eta_samples() : a.eta_samples);
  CertificateInputs in;
  in.rates = &s.models->rates;
  in.frag = &s.models->frag_kernel;
  in.coag = &s.models->coag_kernel;
  in.sizes = sizes.get();
  in.space = space.get();
  in.moments = &s.moments;
  in.dim = g.dim;
  in.p = a.p;
  in.ell = a.ell;
  in.delta = a.delta;
  s.certificate = check_hypotheses(in);

  // The periodic box stands in for R^d only while the spreading bump stays clear of its own images.
  const auto& ic = config.initial_condition;
  if (ic.preset == "gaussian") {
    double alpha_max = 0.0;
    for (double xi : sizes->nodes()) alpha_max = std::max(alpha_max, s.models->rates.alpha(xi));
    const double reach = 4.0 * std::sqrt(4.0 * alpha_max * config.solver.t_end);
    if (g.length / 2.0 - 3.0 * ic.width < reach)
      s.warnings.push_back("torus may be too small: L/2 - 3 width = " + format_double(g.length / 2.0 - 3.0 * ic.width) +
                           " < 4 sqrt(4 alpha_max t_end) = " + format_double(reach));
  }
  return s;
}

RunState initial_run_state(const Scenario& scenario, std::uint64_t seed) {
  const Models& models = *scenario.models;
  const auto& ic = scenario.config.initial_condition;
  Field u(models.space, models.sizes);

  if (ic.preset == "checkpoint") {
    RunState saved = read_checkpoint(ic.checkpoint);
    if (!(saved.u.space() == *models.space) || !(saved.u.sizes() == *models.sizes))
      throw InvalidArgument("checkpoint grids differ from the configured grids");
    std::copy(saved.u.values().begin(), saved.u.values().end(), u.values().begin());
    return RunState{saved.t, saved.step_count, std::move(u), saved.underflow, saved.overflow};
  }
  if (ic.preset == "zero") return initial_state(std::move(u));

  const SpaceGrid& sg = *models.space;
  const std::vector<double> f = size_profile(ic, *models.sizes);
  const double L = sg.length();

  // Random preset: a few Fourier modes with random phases on top of a unit
  // mean, amplitudes summing to 1/2, so the profile stays smooth and positive.
  constexpr int modes = 4;
  std::array<double, modes> amp{}, phase{};
  if (ic.preset == "random") {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double total = 0.0;
    for (int k = 0; k < modes; ++k) {
      amp[k] = unit(rng);
      phase[k] = 2.0 * std::numbers::pi * unit(rng);
      total += amp[k];
    }
    for (double& v : amp) v *= 0.5 / total;
  }

  for (std::size_t c = 0; c < sg.num_cells(); ++c) {
    const auto x = sg.position(c);
    double s = ic.amplitude;
    if (ic.preset == "gaussian") {
      double r2 = 0.0;
      for (int d = 0; d < sg.dim(); ++d) r2 += (x[d] - L / 2.0) * (x[d] - L / 2.0);
      s *= std::exp(-r2 / (2.0 * ic.width * ic.width));
    } else if (ic.preset == "random") {
      double v = 1.0;
      for (int k = 0; k < modes; ++k) {
        double arg = phase[k];
        for (int d = 0; d < sg.dim(); ++d) arg += 2.0 * std::numbers::pi * (k + 1) * x[d] / L;
        v += amp[k] * std::cos(arg);
      }
      s *= v;
    }
    auto row = u.cell(c);
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = s * f[i];
  }
  return initial_state(std::move(u));
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, text] : detail::preset_table()) n.push_back(name);
    return n;
  }();
  return names;
}

const std::string& preset_text(const std::string& name) {
  for (const auto& [n, text] : detail::preset_table())
    if (n == name) return text;
  throw InvalidArgument("unknown preset '" + name + "'");
}

}  // namespace fragkin
