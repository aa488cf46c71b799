#include "fragkin/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fragkin/errors.hpp"

namespace fragkin {

namespace {

using Status = Clause::Status;

Clause make(std::string id, std::string statement, bool ok) {
  Clause c;
  c.id = std::move(id);
  c.statement = std::move(statement);
  c.status = ok ? Status::Pass : Status::Fail;
  return c;
}

Clause not_applicable(std::string id, std::string statement, std::string why) {
  Clause c;
  c.id = std::move(id);
  c.statement = std::move(statement);
  c.status = Status::NotApplicable;
  c.detail = std::move(why);
  return c;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

double condition_number(const DiffusionMatrix& a, int dim) {
  if (dim == 1) return a[0] > 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  // Symmetric [[a0, a1], [a2, a3]] with a1 == a2.
  const double tr = a[0] + a[3];
  const double det = a[0] * a[3] - a[1] * a[2];
  const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  const double hi = 0.5 * tr + disc;
  const double lo = 0.5 * tr - disc;
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

std::optional<double> Clause::value(const std::string& name) const {
  for (const auto& [k, v] : values)
    if (k == name) return v;
  return std::nullopt;
}

bool CertificateReport::pass() const noexcept {
  return std::none_of(clauses.begin(), clauses.end(), [](const Clause& c) { return c.failed(); });
}

const Clause* CertificateReport::find(const std::string& id) const {
  for (const auto& c : clauses)
    if (c.id == id) return &c;
  return nullptr;
}

std::vector<std::string> CertificateReport::failed_ids() const {
  std::vector<std::string> out;
  for (const auto& c : clauses)
    if (c.failed()) out.push_back(c.id);
  return out;
}

const char* to_string(Clause::Status s) noexcept {
  switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    case Status::NotApplicable: return "N/A";
  }
  return "?";
}

CertificateReport check_hypotheses(const CertificateInputs& in) {
  if (!in.rates || !in.frag || !in.coag || !in.sizes || !in.moments)
    throw InvalidArgument("check_hypotheses: rates, kernels, size grid and moment report are required");
  if (in.dim != 1 && in.dim != 2) throw InvalidArgument("check_hypotheses: dimension must be 1 or 2");
  if (!(in.p >= 1.0)) throw InvalidArgument("check_hypotheses: p must be >= 1");
  if (!(in.delta >= 0.0 && in.delta < 1.0)) throw InvalidArgument("check_hypotheses: delta must lie in [0,1)");
  if (!(in.ell >= 0.0)) throw InvalidArgument("check_hypotheses: ell must be >= 0");
  const double rho = in.coag->rho();
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("check_hypotheses: rho must lie in (0,1)");
  if (!in.alpha_matrices.empty() && in.alpha_matrices.size() != in.sizes->size())
    throw InvalidArgument("check_hypotheses: one diffusion matrix per size node required");

  const RateModel& rates = *in.rates;
  const FragKernel& frag = *in.frag;
  const CoagKernel& coag = *in.coag;
  const SizeGrid& sg = *in.sizes;
  const MomentReport& mr = *in.moments;
  const auto nodes = sg.nodes();
  CertificateReport rep;

  // Diffusion: positive and uniformly elliptic with finite condition number.
  {
    double amin = std::numeric_limits<double>::infinity();
    double amax = 0.0;
    for (double xi : nodes) {
      amin = std::min(amin, rates.alpha(xi));
      amax = std::max(amax, rates.alpha(xi));
    }
    double kappa = 1.0;
    for (const auto& a : in.alpha_matrices) kappa = std::max(kappa, condition_number(a, in.dim));
    Clause c = make("diffusion-elliptic", "alpha(xi) > 0 and kappa(alpha) < inf", amin > 0.0 && std::isfinite(kappa));
    c.values = {{"alpha_min", amin}, {"alpha_max", amax}, {"kappa_alpha", kappa}};
    rep.clauses.push_back(std::move(c));
  }

  // Fragmentation envelope: 0 < beta_0 <= beta_env <= beta <= C_beta beta_env.
  {
    double beta0 = std::numeric_limits<double>::infinity();
    for (double xi : nodes) beta0 = std::min(beta0, rates.beta_envelope(xi));
    double mod_lo = 1.0;
    double mod_hi = 1.0;
    if (rates.has_modulation()) {
      if (in.space) {
        for (std::size_t cell = 0; cell < in.space->num_cells(); ++cell) {
          const auto x = in.space->position(cell);
          for (double xi : nodes) {
            const double m = rates.modulation(x, xi);
            mod_lo = std::min(mod_lo, m);
            mod_hi = std::max(mod_hi, m);
          }
        }
      } else {
        rep.warnings.push_back("spatial modulation of beta not sampled: no space grid supplied");
      }
    }
    const bool ok = beta0 > 0.0 && mod_lo >= 1.0 - 1e-12 && mod_hi <= rates.c_beta() * (1.0 + 1e-12);
    Clause c = make("fragmentation-envelope", "0 < beta_0 <= beta_env(xi) <= beta(x,xi) <= C_beta beta_env(xi)", ok);
    c.values = {{"beta_0", beta0}, {"modulation_min", mod_lo}, {"modulation_max", mod_hi}, {"C_beta", rates.c_beta()}};
    rep.clauses.push_back(std::move(c));
  }

  // Kernel sign and support.
  {
    double most_negative = 0.0;
    double above_diagonal = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double g = frag(nodes[i], nodes[j]);
        if (i <= j)
          most_negative = std::min(most_negative, g);
        else
          above_diagonal = std::max(above_diagonal, std::abs(g));
      }
    }
    Clause c = make("kernel-nonnegative", "gamma >= 0 and gamma(xi, eta) = 0 for xi > eta",
                    most_negative >= 0.0 && above_diagonal == 0.0);
    c.values = {{"min_sample", most_negative}, {"max_above_diagonal", above_diagonal}};
    rep.clauses.push_back(std::move(c));
  }

  // Conservativity on the eta samples and every 8th size node.
  if (frag.family() == FragKernel::Family::Zero) {
    rep.clauses.push_back(
        not_applicable("kernel-conservative", "int_0^eta xi gamma(xi,eta) dxi = eta", "no fragmentation kernel"));
  } else {
    std::vector<double> etas = mr.eta_samples;
    for (std::size_t j = 0; j < nodes.size(); j += 8) etas.push_back(nodes[j]);
    etas.push_back(nodes.back());
    if (const auto* t = frag.table()) {
      // Tabulated kernels vanish below their first node; only test well inside the table.
      const double lo = 100.0 * t->nodes().front();
      const double hi = t->nodes().back();
      std::erase_if(etas, [&](double e) { return e < lo || e > hi; });
    }
    double worst = 0.0;
    double worst_eta = 0.0;
    bool negative = false;
    for (double eta : etas) {
      try {
        const double r = frag_conservativity_residual(frag, eta);
        if (r > worst) {
          worst = r;
          worst_eta = eta;
        }
      } catch (const InvalidArgument&) {
        negative = true;
      }
    }
    Clause c = make("kernel-conservative", "int_0^eta xi gamma(xi,eta) dxi = eta",
                    !negative && !etas.empty() && worst <= in.conservativity_tol);
    c.values = {{"max_residual", worst}, {"at_eta", worst_eta}, {"tolerance", in.conservativity_tol},
                {"eta_count", static_cast<double>(etas.size())}};
    if (etas.empty()) c.detail = "no admissible eta sample";
    rep.clauses.push_back(std::move(c));
  }

  // Moment thresholds.
  const auto& e0 = mr.ell0_bar;
  const auto& e1 = mr.ell1_bar;
  {
    Clause c = make("fragment-count-finite", "0 <= ell0_bar < inf", e0.value.has_value());
    c.values = {{"ell0_bar", e0.value.value_or(std::numeric_limits<double>::quiet_NaN())}};
    if (!e0.value) c.detail = "indeterminate on the tested ell grid";
    rep.clauses.push_back(std::move(c));
  }
  {
    bool ok = std::isfinite(mr.sigma_inf_estimate) && mr.sigma_inf_estimate <= in.sigma_inf_tol;
    double prev = std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (const auto& [ell, s] : mr.sigma_table) {
      if (ell < 1.0) continue;
      if (s > prev + 1e-6) monotone = false;
      prev = s;
    }
    Clause c = make("mass-spread-vanishes", "sigma_inf = inf_{ell>=1} sigma_ell = 0 (finite-eta proxy)", ok && monotone);
    c.values = {{"sigma_inf_estimate", mr.sigma_inf_estimate}, {"tolerance", in.sigma_inf_tol},
                {"sigma_table_monotone", monotone ? 1.0 : 0.0}};
    rep.clauses.push_back(std::move(c));
  }
  {
    const bool ok = e0.value && e1.value && *e0.value < 1.0 && *e1.value < 1.0;
    Clause c = make("moment-thresholds", "0 <= ell0_bar, ell1_bar < 1", ok);
    c.values = {{"ell0_bar", e0.value.value_or(std::numeric_limits<double>::quiet_NaN())},
                {"ell1_bar", e1.value.value_or(std::numeric_limits<double>::quiet_NaN())}};
    rep.clauses.push_back(std::move(c));
  }

  // Diffusion/fragmentation balance.
  {
    const double kd = kappa_delta(rates, sg, in.delta);
    Clause c = make("smoothing-balance", "kappa_delta = inf alpha^delta beta_env^(1-delta) > 0", kd > 0.0);
    c.values = {{"kappa_delta", kd}, {"delta", in.delta}};
    if (const auto& law = rates.power_law()) {
      const double dstar = max_delta(law->theta_alpha, law->theta_beta, law->dim);
      const double exponent = -2.0 * law->theta_alpha * in.delta / law->dim + (1.0 - in.delta) * law->theta_beta;
      c.values.emplace_back("delta_star", dstar);
      c.values.emplace_back("tail_exponent", exponent);
      if (exponent < 0.0)
        rep.warnings.push_back("delta = " + fmt(in.delta) + " exceeds delta* = " + fmt(dstar) +
                               ": kappa_delta is positive on this grid but decays as xi_max grows");
    }
    rep.clauses.push_back(std::move(c));
  }

  // Coagulation symmetry and domination.
  {
    double asym = 0.0;
    double ratio = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double bi = std::pow(rates.beta_envelope(nodes[i]), rho);
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        const double kij = coag(nodes[i], nodes[j]);
        const double kji = coag(nodes[j], nodes[i]);
        const double scale = std::max({std::abs(kij), std::abs(kji), std::numeric_limits<double>::min()});
        asym = std::max(asym, std::abs(kij - kji) / scale);
        const double bj = std::pow(rates.beta_envelope(nodes[j]), rho);
        const double denom = bi + bj;
        ratio = std::max(ratio, denom > 0.0 ? kij * coag.spatial_bound() / denom
                                            : (kij > 0.0 ? std::numeric_limits<double>::infinity() : 0.0));
      }
    }
    Clause s = make("coagulation-symmetric", "kappa(xi,eta) = kappa(eta,xi)", asym <= 1e-12);
    s.values = {{"max_relative_asymmetry", asym}};
    rep.clauses.push_back(std::move(s));
    Clause d = make("coagulation-dominated", "kappa(xi,eta) <= c_kappa [beta_env(xi)^rho + beta_env(eta)^rho]",
                    ratio <= coag.c_kappa() * (1.0 + 1e-12));
    d.values = {{"max_ratio", ratio}, {"c_kappa", coag.c_kappa()}, {"rho", rho}};
    rep.clauses.push_back(std::move(d));
    if (coag.has_spatial_modulation())
      rep.warnings.push_back("coagulation kernel varies in space only through a separable factor s(x)");
  }

  // Integrability of the data class.
  {
    const double lower = in.delta > 0.0 ? in.dim / (2.0 * (1.0 - rho) * in.delta)
                                        : std::numeric_limits<double>::infinity();
    Clause c = make("integrability", "2 <= p and d / (2 (1-rho) delta) < p", in.p >= 2.0 && lower < in.p);
    c.values = {{"p", in.p}, {"lower_bound", lower}};
    rep.clauses.push_back(std::move(c));
  }

  const auto& law = rates.power_law();
  if (!law) {
    rep.clauses.push_back(not_applicable("power-envelope", "power-law envelopes of alpha and beta_env",
                                         "rates are not in power mode"));
    rep.clauses.push_back(not_applicable("rate-monotone", "alpha non-increasing, beta_env non-decreasing",
                                         "rates are not in power mode"));
    rep.clauses.push_back(not_applicable("global-theta-alpha", "0 < theta_alpha < theta_beta ^ (ell1_bar + (1-rho) theta_beta)",
                                         "rates are not in power mode"));
    rep.clauses.push_back(not_applicable("global-theta-beta",
                                         "theta_beta < 2 delta (1-ell1_bar) p' / (d + 2 delta p') ^ (1 - ell0_bar)",
                                         "rates are not in power mode"));
    return rep;
  }

  if (law->dim != in.dim) throw InvalidArgument("check_hypotheses: power-law dimension differs from the space dimension");

  {
    double a_lo = std::numeric_limits<double>::infinity(), a_hi = 0.0;
    double b_lo = std::numeric_limits<double>::infinity(), b_hi = 0.0;
    for (double xi : nodes) {
      const double a = rates.alpha(xi) * std::pow(1.0 + xi, 2.0 * law->theta_alpha / law->dim);
      const double b = rates.beta_envelope(xi) * std::pow(1.0 + xi, -law->theta_beta);
      a_lo = std::min(a_lo, a);
      a_hi = std::max(a_hi, a);
      b_lo = std::min(b_lo, b);
      b_hi = std::max(b_hi, b);
    }
    constexpr double slack = 1e-12;
    const bool ok = a_lo >= law->c_alpha_lower * (1 - slack) && a_hi <= law->c_alpha_upper * (1 + slack) &&
                    b_lo >= law->c_beta_lower * (1 - slack) && b_hi <= law->c_beta_upper * (1 + slack) &&
                    law->c_alpha_lower > 0.0 && law->c_beta_lower > 0.0;
    Clause c = make("power-envelope", "c_alpha <= alpha (1+xi)^(2 theta_alpha/d) <= C_alpha, c_beta <= beta_env (1+xi)^-theta_beta <= C_beta'", ok);
    c.values = {{"alpha_scaled_min", a_lo}, {"alpha_scaled_max", a_hi}, {"beta_scaled_min", b_lo}, {"beta_scaled_max", b_hi}};
    rep.clauses.push_back(std::move(c));
  }
  {
    bool alpha_ok = true;
    bool beta_ok = true;
    for (std::size_t i = 1; i < nodes.size(); ++i) {
      if (rates.alpha(nodes[i]) > rates.alpha(nodes[i - 1])) alpha_ok = false;
      if (rates.beta_envelope(nodes[i]) < rates.beta_envelope(nodes[i - 1])) beta_ok = false;
    }
    Clause c = make("rate-monotone", "alpha non-increasing, beta_env non-decreasing", alpha_ok && beta_ok);
    c.values = {{"alpha_nonincreasing", alpha_ok ? 1.0 : 0.0}, {"beta_nondecreasing", beta_ok ? 1.0 : 0.0}};
    rep.clauses.push_back(std::move(c));
  }

  const double ta = law->theta_alpha;
  const double tb = law->theta_beta;
  {
    Clause c;
    c.id = "global-theta-alpha";
    c.statement = "0 < theta_alpha < theta_beta ^ (ell1_bar + (1-rho) theta_beta)";
    if (!e1.value) {
      c.status = Status::Fail;
      c.detail = "ell1_bar indeterminate";
      c.values = {{"theta_alpha", ta}};
    } else {
      const double bound = std::min(tb, *e1.value + (1.0 - rho) * tb);
      c.status = (ta > 0.0 && ta < bound) ? Status::Pass : Status::Fail;
      c.values = {{"theta_alpha", ta}, {"bound", bound}, {"theta_beta", tb},
                  {"ell1_bar_plus_spread", *e1.value + (1.0 - rho) * tb}};
    }
    rep.clauses.push_back(std::move(c));
  }
  {
    Clause c;
    c.id = "global-theta-beta";
    c.statement = "theta_beta < 2 delta (1-ell1_bar) p' / (d + 2 delta p') ^ (1 - ell0_bar)";
    const double pp = in.p > 1.0 ? in.p / (in.p - 1.0) : std::numeric_limits<double>::infinity();
    if (!e0.value || !e1.value) {
      c.status = Status::Fail;
      c.detail = "ell0_bar or ell1_bar indeterminate";
      c.values = {{"theta_beta", tb}};
    } else {
      const double smoothing = 2.0 * in.delta * (1.0 - *e1.value) * pp / (in.dim + 2.0 * in.delta * pp);
      const double count = 1.0 - *e0.value;
      const double bound = std::min(smoothing, count);
      c.status = tb < bound ? Status::Pass : Status::Fail;
      c.values = {{"theta_beta", tb}, {"bound", bound}, {"smoothing_bound", smoothing}, {"count_bound", count},
                  {"p_conjugate", pp}};
    }
    rep.clauses.push_back(std::move(c));
  }
  return rep;
}

}  // namespace fragkin
