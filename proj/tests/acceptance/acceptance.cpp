// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "fragkin/checkpoint.hpp"
#include "fragkin/config.hpp"
#include "fragkin/diagnostics.hpp"
#include "fragkin/moments.hpp"
#include "fragkin/picard.hpp"
#include "fragkin/probes.hpp"
#include "fragkin/scenario.hpp"
#include "fragkin/series_io.hpp"

using namespace fragkin;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

RunConfiguration preset(const std::string& name) { return parse_config(preset_text(name)); }

double field_distance(const Field& a, const Field& b, double ell, const RateModel& rates) {
  Field d = a;
  d.axpy(-1.0, b);
  return weighted_seminorm(d, 1.0, ell, 0.0, rates);
}

bool bit_equal(const Field& a, const Field& b) {
  const auto x = a.values(), y = b.values();
  return x.size() == y.size() && std::equal(x.begin(), x.end(), y.begin());
}

// The full power-rate run shared by the mass and positivity criteria.
const RunResult& full_run() {
  static const RunResult r = [] {
    const RunConfiguration c = preset("full-power-rate-global");
    const Scenario s = build_scenario(c);
    return run(c.solver, initial_run_state(s), *s.models, c.norm_set());
  }();
  return r;
}

Outcome mass_conservation() {
  Outcome o;
  const DiagnosticsSeries& s = full_run().series;
  const double m0 = s.accounted_mass(0);
  double worst = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) worst = std::max(worst, std::abs(s.accounted_mass(k) - m0) / m0);
  o.require(s.times.back() == 1.0 && !full_run().blow_up, "run reached t=1");
  o.require(worst <= 1e-8, fmt("max relative drift %.3g over %g samples", worst, s.size()));
  return o;
}

Outcome positivity() {
  Outcome o;
  const DiagnosticsSeries& s = full_run().series;
  const double lowest = *std::min_element(s.positivity_min.begin(), s.positivity_min.end());
  o.require(lowest >= 0.0, fmt("min positivity_min %.3g over %g samples", lowest, s.size()));
  return o;
}

Outcome constant_kernel() {
  Outcome o;
  const RunConfiguration c = preset("constant-kernel-coagulation");
  const Scenario s = build_scenario(c);
  const RunResult r = run(c.solver, initial_run_state(s), *s.models, c.norm_set());
  const DiagnosticsSeries& d = r.series;
  const double volume = std::pow(c.grids.length, c.grids.dim);
  const double n0 = d.number.front() / volume;
  const double t = d.times.back();
  const double exact = 1.0 / (1.0 + t / 2.0);
  const double err = std::abs(d.number.back() / volume - exact) / exact;
  double drift = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k)
    drift = std::max(drift, std::abs(d.accounted_mass(k) - d.accounted_mass(0)) / d.accounted_mass(0));
  bool decreasing = true;
  for (std::size_t k = 1; k < d.size(); ++k) decreasing = decreasing && d.number[k] < d.number[k - 1];
  o.require(std::abs(n0 - 1.0) < 1e-12, fmt("N(0)=%.15g", n0));
  o.require(t == 2.0 && err <= 0.01, fmt("N(%g)=%.6f vs %.6f", t, d.number.back() / volume, exact) +
                                         fmt(", rel err %.3g", err));
  o.require(drift <= 1e-8, fmt("M1 drift %.3g", drift));
  o.require(decreasing, "number decreasing");
  return o;
}

Outcome sigma_suite() {
  Outcome o;
  const std::vector<double> eta = default_eta_samples();
  double worst1 = 0.0, worst = 0.0;
  bool monotone = true;
  for (double nu : {0.0, -0.25, -0.5}) {
    const FragKernel k = FragKernel::power(nu);
    worst1 = std::max(worst1, std::abs(sigma_ell(k, 1.0, eta) - 1.0));
    for (double ell : {0.5, 1.0, 2.0, 5.0, 9.0})
      worst = std::max(worst, std::abs(sigma_ell(k, ell, eta) - (nu + 2.0) / (nu + ell + 1.0)));
    const MomentReport m = compute_moment_report(k);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& [ell, v] : m.sigma_table) {
      if (ell < 1.0) continue;
      monotone = monotone && v <= prev;
      prev = v;
    }
  }
  o.require(worst1 <= 1e-8, fmt("max |sigma_1 - 1| %.3g", worst1));
  o.require(worst <= 1e-6, fmt("max closed-form gap %.3g", worst));
  o.require(monotone, "sigma table non-increasing for ell >= 1");
  return o;
}

Outcome hypercontractivity() {
  Outcome o;
  const double inf = std::numeric_limits<double>::infinity();
  const SpaceGrid g(1, 2.0, 4096);
  std::vector<double> impulse(g.num_cells(), 0.0);
  impulse[0] = 1.0 / g.spacing();
  const std::vector<double> ts{1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3};
  for (double p : {1.0, 2.0}) {
    const SlopeReport r = hypercontractivity_scalar(impulse, g, 1.0, 0.0, p, inf, ts);
    const double target = -0.5 / p;
    o.require(std::abs(r.slope - target) <= 0.05 * std::abs(target),
              fmt("scalar (%g,inf) slope %.4f target %.4f", p, r.slope, target));
  }

  const SpaceGrid wide(1, 2.0, 8192);
  const SizeGrid sizes(1e-2, 1e6, 256);
  const RunConfiguration c = preset("full-power-rate-global");
  const RateModel rates = build_rates(c);
  std::vector<double> tv;
  for (int k = 0; k < 8; ++k) tv.push_back(1e-3 * std::pow(10.0, k / 7.0));
  const double delta = max_delta(c.rates.theta_alpha, c.rates.theta_beta, 1);
  for (double p : {1.0, 2.0}) {
    const SlopeReport r = hypercontractivity_vector(wide, rates, sizes, p, inf, tv);
    const double target = -(1.0 / (2.0 * delta)) / p;
    o.require(std::abs(r.slope - target) <= 0.10 * std::abs(target),
              fmt("vector (%g,inf) slope %.4f target %.4f", p, r.slope, target));
  }
  return o;
}

Outcome green_bound() {
  Outcome o;
  const SpaceGrid g(1, 40.0, 4096);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, worst_mass = 0.0;
  bool nonneg = true;
  for (double t : {1e-3, 2e-3, 5e-3, 1e-2}) {
    const BoundReport b = green_bound_check(1.0, t, g);
    nonneg = nonneg && b.nonnegative;
    worst_mass = std::max(worst_mass, std::abs(b.mass - 1.0));
    lo = std::min(lo, b.constant);
    hi = std::max(hi, b.constant);
  }
  o.require(nonneg, "nonnegative");
  o.require(worst_mass <= 1e-8, fmt("max |mass - 1| %.3g", worst_mass));
  o.require(hi / lo - 1.0 < 0.1, fmt("envelope constant in [%.5f, %.5f], spread %.3g", lo, hi, hi / lo - 1.0));
  return o;
}

Outcome size_monotonicity() {
  Outcome o;
  const SpaceGrid g(1, 20.0, 512);
  const auto phi = gaussian_profile(g, 0.3);
  const std::vector<std::pair<double, double>> pairs{{0.1, 0.3}, {0.3, 1.0}, {1.0, 3.0}, {3.0, 10.0}, {10.0, 30.0}};
  const RateModel good = build_rates(preset("full-power-rate-global"));
  // Same power metadata, but the loss envelope decreases with size.
  const RateModel bad = good.with_beta_envelope([](double x) { return 5.0 * std::pow(1.0 + x, -0.5); });
  for (double t : {0.05, 0.5}) {
    const MonotonicityReport r = size_monotonicity_check(phi, g, good, t, pairs);
    o.require(r.pass && r.pairs_checked == 5, fmt("power rates pass at t=%g (worst excess %.3g)", t, r.worst_excess));
    const MonotonicityReport v = size_monotonicity_check(phi, g, bad, t, pairs);
    o.require(!v.pass, fmt("violating model fails at t=%g (excess %.3g)", t, v.worst_excess));
  }
  return o;
}

Outcome certificate() {
  Outcome o;
  RunConfiguration c = preset("full-power-rate-global");
  const CertificateReport base = build_scenario(c).certificate;
  o.require(base.pass(), "worked set PASS");
  const double ba = base.find("global-theta-alpha")->value("bound").value_or(NAN);
  const double bb = base.find("global-theta-beta")->value("bound").value_or(NAN);
  o.require(std::abs(ba - 0.25) < 1e-12 && std::abs(bb - 4.0 / 7.0) < 1e-12,
            fmt("echoed bounds theta_alpha < %.6f, theta_beta < %.6f", ba, bb));
  c.rates.theta_alpha = 0.3;
  o.require(build_scenario(c).certificate.failed_ids() == std::vector<std::string>{"global-theta-alpha"},
            "theta_alpha=0.3 fails only global-theta-alpha");
  c.rates.theta_alpha = 0.2;
  c.rates.theta_beta = 0.6;
  o.require(build_scenario(c).certificate.failed_ids() == std::vector<std::string>{"global-theta-beta"},
            "theta_beta=0.6 fails only global-theta-beta");
  return o;
}

Outcome global_boundedness() {
  Outcome o;
  RunConfiguration c = preset("full-power-rate-global");
  c.solver.t_end = 5.0;
  c.solver.output_every = 50;
  const Scenario s = build_scenario(c);
  const RunState s0 = initial_run_state(s);
  const NormSpec x11{1.0, 1.0, 0.0};
  const NormSpec xpl{c.analysis.p, c.analysis.ell, 0.0};
  std::vector<double> omegas;
  for (double dt : {c.solver.dt, c.solver.dt / 2.0}) {
    SolverConfig sc = c.solver;
    sc.dt = dt;
    sc.output_every = static_cast<std::uint64_t>(std::llround(c.solver.output_every * c.solver.dt / dt));
    const RunResult r = run(sc, s0, *s.models, c.norm_set());
    const GlobalReport g = boundedness_report(r.series, s.certificate.pass());
    const double omega = g.omega.value_or(NAN);
    omegas.push_back(omega);
    if (dt != c.solver.dt) continue;
    o.require(!r.blow_up && r.series.times.back() == 5.0, "reached t=5");
    for (const NormSpec& n : {x11, xpl}) {
      const NormVerdict* v = g.find(n);
      o.require(v && v->verdict == Verdict::BoundedTrend,
                n.key() + " " + (v ? to_string(v->verdict) : "missing") +
                    (v ? fmt(" (max ratio %.3f, rate %.4f)", v->max_ratio, v->rate) : ""));
    }
  }
  const double change = std::abs(omegas[1] - omegas[0]) / std::abs(omegas[0]);
  o.require(std::isfinite(omegas[0]) && std::isfinite(omegas[1]) && change < 0.2,
            fmt("omega %.6g -> %.6g under dt halving (change %.3g)", omegas[0], omegas[1], change));
  return o;
}

Outcome picard_mode() {
  Outcome o;
  RunConfiguration c = preset("full-power-rate-global");
  // Tight enough that the iteration runs past k = 6 before stopping.
  c.solver.picard_tol = 1e-15;
  const Scenario s = build_scenario(c);
  const Models& md = *s.models;
  const RunState s0 = initial_run_state(s);
  const double T = 0.05;
  const PicardReport p = picard_solve(s0.u, T, c.solver, md, c.analysis.p, c.analysis.ell);
  bool contracting = p.ratios.size() >= 7;
  double worst = 0.0;
  for (std::size_t k = 0; k < std::min<std::size_t>(7, p.ratios.size()); ++k) {
    contracting = contracting && p.ratios[k] < 1.0;
    worst = std::max(worst, p.ratios[k]);
  }
  o.require(contracting, fmt("ratios for k <= 6 below 1 (max %.3g, %g iterations)", worst, p.distances.size()));

  auto strang = [&](double dt) {
    SolverConfig sc = c.solver;
    sc.dt = dt;
    sc.t_end = T;
    return run(sc, s0, md, {{1.0, 0.0, 0.0}}).final_state.u;
  };
  const Field coarse = strang(c.solver.dt);
  const Field fine = strang(c.solver.dt / 2.0);
  const double split = field_distance(coarse, fine, c.analysis.ell, md.rates);
  const double gap = field_distance(p.trajectory.back(), fine, c.analysis.ell, md.rates);
  o.require(gap <= 5.0 * split, fmt("fixed point vs Strang %.3g, step-halving error %.3g (x%.2f)", gap, split,
                                    gap / split));
  return o;
}

Outcome scheme_order() {
  Outcome o;
  PowerLaw law;
  law.theta_alpha = 0.2;
  law.theta_beta = 0.5;
  auto space = std::make_shared<const SpaceGrid>(1, 10.0, 32);
  auto sizes = std::make_shared<const SizeGrid>(1e-3, 100.0, 64);
  const Models md = Models::build(space, sizes, RateModel::power(law), FragKernel::power(0.0),
                                  CoagKernel::sum_power(0.5, 0.25, 0.5, 0.5));
  Field u0(space, sizes);
  const auto g = gaussian_profile(*space, 1.5);
  for (std::size_t c = 0; c < u0.num_cells(); ++c)
    for (std::size_t i = 0; i < u0.num_sizes(); ++i) {
      const double x = sizes->node(i);
      u0(c, i) = (0.2 + g[c]) * std::exp(-x) * std::exp(-0.5 * std::pow(std::log(x), 2));
    }
  const double T = 0.4;
  std::size_t rejections = 0;
  auto solve = [&](double dt) {
    SolverConfig sc;
    sc.dt = dt;
    sc.t_end = T;
    sc.output_every = 1000;
    RunResult r = run(sc, initial_state(u0), md, {{1.0, 0.0, 0.0}});
    rejections += r.rejections;
    return r.final_state.u;
  };
  const Field a = solve(T / 8), b = solve(T / 16), c = solve(T / 32);
  const double e1 = field_distance(a, b, 1.0, md.rates);
  const double e2 = field_distance(b, c, 1.0, md.rates);
  const double ratio = e1 / e2;
  o.require(rejections == 0, "no positivity limiting");
  o.require(std::abs(ratio - 4.0) <= 1.0, fmt("self-convergence ratio %.4f (differences %.3g, %.3g)", ratio, e1, e2));
  return o;
}

Outcome determinism() {
  Outcome o;
  RunConfiguration c = preset("full-power-rate-global");
  c.solver.t_end = 0.05;
  c.solver.output_every = 5;
  c.solver.threads = 1;
  const Scenario s = build_scenario(c);
  auto ndjson = [&] {
    const RunResult r = run(c.solver, initial_run_state(s), *s.models, c.norm_set());
    std::ostringstream out;
    emit_series(out, c, r.series);
    return std::make_pair(out.str(), r.final_state);
  };
  const auto [first, end1] = ndjson();
  const auto [second, end2] = ndjson();
  o.require(!first.empty() && first == second, fmt("double run NDJSON identical (%g bytes)", first.size()));

  std::ostringstream ck;
  write_checkpoint(end1, ck);
  std::istringstream in(ck.str());
  const RunState back = read_checkpoint(in);
  std::ostringstream again;
  write_checkpoint(back, again);
  o.require(bit_equal(back.u, end1.u) && back.t == end1.t && back.step_count == end1.step_count &&
                back.underflow == end1.underflow && back.overflow == end1.overflow && again.str() == ck.str(),
            "checkpoint round trip bit-exact");

  SolverConfig half = c.solver;
  half.t_end = c.solver.t_end / 2.0;
  const RunState mid = run(half, initial_run_state(s), *s.models, c.norm_set()).final_state;
  std::ostringstream mid_ck;
  write_checkpoint(mid, mid_ck);
  std::istringstream mid_in(mid_ck.str());
  const RunResult resumed = run(c.solver, read_checkpoint(mid_in), *s.models, c.norm_set());
  const RunState& r = resumed.final_state;
  o.require(bit_equal(r.u, end1.u) && r.t == end1.t && r.step_count == end1.step_count &&
                r.underflow == end1.underflow && r.overflow == end1.overflow,
            "resumed run matches uninterrupted run bit for bit");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"mass conservation", mass_conservation},
      {"positivity", positivity},
      {"constant-kernel number moment", constant_kernel},
      {"sigma-moment suite", sigma_suite},
      {"hyper-contractivity exponents", hypercontractivity},
      {"heat kernel Gaussian bound", green_bound},
      {"size monotonicity", size_monotonicity},
      {"certificate arithmetic", certificate},
      {"global boundedness", global_boundedness},
      {"Picard mode", picard_mode},
      {"scheme order", scheme_order},
      {"determinism and persistence", determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto& [name, check] = criteria[k];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += o.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", k + 1, name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
