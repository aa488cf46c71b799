#include "fragkin/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "fragkin/coagulation.hpp"
#include "fragkin/errors.hpp"
#include "fragkin/integrator.hpp"

namespace fragkin {

namespace {

std::string short_number(double v) {
  if (std::isinf(v)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::string NormSpec::key() const {
  return "p=" + short_number(p) + ",l=" + short_number(ell) + ",s=" + short_number(s);
}

std::vector<NormSpec> default_norm_set(double p, double ell, double rho) {
  std::vector<NormSpec> out;
  for (NormSpec n : {NormSpec{1, 0, 0}, NormSpec{1, 1, 0}, NormSpec{1, ell, 0}, NormSpec{p, ell, 0},
                     NormSpec{p, ell, rho}})
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  return out;
}

void sample(DiagnosticsSeries& series, const RunState& state, const RateModel& rates) {
  if (!series.times.empty() && !(state.t > series.times.back()))
    throw InvalidArgument("diagnostics times must increase strictly");
  series.times.push_back(state.t);
  series.steps.push_back(state.step_count);
  series.mass.push_back(total_mass(state.u));
  series.number.push_back(total_number(state.u));
  for (const auto& n : series.norm_set)
    series.norms[n.key()].push_back(weighted_seminorm(state.u, n.p, n.ell, n.s, rates));
  series.positivity_min.push_back(state.u.min());
  series.underflow.push_back(state.underflow);
  series.overflow.push_back(state.overflow);
}

double fit_exponential_rate(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size()) throw InvalidArgument("series lengths differ");
  if (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; })) return 0.0;
  const std::size_t first = t.size() / 3;
  if (t.size() - first < 2) throw InvalidArgument("too few samples for a rate fit");
  double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t k = first; k < t.size(); ++k) {
    if (!(y[k] > 0.0)) throw InvalidArgument("rate fit needs positive values");
    const double ly = std::log(y[k]);
    n += 1;
    st += t[k];
    sy += ly;
    stt += t[k] * t[k];
    sty += t[k] * ly;
  }
  const double denom = n * stt - st * st;
  if (!(denom > 0.0)) throw InvalidArgument("rate fit needs distinct times");
  return (n * sty - st * sy) / denom;
}

double moment_growth_omega(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.empty()) throw InvalidArgument("series lengths differ or are empty");
  if (!(y.front() > 0.0)) return 0.0;
  double omega = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double dt = t[k] - t.front();
    if (!(dt > 0.0)) continue;
    omega = std::max(omega, std::log(y[k] / y.front()) / dt);
  }
  return std::isfinite(omega) ? omega : 0.0;
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::BoundedTrend: return "bounded-trend";
    case Verdict::Growing: return "growing";
    case Verdict::BlowUpAbort: return "blow-up-abort";
  }
  return "?";
}

const NormVerdict* GlobalReport::find(const NormSpec& n) const {
  const std::string k = n.key();
  for (const auto& v : norms)
    if (v.key == k) return &v;
  return nullptr;
}

GlobalReport boundedness_report(const DiagnosticsSeries& series, std::optional<bool> certificate_pass,
                                double growth_tolerance) {
  GlobalReport rep;
  rep.certificate_pass = certificate_pass;
  for (const auto& n : series.norm_set) {
    const auto& y = series.norm(n);
    NormVerdict v;
    v.key = n.key();
    v.initial = y.empty() ? 0.0 : y.front();
    double peak = 0.0;
    for (double x : y) peak = std::max(peak, x);
    v.max_ratio = v.initial > 0.0 ? peak / v.initial : 0.0;
    v.rate = series.size() >= 3 ? fit_exponential_rate(series.times, y) : 0.0;
    if (series.aborted)
      v.verdict = Verdict::BlowUpAbort;
    else
      v.verdict = v.rate <= growth_tolerance ? Verdict::BoundedTrend : Verdict::Growing;
    rep.norms.push_back(v);
  }
  const NormSpec first_moment{1, 1, 0};
  if (series.norms.count(first_moment.key()) && series.size() >= 2)
    rep.omega = moment_growth_omega(series.times, series.norm(first_moment));

  const bool all_bounded = std::all_of(rep.norms.begin(), rep.norms.end(),
                                       [](const NormVerdict& v) { return v.verdict == Verdict::BoundedTrend; });
  std::string outcome = series.aborted ? "blow-up-abort" : (all_bounded ? "bounded" : "growing");
  if (series.aborted && series.abort_time) outcome += " at t=" + short_number(*series.abort_time);
  if (!certificate_pass)
    rep.summary = "condition not evaluated + " + outcome;
  else
    rep.summary = std::string("condition ") + (*certificate_pass ? "PASS" : "FAIL") + " + " + outcome;
  return rep;
}

double interpolation_excess(const Field& u, double p, const SizeWeight& weight) {
  if (!(p >= 2.0)) throw InvalidArgument("interpolation check needs p >= 2");
  const double x1 = weighted_norm(u, 1.0, weight);
  const double x2 = weighted_norm(u, 2.0, weight);
  const double xp = weighted_norm(u, p, weight);
  const double pc = std::isinf(p) ? 1.0 : p / (p - 1.0);
  const double rhs = std::pow(x1, 1.0 - 0.5 * pc) * std::pow(xp, 0.5 * pc);
  if (rhs == 0.0) return x2 == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return x2 / rhs - 1.0;
}

CoagBound coagulation_bound(const Field& u, const CoagOperator& op, const RateModel& rates, double c_kappa,
                            double rho, double p, double ell) {
  if (!(p >= 1.0) || std::isinf(p)) throw InvalidArgument("coagulation bound needs finite p >= 1");
  const Field c = op.apply(u, u);
  CoagBound b;
  b.lhs = weighted_seminorm(c, p, ell, 0.0, rates);
  const double q = 2.0 * p;
  const double plain = weighted_seminorm(u, q, 0.0, 0.0, rates);
  const double ell_rho = weighted_seminorm(u, q, ell, rho, rates);
  const double ell_only = weighted_seminorm(u, q, ell, 0.0, rates);
  const double zero_rho = weighted_seminorm(u, q, 0.0, rho, rates);
  b.rhs = 0.5 * c_kappa * (1.0 + std::pow(2.0, ell)) * 2.0 * (ell_rho * plain + ell_only * zero_rho);
  return b;
}

}  // namespace fragkin
