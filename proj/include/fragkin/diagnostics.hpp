#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fragkin/grids.hpp"
#include "fragkin/rates.hpp"

namespace fragkin {

class CoagOperator;

/// One tracked weighted norm ||u||_{X^p_{ell,s}}.
struct NormSpec {
  double p = 1.0;
  double ell = 0.0;
  double s = 0.0;
  /// Stable text key, e.g. "p=4,l=2,s=0.25".
  std::string key() const;
  bool operator==(const NormSpec&) const = default;
};

/// Default set: (1,0,0), (1,1,0), (1,ell,0), (p,ell,0), (p,ell,rho), duplicates removed.
std::vector<NormSpec> default_norm_set(double p, double ell, double rho);

struct RunState;

/// Time series of the quantities sampled along a run.
struct DiagnosticsSeries {
  std::vector<NormSpec> norm_set;
  std::vector<double> times;
  std::vector<std::uint64_t> steps;
  std::vector<double> mass;    // X^1 with weight xi
  std::vector<double> number;  // X^1 with weight 1
  std::map<std::string, std::vector<double>> norms;
  std::vector<double> positivity_min;
  std::vector<double> underflow;
  std::vector<double> overflow;

  bool aborted = false;
  std::optional<double> abort_time;

  std::size_t size() const noexcept { return times.size(); }
  /// mass + underflow + overflow at sample k.
  double accounted_mass(std::size_t k) const { return mass.at(k) + underflow.at(k) + overflow.at(k); }
  const std::vector<double>& norm(const NormSpec& n) const { return norms.at(n.key()); }
};

/// Appends one entry computed from `state`.  Throws if time does not increase.
void sample(DiagnosticsSeries& series, const RunState& state, const RateModel& rates);

/// Least-squares rate r of log(y) ~ c + r t over the final two-thirds of the
/// samples (at least 2 points).  Returns 0 for an all-zero series.
double fit_exponential_rate(const std::vector<double>& t, const std::vector<double>& y);

/// Smallest omega with log(y(t)/y(0)) <= omega t at every sample t > 0.
double moment_growth_omega(const std::vector<double>& t, const std::vector<double>& y);

enum class Verdict { BoundedTrend, Growing, BlowUpAbort };
const char* to_string(Verdict v) noexcept;

struct NormVerdict {
  std::string key;
  double initial = 0.0;
  double max_ratio = 0.0;
  double rate = 0.0;
  Verdict verdict = Verdict::BoundedTrend;
};

struct GlobalReport {
  std::vector<NormVerdict> norms;
  /// omega of the exponential first-moment bound for X^1_1, when tracked.
  std::optional<double> omega;
  /// Global-boundedness certificate status when known.
  std::optional<bool> certificate_pass;
  std::string summary;
  const NormVerdict* find(const NormSpec& n) const;
};

/// A norm is a bounded trend when its fitted rate over the final two-thirds
/// stays at or below `growth_tolerance` (per unit time); aborted runs are
/// blow-up-abort throughout.
GlobalReport boundedness_report(const DiagnosticsSeries& series, std::optional<bool> certificate_pass,
                                double growth_tolerance = 0.05);

/// Checks ||u||_{X^2} <= ||u||_{X^1}^{1-p'/2} ||u||_{X^p}^{p'/2} for the
/// weight `weight`; returns the relative excess of the left side (<= 0 when it holds).
double interpolation_excess(const Field& u, double p, const SizeWeight& weight);

/// Both sides of the coagulation estimate
///   ||C(u,u)||_{X^p_ell} <= (c_kappa/2)(1+2^ell) [ ||u||_{X^{2p}_{ell,rho}} ||u||_{X^{2p}}
///     + ||u||_{X^{2p}} ||u||_{X^{2p}_{ell,rho}} + ||u||_{X^{2p}_ell} ||u||_{X^{2p}_{0,rho}}
///     + ||u||_{X^{2p}_{0,rho}} ||u||_{X^{2p}_ell} ]
/// i.e. the four-product bound with every Hoelder pair (q, q') = (2, 2).
struct CoagBound {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds() const noexcept { return lhs <= rhs * (1.0 + 1e-10); }
};
CoagBound coagulation_bound(const Field& u, const CoagOperator& op, const RateModel& rates, double c_kappa,
                            double rho, double p, double ell);

}  // namespace fragkin
