// fragkin command-line front end: certify, run, probe, picard, report.

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fragkin/checkpoint.hpp"
#include "fragkin/errors.hpp"
#include "fragkin/picard.hpp"
#include "fragkin/probes.hpp"
#include "fragkin/scenario.hpp"
#include "fragkin/series_io.hpp"

using namespace fragkin;
using ordered = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kCertificate = 3, kBlowUp = 4, kNumerical = 5 };

struct Common {
  std::string config_path;
  std::string preset;
  std::string out_path;
  unsigned threads = 1;
  std::uint64_t seed = 0;
};

RunConfiguration load_config(const Common& c) {
  if (!c.config_path.empty() && !c.preset.empty()) throw InvalidArgument("give either --config or --preset, not both");
  if (!c.preset.empty()) return parse_config(preset_text(c.preset));
  if (c.config_path.empty()) throw InvalidArgument("a configuration is required (--config PATH or --preset NAME)");
  std::ifstream in(c.config_path);
  if (!in) throw InvalidArgument("cannot open configuration '" + c.config_path + "'");
  std::stringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

// Writes to --out when given, else stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw InvalidArgument("cannot open output '" + path + "'");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

ordered certificate_json(const CertificateReport& r) {
  ordered j;
  j["pass"] = r.pass();
  ordered clauses = ordered::array();
  for (const auto& c : r.clauses) {
    ordered cj;
    cj["id"] = c.id;
    cj["status"] = to_string(c.status);
    cj["statement"] = c.statement;
    ordered values = ordered::object();
    for (const auto& [name, v] : c.values) values[name] = v;
    cj["values"] = values;
    if (!c.detail.empty()) cj["detail"] = c.detail;
    clauses.push_back(cj);
  }
  j["clauses"] = clauses;
  j["warnings"] = r.warnings;
  return j;
}

void print_warnings(const Scenario& s) {
  for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& w : s.certificate.warnings) std::cerr << "warning: " << w << '\n';
}

// Returns kCertificate when a required certificate fails and was not overridden.
int gate_certificate(const Scenario& s, bool override_certificate) {
  if (s.certificate.pass()) return kOk;
  std::string ids;
  for (const auto& id : s.certificate.failed_ids()) ids += " " + id;
  if (s.config.analysis.certificate == "advisory") {
    std::cerr << "certificate FAIL (advisory):" << ids << '\n';
    return kOk;
  }
  if (override_certificate) {
    std::cerr << "certificate FAIL overridden:" << ids << '\n';
    return kOk;
  }
  std::cerr << "certificate FAIL:" << ids << " (use --override-certificate to run anyway)\n";
  return kCertificate;
}

std::vector<double> log_grid(double a, double b, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
  return t;
}

ordered slope_json(const SlopeReport& r) {
  ordered j;
  j["t"] = r.t;
  j["ratio"] = r.ratio;
  j["slope"] = r.slope;
  j["target"] = r.target;
  j["intercept"] = r.intercept;
  j["residual"] = r.residual;
  return j;
}

int cmd_certify(const Common& c) {
  const Scenario s = build_scenario(load_config(c));
  print_warnings(s);
  Sink sink(c.out_path);
  sink.stream() << certificate_json(s.certificate).dump(2) << '\n';
  return s.certificate.pass() ? kOk : kCertificate;
}

int cmd_run(const Common& c, bool override_certificate, bool csv) {
  RunConfiguration cfg = load_config(c);
  const Scenario s = build_scenario(cfg);
  print_warnings(s);
  if (const int gate = gate_certificate(s, override_certificate); gate != kOk) return gate;

  SolverConfig solver = cfg.solver;
  solver.threads = c.threads;
  RunState state = initial_run_state(s, c.seed);
  const auto norm_set = cfg.norm_set();
  Sink sink(c.out_path);
  std::ostream& out = sink.stream();

  if (!csv) write_series_header(out, cfg, norm_set);
  SampleHook hook;
  if (!csv) hook = [&](const DiagnosticsSeries& series, const RunState&) { write_series_record(out, series, series.size() - 1); };
  const RunResult result = run(solver, std::move(state), *s.models, norm_set, hook);
  if (csv) emit_series_csv(out, result.series);
  else write_series_abort(out, result.series);
  out.flush();

  std::cerr << "steps " << result.final_state.step_count << ", t " << result.final_state.t << ", rejections "
            << result.rejections << ", clamped " << result.clamped << '\n';
  if (result.blow_up) {
    std::cerr << "blow-up abort: " << result.message << '\n';
    return kBlowUp;
  }
  return kOk;
}

int cmd_probe(const Common& c, const std::string& kind, double alpha, double beta, double p, double q, double t,
              double width) {
  const RunConfiguration cfg = load_config(c);
  const Scenario s = build_scenario(cfg);
  const SpaceGrid& grid = *s.models->space;
  ordered j;
  j["kind"] = kind;
  if (kind == "green") {
    ordered rows = ordered::array();
    for (double tt : log_grid(1e-3, 1e-2, 6)) {
      const BoundReport r = green_bound_check(alpha, tt, grid);
      rows.push_back({{"t", r.t}, {"peak", r.peak}, {"mass", r.mass}, {"min_relative", r.min_relative},
                      {"nonnegative", r.nonnegative}, {"constant", r.constant}});
    }
    j["alpha"] = alpha;
    j["rows"] = rows;
  } else if (kind == "hyper") {
    std::vector<double> u0(grid.num_cells(), 0.0);
    u0[grid.flat(grid.points_per_axis() / 2, grid.dim() == 2 ? grid.points_per_axis() / 2 : 0)] =
        1.0 / grid.cell_volume();
    j["report"] = slope_json(hypercontractivity_scalar(u0, grid, alpha, beta, p, q, log_grid(1e-3, 1e-2, 8)));
  } else if (kind == "hyper-vector") {
    j["report"] = slope_json(hypercontractivity_vector(grid, s.models->rates, *s.models->sizes, p, q,
                                                       log_grid(1e-3, 1e-2, 8)));
  } else if (kind == "monotone") {
    const SizeGrid& sg = *s.models->sizes;
    std::vector<std::pair<double, double>> pairs;
    const std::size_t m = sg.size();
    for (std::size_t k = 0; k < 5; ++k) pairs.emplace_back(sg.node(k * m / 6), sg.node((k + 1) * m / 6));
    const MonotonicityReport r = size_monotonicity_check(gaussian_profile(grid, width), grid, s.models->rates, t, pairs);
    j["pass"] = r.pass;
    j["worst_excess"] = r.worst_excess;
    j["worst_pair"] = {r.worst_pair.first, r.worst_pair.second};
    j["pairs_checked"] = r.pairs_checked;
  } else {
    throw InvalidArgument("unknown probe kind '" + kind + "' (green, hyper, hyper-vector, monotone)");
  }
  Sink sink(c.out_path);
  sink.stream() << j.dump(2) << '\n';
  return kOk;
}

int cmd_picard(const Common& c, double T, bool override_certificate) {
  const RunConfiguration cfg = load_config(c);
  const Scenario s = build_scenario(cfg);
  print_warnings(s);
  if (const int gate = gate_certificate(s, override_certificate); gate != kOk) return gate;
  SolverConfig solver = cfg.solver;
  solver.threads = c.threads;
  if (!(T > 0.0)) T = solver.t_end;
  const RunState state = initial_run_state(s, c.seed);
  const PicardReport r = picard_solve(state.u, T, solver, *s.models, cfg.analysis.p, cfg.analysis.ell);
  ordered j;
  j["T"] = r.T;
  j["nodes"] = r.nodes;
  j["distances"] = r.distances;
  j["ratios"] = r.ratios;
  j["converged"] = r.converged;
  j["substeps"] = r.substeps;
  j["propagator_error"] = r.propagator_error;
  j["final_mass"] = total_mass(r.trajectory.back());
  Sink sink(c.out_path);
  sink.stream() << j.dump(2) << '\n';
  return kOk;
}

int cmd_report(const Common& c, const std::string& series_path) {
  std::ifstream in(series_path);
  if (!in) throw InvalidArgument("cannot open series '" + series_path + "'");
  const StoredSeries stored = read_series(in);
  std::optional<bool> cert;
  try {
    cert = build_scenario(stored.config).certificate.pass();
  } catch (const Error& e) {
    std::cerr << "warning: certificate unavailable: " << e.what() << '\n';
  }
  const GlobalReport r = boundedness_report(stored.series, cert, stored.config.analysis.growth_tolerance);
  ordered j;
  j["config_hash"] = stored.config_hash;
  j["summary"] = r.summary;
  if (r.omega) j["omega"] = *r.omega;
  ordered norms = ordered::array();
  for (const auto& n : r.norms)
    norms.push_back({{"norm", n.key}, {"initial", n.initial}, {"max_ratio", n.max_ratio}, {"rate", n.rate},
                     {"verdict", to_string(n.verdict)}});
  j["norms"] = norms;
  Sink sink(c.out_path);
  sink.stream() << j.dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fragkin: coagulation-fragmentation-diffusion solver and hypothesis checker"};
  app.require_subcommand(1);
  Common common;
  bool override_certificate = false;
  bool csv = false;
  std::string kind = "green";
  double alpha = 1.0, beta = 0.0, p = 1.0, q = std::numeric_limits<double>::infinity(), t = 0.05, width = 3.0;
  double T = 0.0;
  std::string series_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "configuration file");
    sub->add_option("--preset", common.preset, "built-in preset name");
    sub->add_option("--out", common.out_path, "output file (default stdout)");
    sub->add_option("--threads", common.threads, "worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_option("--seed", common.seed, "seed for randomized initial data");
  };
  auto* certify = app.add_subcommand("certify", "check the rate and kernel hypotheses");
  add_common(certify);
  auto* runc = app.add_subcommand("run", "integrate and stream diagnostics as NDJSON");
  add_common(runc);
  runc->add_flag("--override-certificate", override_certificate, "run despite a failed certificate");
  runc->add_flag("--csv", csv, "write flat CSV instead of NDJSON");
  auto* probe = app.add_subcommand("probe", "diffusion probes");
  add_common(probe);
  probe->add_option("--kind", kind, "green | hyper | hyper-vector | monotone");
  probe->add_option("--alpha", alpha, "diffusion rate for scalar probes");
  probe->add_option("--beta", beta, "loss rate for the scalar hyper-contractivity probe");
  probe->add_option("-p", p, "source exponent");
  probe->add_option("-q", q, "target exponent (inf allowed)");
  probe->add_option("--time", t, "time for the monotonicity probe");
  probe->add_option("--width", width, "Gaussian width for the monotonicity probe");
  auto* picard = app.add_subcommand("picard", "fixed-point iteration of the mild formulation");
  add_common(picard);
  picard->add_option("--horizon", T, "time horizon T (default t_end)");
  picard->add_flag("--override-certificate", override_certificate, "run despite a failed certificate");
  auto* report = app.add_subcommand("report", "boundedness verdicts from a stored series");
  add_common(report);
  report->add_option("--series", series_path, "NDJSON series written by run")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*certify) return cmd_certify(common);
    if (*runc) return cmd_run(common, override_certificate, csv);
    if (*probe) return cmd_probe(common, kind, alpha, beta, p, q, t, width);
    if (*picard) return cmd_picard(common, T, override_certificate);
    if (*report) return cmd_report(common, series_path);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kConfig;
  } catch (const NumericalFault& e) {
    std::cerr << "numerical fault: " << e.what() << '\n';
    return kNumerical;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const CorruptionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
