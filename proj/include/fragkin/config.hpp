#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fragkin/diagnostics.hpp"
#include "fragkin/integrator.hpp"

namespace fragkin {

struct GridsConfig {
  int dim = 1;
  double length = 100.0;
  std::uint64_t n = 128;
  double xi_min = 1e-4;
  double xi_max = 100.0;
  std::uint64_t m = 256;
  bool operator==(const GridsConfig&) const = default;
};

struct RatesConfig {
  std::string mode = "power";  // power | constant | tabulated
  double theta_alpha = 0.2;
  double theta_beta = 0.5;
  double alpha_scale = 1.0;
  double beta_scale = 1.0;
  double c_alpha_lower = 1.0;
  double c_alpha_upper = 1.0;
  double c_beta_lower = 1.0;
  double c_beta_upper = 1.0;
  double alpha = 1.0;  // constant mode
  double beta = 1.0;   // constant mode
  std::string table;   // tabulated mode: lines "xi alpha beta_env"
  /// Spatial modulation amplitude a >= 0: beta = (1 + a (1 + cos(2 pi x/L))/2) beta_env, C_beta = 1 + a.
  double modulation = 0.0;
  bool operator==(const RatesConfig&) const = default;
};

struct FragKernelConfig {
  std::string family = "power";  // power | homogeneous | separable | tabulated | zero
  double nu = 0.0;
  std::string profile = "uniform";  // homogeneous/separable: uniform | power
  std::string table;
  bool operator==(const FragKernelConfig&) const = default;
};

struct CoagKernelConfig {
  std::string family = "zero";  // zero | constant | sum_power
  double kappa0 = 0.0;
  double exponent = 0.0;
  double c_kappa = 1.0;
  double rho = 0.5;
  bool operator==(const CoagKernelConfig&) const = default;
};

struct AnalysisConfig {
  double p = 4.0;
  double ell = 2.0;
  double delta = 0.5;
  std::string certificate = "required";  // required | advisory
  std::vector<NormSpec> norms;            // empty: default set
  std::vector<double> eta_samples;        // empty: default
  std::vector<double> ell_grid;           // empty: default
  double growth_tolerance = 0.05;
  bool operator==(const AnalysisConfig&) const = default;
};

struct InitialConfig {
  std::string preset = "gaussian";  // gaussian | homogeneous | random | zero | checkpoint
  double amplitude = 1.0;
  double width = 3.0;               // spatial standard deviation
  std::string size_profile = "exponential";  // exponential | lognormal | monodisperse
  double size_mean = 1.0;
  double size_width = 0.5;          // lognormal log-standard deviation
  std::string checkpoint;
  bool operator==(const InitialConfig&) const = default;
};

struct RunConfiguration {
  GridsConfig grids;
  RatesConfig rates;
  FragKernelConfig frag_kernel;
  CoagKernelConfig coag_kernel;
  SolverConfig solver;
  AnalysisConfig analysis;
  InitialConfig initial_condition;

  std::vector<NormSpec> norm_set() const;
  bool operator==(const RunConfiguration&) const = default;
};

/// Parses `[section]` headers and `key = value` lines ('#' and ';' start
/// comments).  Collects every problem and throws ConfigError with line
/// numbers; unknown sections and keys are errors.
RunConfiguration parse_config(const std::string& text);

/// Canonical text: every key of every section in a fixed order, numbers in
/// shortest round-trip form.  parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfiguration& config);

/// Hex SHA-256 of the canonical text.
std::string config_hash(const RunConfiguration& config);

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

}  // namespace fragkin
