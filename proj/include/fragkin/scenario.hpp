#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fragkin/certify.hpp"
#include "fragkin/config.hpp"
#include "fragkin/integrator.hpp"
#include "fragkin/moments.hpp"

namespace fragkin {

/// Everything a run needs, assembled from one configuration.
struct Scenario {
  RunConfiguration config;
  std::unique_ptr<Models> models;  // heap-held: steppers keep references into it
  MomentReport moments;
  CertificateReport certificate;
  std::vector<std::string> warnings;
};

RateModel build_rates(const RunConfiguration& config);
FragKernel build_frag_kernel(const RunConfiguration& config);
CoagKernel build_coag_kernel(const RunConfiguration& config);

/// Builds grids, rates, kernels and operators, the moment report and the certificate.
Scenario build_scenario(const RunConfiguration& config);

/// Initial state for the configured preset.  `seed` drives the random preset.
RunState initial_run_state(const Scenario& scenario, std::uint64_t seed = 0);

/// Named presets shipped with the library (also under presets/*.cfg).
const std::vector<std::string>& preset_names();
/// Configuration text of a preset; throws InvalidArgument for an unknown name.
const std::string& preset_text(const std::string& name);

}  // namespace fragkin
