#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "fragkin/coag_kernel.hpp"
#include "fragkin/coagulation.hpp"
#include "fragkin/diagnostics.hpp"
#include "fragkin/diffusion.hpp"
#include "fragkin/frag_kernel.hpp"
#include "fragkin/fragmentation.hpp"
#include "fragkin/grids.hpp"
#include "fragkin/rates.hpp"

namespace fragkin {

enum class PositivityPolicy { Guard, Patankar };
enum class SolverMode { Strang, Picard };

struct SolverConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  double safety = 0.9;
  SolverMode mode = SolverMode::Strang;
  int picard_kmax = 12;
  double picard_tol = 1e-10;
  int picard_nodes = 16;
  PositivityPolicy positivity = PositivityPolicy::Guard;
  std::uint64_t output_every = 10;
  /// Steps between checkpoints; 0 writes only the final one (when a path is set).
  std::uint64_t checkpoint_every = 0;
  std::string checkpoint_path;
  unsigned threads = 1;
  double blowup_factor = 1e12;
  int max_rejections = 20;

  /// Throws InvalidArgument on dt <= 0, t_end <= 0 or safety outside (0, 1].
  void validate() const;
  bool operator==(const SolverConfig&) const = default;
};

/// Rates, kernels and the operators built from them on one pair of grids.
struct Models {
  std::shared_ptr<const SpaceGrid> space;
  std::shared_ptr<const SizeGrid> sizes;
  RateModel rates;
  FragKernel frag_kernel;
  CoagKernel coag_kernel;
  FragOperator frag;
  CoagOperator coag;

  static Models build(std::shared_ptr<const SpaceGrid> space, std::shared_ptr<const SizeGrid> sizes,
                      RateModel rates, FragKernel frag_kernel, CoagKernel coag_kernel);
};

struct RunState {
  double t = 0.0;
  std::uint64_t step_count = 0;
  Field u;
  /// Mass routed below xi_min and above xi_max so far.
  double underflow = 0.0;
  double overflow = 0.0;

  double accounted_mass() const { return total_mass(u) + underflow + overflow; }
};

RunState initial_state(Field u);

struct StepStats {
  std::size_t substeps = 0;
  std::size_t rejections = 0;
  std::size_t clamped = 0;
};

/// Strang step D(dt/2) R(dt) D(dt/2): D is exact diffusion with the k = 0
/// mode untouched, R integrates Bu + C(u,u) by two-stage SSP Runge-Kutta
/// substeps (or the Patankar variant) that respect the positivity bound.
class StrangStepper {
 public:
  StrangStepper(const Models& models, const SolverConfig& config);

  /// Advances by dt; time becomes step_count * dt so resumed runs see the same clock.
  StepStats step(RunState& state, double dt);
  /// Reaction stage only: u <- R(dt) u, ledgers updated.
  StepStats react(RunState& state, double dt);
  /// Diffusion stage only.
  std::size_t diffuse(RunState& state, double dt);

 private:
  void evaluate(const Field& u, Field& rate, Field* loss, double& under, double& over);
  const DiffusionPropagator& propagator(double dt);

  const Models& models_;
  SolverConfig config_;
  std::optional<DiffusionPropagator> half_;
  Field k1_, k2_, u1_, d1_, d2_, tmp_;
  std::vector<double> cell_under_;
  OverflowRates cell_over_;
};

struct RunResult {
  DiagnosticsSeries series;
  RunState final_state;
  bool blow_up = false;
  std::string message;
  std::size_t rejections = 0;
  std::size_t clamped = 0;
};

/// Called after every diagnostics sample (for streaming output).
using SampleHook = std::function<void(const DiagnosticsSeries&, const RunState&)>;

/// Advances `state` to t_end in steps of dt, sampling every `output_every`
/// steps and at the end.  Stops early with blow_up set when a tracked norm
/// exceeds blowup_factor times its first sample.  NaN raises NumericalFault.
RunResult run(const SolverConfig& config, RunState state, const Models& models,
              const std::vector<NormSpec>& norm_set, const SampleHook& hook = {});

}  // namespace fragkin
