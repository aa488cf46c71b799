#include "fragkin/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fragkin/checkpoint.hpp"
#include "fragkin/config.hpp"
#include "fragkin/errors.hpp"

namespace fragkin {

namespace {

constexpr double kNegativeTolerance = 1e-12;

double spatial_sum(const std::vector<double>& per_cell, double volume) {
  double s = 0.0;
  for (double v : per_cell) s += v;
  return s * volume;
}

// Smallest entry relative to the field scale; 0 for non-negative fields.
bool within_positivity(const Field& u, double scale) {
  const double floor = -kNegativeTolerance * scale;
  for (double v : u.values())
    if (v < floor) return false;
  return true;
}

std::size_t clamp_round_off(Field& u) {
  std::size_t n = 0;
  for (double& v : u.values())
    if (v < 0.0) {
      v = 0.0;
      ++n;
    }
  return n;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidArgument("t_end must be positive");
  if (!(safety > 0.0 && safety <= 1.0)) throw InvalidArgument("safety must lie in (0, 1]");
  if (output_every == 0) throw InvalidArgument("output_every must be >= 1");
  if (picard_nodes < 8) throw InvalidArgument("picard time quadrature needs at least 8 nodes");
  if (picard_kmax < 1) throw InvalidArgument("picard_kmax must be >= 1");
  if (!(picard_tol > 0.0)) throw InvalidArgument("picard_tol must be positive");
  if (!(blowup_factor > 1.0)) throw InvalidArgument("blow-up factor must exceed 1");
}

Models Models::build(std::shared_ptr<const SpaceGrid> space, std::shared_ptr<const SizeGrid> sizes, RateModel rates,
                     FragKernel frag_kernel, CoagKernel coag_kernel) {
  FragOperator frag = FragOperator::build(frag_kernel, rates, sizes);
  CoagOperator coag = CoagOperator::build(coag_kernel, sizes);
  return Models{std::move(space), std::move(sizes), std::move(rates), std::move(frag_kernel),
                std::move(coag_kernel), std::move(frag), std::move(coag)};
}

RunState initial_state(Field u) { return RunState{0.0, 0, std::move(u), 0.0, 0.0}; }

StrangStepper::StrangStepper(const Models& models, const SolverConfig& config)
    : models_(models),
      config_(config),
      k1_(models.space, models.sizes),
      k2_(models.space, models.sizes),
      u1_(models.space, models.sizes),
      d1_(models.space, models.sizes),
      d2_(models.space, models.sizes),
      tmp_(models.space, models.sizes) {}

const DiffusionPropagator& StrangStepper::propagator(double dt) {
  if (!half_ || half_->dt() != dt)
    half_.emplace(models_.space, models_.sizes, models_.rates, dt, false, config_.threads);
  return *half_;
}

void StrangStepper::evaluate(const Field& u, Field& rate, Field* loss, double& under, double& over) {
  const double vol = u.space().cell_volume();
  models_.frag.apply(u, rate, &cell_under_);
  models_.coag.apply(u, u, tmp_, &cell_over_, config_.threads);
  rate += tmp_;
  under = spatial_sum(cell_under_, vol);
  over = spatial_sum(cell_over_.mass, vol);
  if (loss) {
    models_.frag.loss_rates(u, *loss);
    models_.coag.loss_rates(u, tmp_);
    *loss += tmp_;
  }
}

std::size_t StrangStepper::diffuse(RunState& state, double dt) {
  const ClampStats st = propagator(dt).apply(state.u);
  if (st.worst_relative < -DiffusionPropagator::clamp_tolerance)
    throw NumericalFault("diffusion produced negative values beyond round-off (relative " +
                         format_double(st.worst_relative) + ") at step " + std::to_string(state.step_count));
  return st.clamped;
}

StepStats StrangStepper::react(RunState& state, double dt) {
  StepStats stats;
  Field& u = state.u;
  if (models_.frag.beta_max() == 0.0 && models_.coag.is_zero()) return stats;

  if (config_.positivity == PositivityPolicy::Patankar) {
    // Gains explicit, losses implicit: u+ = (u + h P) / (1 + h d), then the
    // averaged second stage.  Positive for any h.
    double under1 = 0, over1 = 0, under2 = 0, over2 = 0;
    evaluate(u, k1_, &d1_, under1, over1);
    auto p1 = k1_.values();
    const auto d1 = d1_.values();
    const auto u0 = u.values();
    auto us = u1_.values();
    for (std::size_t k = 0; k < us.size(); ++k) {
      p1[k] = std::max(p1[k] + d1[k] * u0[k], 0.0);
      us[k] = (u0[k] + dt * p1[k]) / (1.0 + dt * d1[k]);
    }
    evaluate(u1_, k2_, &d2_, under2, over2);
    auto p2 = k2_.values();
    const auto d2 = d2_.values();
    for (std::size_t k = 0; k < us.size(); ++k) {
      p2[k] = std::max(p2[k] + d2[k] * us[k], 0.0);
      u.values()[k] = (u0[k] + 0.5 * dt * (p1[k] + p2[k])) / (1.0 + 0.5 * dt * (d1[k] + d2[k]));
    }
    state.underflow += 0.5 * dt * (under1 + under2);
    state.overflow += 0.5 * dt * (over1 + over2);
    stats.substeps = 1;
    return stats;
  }

  const double rate = models_.frag.beta_max() + models_.coag.max_loss_rate(u);
  std::uint64_t remaining = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(dt * rate / config_.safety)));
  double h = dt / static_cast<double>(remaining);
  while (remaining > 0) {
    const double scale = u.max_abs();
    double under1 = 0, over1 = 0, under2 = 0, over2 = 0;
    evaluate(u, k1_, nullptr, under1, over1);
    std::copy(u.values().begin(), u.values().end(), u1_.values().begin());
    u1_.axpy(h, k1_);
    bool ok = within_positivity(u1_, scale);
    if (ok) {
      evaluate(u1_, k2_, nullptr, under2, over2);
      // u+ = u/2 + (u1 + h k2)/2, staged in u1_
      u1_.axpy(h, k2_);
      auto dst = u1_.values();
      const auto src = u.values();
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = 0.5 * src[k] + 0.5 * dst[k];
      ok = within_positivity(u1_, scale);
    }
    if (!ok) {
      if (++stats.rejections > static_cast<std::size_t>(config_.max_rejections))
        throw NumericalFault("positivity-limited stagnation at step " + std::to_string(state.step_count));
      remaining *= 2;
      h *= 0.5;
      continue;
    }
    std::copy(u1_.values().begin(), u1_.values().end(), u.values().begin());
    stats.clamped += clamp_round_off(u);
    state.underflow += 0.5 * h * (under1 + under2);
    state.overflow += 0.5 * h * (over1 + over2);
    --remaining;
    ++stats.substeps;
  }
  return stats;
}

StepStats StrangStepper::step(RunState& state, double dt) {
  std::size_t clamped = diffuse(state, 0.5 * dt);
  StepStats st = react(state, dt);
  clamped += diffuse(state, 0.5 * dt);
  st.clamped += clamped;
  ++state.step_count;
  state.t = static_cast<double>(state.step_count) * dt;
  return st;
}

RunResult run(const SolverConfig& config, RunState state, const Models& models,
              const std::vector<NormSpec>& norm_set, const SampleHook& hook) {
  config.validate();
  if (!(state.u.space() == *models.space) || !(state.u.sizes() == *models.sizes))
    throw InvalidArgument("initial field does not match the model grids");
  if (!state.u.all_finite()) throw NumericalFault("initial field contains non-finite values");

  const auto total_steps = static_cast<std::uint64_t>(std::llround(config.t_end / config.dt));
  if (total_steps == 0) throw InvalidArgument("t_end is shorter than one step");

  RunResult result{DiagnosticsSeries{}, state, false, {}, 0, 0};
  DiagnosticsSeries& series = result.series;
  series.norm_set = norm_set;
  auto take_sample = [&](const RunState& s) {
    sample(series, s, models.rates);
    if (hook) hook(series, s);
  };
  take_sample(state);

  std::vector<double> reference;
  for (const auto& n : norm_set) reference.push_back(series.norms.at(n.key()).front());

  StrangStepper stepper(models, config);
  while (state.step_count < total_steps) {
    const StepStats st = stepper.step(state, config.dt);
    result.rejections += st.rejections;
    result.clamped += st.clamped;
    if (!state.u.all_finite())
      throw NumericalFault("non-finite value at step " + std::to_string(state.step_count));

    bool blown = false;
    for (std::size_t k = 0; k < norm_set.size() && !blown; ++k) {
      const auto& n = norm_set[k];
      const double v = weighted_seminorm(state.u, n.p, n.ell, n.s, models.rates);
      if (reference[k] > 0.0 && v > config.blowup_factor * reference[k]) blown = true;
    }
    const bool last = state.step_count == total_steps;
    if (blown || last || state.step_count % config.output_every == 0) take_sample(state);
    if (!config.checkpoint_path.empty() && config.checkpoint_every > 0 &&
        state.step_count % config.checkpoint_every == 0)
      write_checkpoint(state, config.checkpoint_path);
    if (blown) {
      result.blow_up = true;
      series.aborted = true;
      series.abort_time = state.t;
      result.message = "tracked norm exceeded " + std::to_string(config.blowup_factor) + " x initial at t=" +
                       std::to_string(state.t);
      break;
    }
  }
  if (!config.checkpoint_path.empty()) write_checkpoint(state, config.checkpoint_path);
  result.final_state = std::move(state);
  return result;
}

}  // namespace fragkin
