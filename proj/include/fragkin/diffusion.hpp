#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "fragkin/grids.hpp"
#include "fragkin/rates.hpp"

namespace fragkin {

/// Real-to-complex FFT workspace for one periodic spatial grid.  Not safe
/// for concurrent use; make one per worker.
class SpectralHeat {
 public:
  explicit SpectralHeat(const SpaceGrid& grid);
  ~SpectralHeat();
  SpectralHeat(const SpectralHeat&) = delete;
  SpectralHeat& operator=(const SpectralHeat&) = delete;

  /// profile <- exp(-decay) * exp(alpha_t * Laplacian) profile, with the
  /// Laplacian symbol -|k|^2 on the discrete wavenumbers.
  void apply(std::span<double> profile, double alpha_t, double decay = 0.0);

  const SpaceGrid& grid() const noexcept { return grid_; }

 private:
  struct Impl;
  SpaceGrid grid_;
  std::unique_ptr<Impl> impl_;
};

/// Transform round-off bookkeeping of one apply.
struct ClampStats {
  std::size_t clamped = 0;
  /// Most negative entry before clamping, relative to max |u| over the whole field.
  double worst_relative = 0.0;
};

/// Exact per-size heat propagation over one step dt:
///   multiplier(xi_i, k) = exp(-alpha(xi_i) |k|^2 dt - loss * beta_env(xi_i) dt).
/// In splitting mode (loss = false) the k = 0 multiplier is exactly 1.
class DiffusionPropagator {
 public:
  DiffusionPropagator(std::shared_ptr<const SpaceGrid> space, std::shared_ptr<const SizeGrid> sizes,
                      const RateModel& rates, double dt, bool loss, unsigned threads = 1);
  ~DiffusionPropagator();
  DiffusionPropagator(DiffusionPropagator&&) noexcept;
  DiffusionPropagator& operator=(DiffusionPropagator&&) noexcept;

  double dt() const noexcept { return dt_; }
  bool loss_mode() const noexcept { return loss_; }
  /// Multiplier of size node i at axis wavenumber indices (kx, ky).
  double multiplier(std::size_t i, std::size_t kx, std::size_t ky = 0) const;

  /// Propagates u in place.  When u was physical, entries in
  /// [-1e-12 max|u|, 0) are clamped to 0 and counted; larger negatives are
  /// left in place for the caller to judge.
  ClampStats apply(Field& u) const;

  static constexpr double clamp_tolerance = 1e-12;

 private:
  std::shared_ptr<const SpaceGrid> space_;
  std::shared_ptr<const SizeGrid> sizes_;
  double dt_;
  bool loss_;
  unsigned threads_;
  std::vector<double> alpha_;
  std::vector<double> beta_;
  mutable std::vector<std::unique_ptr<SpectralHeat>> workers_;
};

}  // namespace fragkin
