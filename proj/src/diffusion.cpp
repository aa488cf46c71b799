#include "fragkin/diffusion.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "fragkin/errors.hpp"
#include "fragkin/parallel.hpp"

namespace fragkin {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct SpectralHeat::Impl {
  std::size_t n = 0;
  int dim = 1;
  std::size_t real_size = 0;
  std::size_t half = 0;  // last-axis complex length n/2 + 1
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::vector<double> k2;  // squared wavenumber per axis index

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    fftw_free(real);
    fftw_free(spec);
  }
};

SpectralHeat::SpectralHeat(const SpaceGrid& grid) : grid_(grid), impl_(std::make_unique<Impl>()) {
  auto& im = *impl_;
  im.n = grid.points_per_axis();
  im.dim = grid.dim();
  im.real_size = grid.num_cells();
  im.half = im.n / 2 + 1;
  const std::size_t spec_size = im.dim == 1 ? im.half : im.n * im.half;
  im.real = fftw_alloc_real(im.real_size);
  im.spec = fftw_alloc_complex(spec_size);
  if (!im.real || !im.spec) throw std::bad_alloc();
  const int n = static_cast<int>(im.n);
  {
    std::lock_guard lock(planner_mutex());
    if (im.dim == 1) {
      im.forward = fftw_plan_dft_r2c_1d(n, im.real, im.spec, FFTW_ESTIMATE);
      im.backward = fftw_plan_dft_c2r_1d(n, im.spec, im.real, FFTW_ESTIMATE);
    } else {
      im.forward = fftw_plan_dft_r2c_2d(n, n, im.real, im.spec, FFTW_ESTIMATE);
      im.backward = fftw_plan_dft_c2r_2d(n, n, im.spec, im.real, FFTW_ESTIMATE);
    }
  }
  if (!im.forward || !im.backward) throw NumericalFault("FFT planning failed");
  im.k2.resize(im.n);
  for (std::size_t k = 0; k < im.n; ++k) {
    const double w = grid.wavenumber(k);
    im.k2[k] = w * w;
  }
}

SpectralHeat::~SpectralHeat() = default;

void SpectralHeat::apply(std::span<double> profile, double alpha_t, double decay) {
  auto& im = *impl_;
  if (profile.size() != im.real_size) throw InvalidArgument("profile size does not match the spatial grid");
  if (!(alpha_t >= 0.0) || !(decay >= 0.0)) throw InvalidArgument("heat propagation needs alpha*t >= 0 and decay >= 0");
  std::copy(profile.begin(), profile.end(), im.real);
  fftw_execute(im.forward);
  const double scale = std::exp(-decay) / static_cast<double>(im.real_size);
  if (im.dim == 1) {
    for (std::size_t k = 0; k < im.half; ++k) {
      const double f = std::exp(-alpha_t * im.k2[k]) * scale;
      im.spec[k][0] *= f;
      im.spec[k][1] *= f;
    }
  } else {
    for (std::size_t kx = 0; kx < im.n; ++kx) {
      for (std::size_t ky = 0; ky < im.half; ++ky) {
        const double f = std::exp(-alpha_t * (im.k2[kx] + im.k2[ky])) * scale;
        auto& c = im.spec[kx * im.half + ky];
        c[0] *= f;
        c[1] *= f;
      }
    }
  }
  fftw_execute(im.backward);
  std::copy(im.real, im.real + im.real_size, profile.begin());
}

DiffusionPropagator::DiffusionPropagator(std::shared_ptr<const SpaceGrid> space, std::shared_ptr<const SizeGrid> sizes,
                                         const RateModel& rates, double dt, bool loss, unsigned threads)
    : space_(std::move(space)), sizes_(std::move(sizes)), dt_(dt), loss_(loss), threads_(std::max(threads, 1u)) {
  if (!space_ || !sizes_) throw InvalidArgument("diffusion propagator needs both grids");
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw InvalidArgument("diffusion step must be finite and >= 0");
  for (double xi : sizes_->nodes()) {
    const double a = rates.alpha(xi);
    const double b = rates.beta_envelope(xi);
    if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidArgument("diffusion rate must be finite and >= 0");
    if (loss && (!(b >= 0.0) || !std::isfinite(b))) throw InvalidArgument("loss rate must be finite and >= 0");
    alpha_.push_back(a);
    beta_.push_back(b);
  }
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads_, sizes_->size()));
  for (unsigned w = 0; w < workers; ++w) workers_.push_back(std::make_unique<SpectralHeat>(*space_));
}

DiffusionPropagator::~DiffusionPropagator() = default;
DiffusionPropagator::DiffusionPropagator(DiffusionPropagator&&) noexcept = default;
DiffusionPropagator& DiffusionPropagator::operator=(DiffusionPropagator&&) noexcept = default;

double DiffusionPropagator::multiplier(std::size_t i, std::size_t kx, std::size_t ky) const {
  const double wx = space_->wavenumber(kx);
  const double wy = space_->dim() == 2 ? space_->wavenumber(ky) : 0.0;
  return std::exp(-alpha_.at(i) * (wx * wx + wy * wy) * dt_ - (loss_ ? beta_.at(i) * dt_ : 0.0));
}

ClampStats DiffusionPropagator::apply(Field& u) const {
  if (!(u.space() == *space_) || !(u.sizes() == *sizes_))
    throw InvalidArgument("diffusion: field grids do not match the propagator");
  const std::size_t m = u.num_sizes();
  const std::size_t cells = u.num_cells();
  const bool physical = u.is_physical();
  const double scale = u.max_abs();
  std::vector<ClampStats> stats(workers_.size());

  parallel_for(m, static_cast<unsigned>(workers_.size()), [&](std::size_t begin, std::size_t end, unsigned w) {
    SpectralHeat& heat = *workers_[w];
    std::vector<double> slice(cells);
    ClampStats& st = stats[w];
    for (std::size_t i = begin; i < end; ++i) {
      double peak = 0.0;
      for (std::size_t c = 0; c < cells; ++c) {
        slice[c] = u(c, i);
        peak = std::max(peak, std::abs(slice[c]));
      }
      if (peak == 0.0) continue;
      heat.apply(slice, alpha_[i] * dt_, loss_ ? beta_[i] * dt_ : 0.0);
      const double floor = -clamp_tolerance * scale;
      for (std::size_t c = 0; c < cells; ++c) {
        double v = slice[c];
        if (physical && v < 0.0) {
          st.worst_relative = std::min(st.worst_relative, v / scale);
          if (v >= floor) {
            v = 0.0;
            ++st.clamped;
          }
        }
        u(c, i) = v;
      }
    }
  });

  ClampStats total;
  for (const auto& s : stats) {
    total.clamped += s.clamped;
    total.worst_relative = std::min(total.worst_relative, s.worst_relative);
  }
  return total;
}

}  // namespace fragkin
