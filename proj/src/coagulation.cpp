#include "fragkin/coagulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include <Eigen/Dense>

#include "fragkin/errors.hpp"
#include "fragkin/parallel.hpp"

namespace fragkin {

CoagOperator CoagOperator::build(const CoagKernel& kernel, std::shared_ptr<const SizeGrid> sizes) {
  if (!sizes) throw InvalidArgument("coagulation operator needs a size grid");
  const SizeGrid& sg = *sizes;
  CoagOperator op;
  op.sizes_ = sizes;
  op.m_ = sg.size();
  op.zero_ = kernel.is_zero();
  if (kernel.has_spatial_modulation()) op.spatial_ = [kernel](const Position& x) { return kernel.spatial(x); };
  const std::size_t m = op.m_;
  op.k_.resize(m * m);
  op.pivots_.resize(m * m);

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double kij = kernel(sg.node(i), sg.node(j));
      if (!(kij >= 0.0) || !std::isfinite(kij)) throw InvalidArgument("coagulation kernel must be finite and >= 0");
      op.k_[i * m + j] = kij;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double a = op.k_[i * m + j];
      const double b = op.k_[j * m + i];
      if (std::abs(a - b) > 1e-12 * std::max(std::abs(a), std::abs(b)))
        throw InvalidArgument("coagulation kernel is not symmetric on the grid");
      op.k_[j * m + i] = a;
    }
  }

  const auto nodes = sg.nodes();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const double v = nodes[i] + nodes[j];
      PivotSplit s;
      if (v <= sg.xi_max()) {
        // last node <= v
        const auto it = std::upper_bound(nodes.begin(), nodes.end(), v);
        const auto a = static_cast<std::size_t>(it - nodes.begin()) - 1;
        s.target = static_cast<int>(a);
        if (a + 1 == m || v == nodes[a]) {
          s.lower = 1.0;
          s.upper = 0.0;
        } else {
          const double lo = nodes[a];
          const double hi = nodes[a + 1];
          s.lower = (hi - v) / (hi - lo);
          s.upper = (v - lo) / (hi - lo);
          // A product within round-off of a node goes to that node alone.
          constexpr double snap = 64.0 * std::numeric_limits<double>::epsilon();
          if (s.upper < snap) {
            s.lower = 1.0;
            s.upper = 0.0;
          } else if (s.lower < snap) {
            s.target = static_cast<int>(a + 1);
            s.lower = 1.0;
            s.upper = 0.0;
          }
        }
      }
      op.pivots_[i * m + j] = s;
      op.pivots_[j * m + i] = s;
    }
  }

  // Runs of common target per column j.  The product mass grows with i, so
  // the non-overflow pairs come first and overflow pairs form a tail.
  op.lo_.assign(m * m, 0.0);
  op.hi_.assign(m * m, 0.0);
  op.run_start_.assign(m + 1, 0);
  op.overflow_from_.assign(m, 0);
  for (std::size_t j = 0; j < m; ++j) {
    op.run_start_[j] = op.runs_.size();
    std::size_t i = 0;
    for (; i <= j; ++i) {
      const PivotSplit& s = op.pivots_[i * m + j];
      const double events = (i == j ? 0.5 : 1.0) * op.k_[i * m + j];
      if (s.overflow()) break;
      op.lo_[j * m + i] = events * s.lower;
      op.hi_[j * m + i] = events * s.upper;
      const auto t = static_cast<std::uint32_t>(s.target);
      if (op.runs_.size() > op.run_start_[j] && op.runs_.back().target == t)
        op.runs_.back().end = static_cast<std::uint32_t>(i + 1);
      else
        op.runs_.push_back(Run{t, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i + 1)});
    }
    op.overflow_from_[j] = i;
    for (; i <= j; ++i) {
      if (!op.pivots_[i * m + j].overflow()) throw InvalidArgument("coagulation: overflow pairs are not a tail");
      const double events = (i == j ? 0.5 : 1.0) * op.k_[i * m + j];
      op.lo_[j * m + i] = events;
      op.hi_[j * m + i] = events * (nodes[i] + nodes[j]);
    }
  }
  op.run_start_[m] = op.runs_.size();
  return op;
}

namespace {

using RowMat = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using Block = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Cells are processed in blocks of fixed width, size-major (row i holds
// u_i w_i for every cell of the block), so each pair term is a contiguous
// vector update.  The width does not depend on the thread count, which keeps
// results bit-identical across thread counts.
constexpr std::size_t kBlock = 64;

void load_block(const Field& u, std::span<const double> w, std::size_t c0, std::size_t nc, Block& a,
                bool clip = false) {
  const std::size_t m = w.size();
  a.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(nc));
  double* p = a.data();
  for (std::size_t c = 0; c < nc; ++c) {
    const auto row = u.cell(c0 + c);
    for (std::size_t i = 0; i < m; ++i) p[i * nc + c] = (clip ? std::max(row[i], 0.0) : row[i]) * w[i];
  }
}

}  // namespace

void CoagOperator::apply(const Field& u, const Field& v, Field& out, OverflowRates* overflow,
                         unsigned threads) const {
  if (!(u.sizes() == *sizes_)) throw InvalidArgument("coagulation: field size grid does not match the operator");
  require_same_grids(u, v, "coagulation apply");
  require_same_grids(u, out, "coagulation apply");
  const SizeGrid& sg = *sizes_;
  const std::size_t m = m_;
  const std::size_t cells = u.num_cells();
  if (overflow) {
    overflow->mass.assign(cells, 0.0);
    overflow->number.assign(cells, 0.0);
  }
  if (zero_) {
    out.fill(0.0);
    return;
  }
  const bool same = &u == &v;
  const auto w = sg.weights();
  const auto mi = static_cast<Eigen::Index>(m);
  const RowMat K(k_.data(), mi, mi);
  const std::size_t blocks = (cells + kBlock - 1) / kBlock;

  parallel_for(blocks, threads, [&](std::size_t first, std::size_t last, unsigned) {
    Block A, B, KA, KB;
    std::vector<double> gain, lu(kBlock), hu(kBlock), lv(kBlock), hv(kBlock), over_n(kBlock), over_m(kBlock);
    for (std::size_t blk = first; blk < last; ++blk) {
      const std::size_t c0 = blk * kBlock;
      const std::size_t nc = std::min(kBlock, cells - c0);
      load_block(u, w, c0, nc, A);
      if (!same) load_block(v, w, c0, nc, B);
      KA.noalias() = K * A;
      if (!same) KB.noalias() = K * B;
      const double* a = A.data();
      const double* b = same ? a : B.data();
      gain.assign((m + 1) * nc, 0.0);
      std::fill(over_n.begin(), over_n.end(), 0.0);
      std::fill(over_m.begin(), over_m.end(), 0.0);

      // Sums over i in [lo_i, hi_i) of coef_i * a_i (and * b_i), per cell.
      auto pair_sums = [&](const double* lo, const double* hi, std::size_t first_i, std::size_t end_i) {
        std::fill_n(lu.begin(), nc, 0.0);
        std::fill_n(hu.begin(), nc, 0.0);
        for (std::size_t i = first_i; i < end_i; ++i) {
          const double cl = lo[i], ch = hi[i];
          const double* ai = a + i * nc;
          for (std::size_t c = 0; c < nc; ++c) {
            lu[c] += cl * ai[c];
            hu[c] += ch * ai[c];
          }
        }
        if (same) return;
        std::fill_n(lv.begin(), nc, 0.0);
        std::fill_n(hv.begin(), nc, 0.0);
        for (std::size_t i = first_i; i < end_i; ++i) {
          const double cl = lo[i], ch = hi[i];
          const double* bi = b + i * nc;
          for (std::size_t c = 0; c < nc; ++c) {
            lv[c] += cl * bi[c];
            hv[c] += ch * bi[c];
          }
        }
      };
      // Events of pair (i, j): weight * (a_i b_j + b_i a_j) / 2.
      auto scatter = [&](double* lo_dst, double* hi_dst, std::size_t j) {
        const double* aj = a + j * nc;
        const double* bj = b + j * nc;
        if (same) {
          for (std::size_t c = 0; c < nc; ++c) {
            lo_dst[c] += aj[c] * lu[c];
            hi_dst[c] += aj[c] * hu[c];
          }
          return;
        }
        for (std::size_t c = 0; c < nc; ++c) {
          lo_dst[c] += 0.5 * (bj[c] * lu[c] + aj[c] * lv[c]);
          hi_dst[c] += 0.5 * (bj[c] * hu[c] + aj[c] * hv[c]);
        }
      };
      for (std::size_t j = 0; j < m; ++j) {
        const double* lo = lo_.data() + j * m;
        const double* hi = hi_.data() + j * m;
        for (std::size_t r = run_start_[j]; r < run_start_[j + 1]; ++r) {
          const Run& run = runs_[r];
          pair_sums(lo, hi, run.begin, run.end);
          scatter(gain.data() + run.target * nc, gain.data() + (run.target + 1) * nc, j);
        }
        if (overflow_from_[j] <= j) {
          pair_sums(lo, hi, overflow_from_[j], j + 1);
          scatter(over_n.data(), over_m.data(), j);
        }
      }

      const double* ka = KA.data();
      const double* kb = same ? ka : KB.data();
      for (std::size_t c = 0; c < nc; ++c) {
        const std::size_t cell = c0 + c;
        const auto ur = u.cell(cell);
        const auto vr = v.cell(cell);
        auto dst = out.cell(cell);
        const double scale = spatial_ ? spatial_(u.space().position(cell)) : 1.0;
        for (std::size_t i = 0; i < m; ++i)
          dst[i] = scale * (-0.5 * (ur[i] * kb[i * nc + c] + vr[i] * ka[i * nc + c]) + gain[i * nc + c] / w[i]);
        if (overflow) {
          overflow->mass[cell] = scale * over_m[c];
          overflow->number[cell] = scale * over_n[c];
        }
      }
    }
  });
}

Field CoagOperator::apply(const Field& u, const Field& v) const {
  Field out(u.space_ptr(), u.sizes_ptr());
  apply(u, v, out);
  return out;
}

void CoagOperator::loss_rates(const Field& u, Field& d) const {
  require_same_grids(u, d, "coagulation loss rates");
  if (zero_) {
    d.fill(0.0);
    return;
  }
  const auto w = sizes_->weights();
  const auto mi = static_cast<Eigen::Index>(m_);
  const RowMat K(k_.data(), mi, mi);
  Block A, KA;
  for (std::size_t c0 = 0; c0 < u.num_cells(); c0 += kBlock) {
    const std::size_t nc = std::min(kBlock, u.num_cells() - c0);
    load_block(u, w, c0, nc, A);
    KA.noalias() = K * A;
    for (std::size_t c = 0; c < nc; ++c) {
      auto dst = d.cell(c0 + c);
      const double scale = spatial_ ? spatial_(u.space().position(c0 + c)) : 1.0;
      for (std::size_t i = 0; i < m_; ++i) dst[i] = scale * KA.data()[i * nc + c];
    }
  }
}

double CoagOperator::max_loss_rate(const Field& u) const {
  if (zero_) return 0.0;
  const auto w = sizes_->weights();
  const auto mi = static_cast<Eigen::Index>(m_);
  const RowMat K(k_.data(), mi, mi);
  Block A, KA;
  double best = 0.0;
  for (std::size_t c0 = 0; c0 < u.num_cells(); c0 += kBlock) {
    const std::size_t nc = std::min(kBlock, u.num_cells() - c0);
    load_block(u, w, c0, nc, A, true);
    KA.noalias() = K * A;
    for (std::size_t c = 0; c < nc; ++c) {
      const double scale = spatial_ ? spatial_(u.space().position(c0 + c)) : 1.0;
      for (std::size_t i = 0; i < m_; ++i) best = std::max(best, scale * KA.data()[i * nc + c]);
    }
  }
  return best;
}

double CoagOperator::overflow_mass_rate(const Field& u) const {
  Field out(u.space_ptr(), u.sizes_ptr());
  OverflowRates o;
  apply(u, u, out, &o);
  double total = 0.0;
  for (double r : o.mass) total += r;
  return total * u.space().cell_volume();
}

}  // namespace fragkin
