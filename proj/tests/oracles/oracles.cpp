#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oracle {

namespace {

// Nearest node in log(xi); -1 above the top node's upper half-cell is not
// produced here, callers decide overflow first.
std::size_t nearest(const std::vector<double>& xi, double s) {
  const auto it = std::lower_bound(xi.begin(), xi.end(), s);
  if (it == xi.begin()) return 0;
  if (it == xi.end()) return xi.size() - 1;
  const auto k = static_cast<std::size_t>(it - xi.begin());
  return std::log(s / xi[k - 1]) < std::log(xi[k] / s) ? k - 1 : k;
}

struct Tables {
  std::size_t m = 0;
  std::vector<double> frag;       // frag[k*m + j]: daughters of parent j landing on node k (number, not density)
  std::vector<double> frag_lost;  // mass per parent j leaving below xi_min
  std::vector<std::size_t> coag_target;  // nearest node of xi_i + xi_j, or m for overflow
  std::vector<double> coag_factor;       // v / xi_target
};

Tables build_tables(const SizeModel& model) {
  Tables t;
  const std::size_t m = model.xi.size();
  t.m = m;
  const double xi_min = model.xi.front();
  const double xi_max = model.xi.back();
  if (model.gamma) {
    t.frag.assign(m * m, 0.0);
    t.frag_lost.assign(m, 0.0);
    constexpr int per_decade = 4000;
    for (std::size_t j = 0; j < m; ++j) {
      const double eta = model.xi[j];
      // Midpoint rule in log(s) over (eta * 1e-14, eta]; each sample is one
      // daughter packet placed on the nearest node with its mass kept.
      const double decades = 14.0;
      const int samples = static_cast<int>(decades * per_decade);
      const double h = decades * std::log(10.0) / samples;
      for (int k = 0; k < samples; ++k) {
        const double s = eta * std::exp(-(k + 0.5) * h);
        const double count = model.gamma(s, eta) * s * h;
        if (s < xi_min) {
          t.frag_lost[j] += count * s;
          continue;
        }
        const std::size_t node = nearest(model.xi, s);
        t.frag[node * m + j] += count * s / model.xi[node];
      }
    }
  }
  if (model.kappa) {
    t.coag_target.assign(m * m, m);
    t.coag_factor.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        const double v = model.xi[i] + model.xi[j];
        if (v > xi_max) continue;
        const std::size_t k = nearest(model.xi, v);
        t.coag_target[i * m + j] = k;
        t.coag_factor[i * m + j] = v / model.xi[k];
      }
  }
  return t;
}

std::vector<double> rhs(const SizeModel& model, const Tables& t, const std::vector<double>& u, double* lost) {
  const std::size_t m = t.m;
  std::vector<double> du(m, 0.0);
  double out = 0.0;
  for (std::size_t j = 0; j < m; ++j) du[j] -= model.beta[j] * u[j];
  if (model.gamma) {
    for (std::size_t j = 0; j < m; ++j) {
      const double parents = model.beta[j] * u[j] * model.w[j];
      if (parents == 0.0) continue;
      for (std::size_t k = 0; k < m; ++k) du[k] += t.frag[k * m + j] * parents / model.w[k];
      out += t.frag_lost[j] * parents;
    }
  }
  if (model.kappa) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const double k = model.kappa(model.xi[i], model.xi[j]);
        // Ordered pair (i, j): half an event, removing one particle from each slot.
        const double events = 0.5 * k * u[i] * u[j] * model.w[i] * model.w[j];
        du[i] -= events / model.w[i];
        du[j] -= events / model.w[j];
        const std::size_t target = t.coag_target[i * m + j];
        if (target == m) {
          out += events * (model.xi[i] + model.xi[j]);
          continue;
        }
        du[target] += events * t.coag_factor[i * m + j] / model.w[target];
      }
    }
  }
  if (lost) *lost = out;
  return du;
}

}  // namespace

std::vector<double> ode_rhs(const SizeModel& model, const std::vector<double>& u, double* lost) {
  return rhs(model, build_tables(model), u, lost);
}

Trajectory ode_oracle(const SizeModel& model, const std::vector<double>& u0, double T, std::size_t steps,
                      std::size_t records) {
  if (steps == 0 || records == 0 || steps % records != 0) throw std::invalid_argument("steps must be a multiple of records");
  const Tables tables = build_tables(model);
  const std::size_t m = u0.size();
  const double h = T / static_cast<double>(steps);
  Trajectory tr;
  std::vector<double> u = u0;
  double lost = 0.0;
  tr.t.push_back(0.0);
  tr.u.push_back(u);
  tr.lost_mass.push_back(0.0);
  std::vector<double> tmp(m);
  for (std::size_t n = 1; n <= steps; ++n) {
    double l1, l2, l3, l4;
    const auto k1 = rhs(model, tables, u, &l1);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = u[i] + 0.5 * h * k1[i];
    const auto k2 = rhs(model, tables, tmp, &l2);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = u[i] + 0.5 * h * k2[i];
    const auto k3 = rhs(model, tables, tmp, &l3);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = u[i] + h * k3[i];
    const auto k4 = rhs(model, tables, tmp, &l4);
    for (std::size_t i = 0; i < m; ++i) u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    lost += h / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
    if (n % (steps / records) == 0) {
      tr.t.push_back(h * static_cast<double>(n));
      tr.u.push_back(u);
      tr.lost_mass.push_back(lost);
    }
  }
  return tr;
}

double number(const SizeModel& model, const std::vector<double>& u) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += model.w[i] * u[i];
  return s;
}

double mass(const SizeModel& model, const std::vector<double>& u) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += model.w[i] * model.xi[i] * u[i];
  return s;
}

std::vector<double> convolution_oracle(const std::vector<double>& profile, double alpha, double t, int dim, double L,
                                       std::size_t n, int images) {
  if (std::sqrt(4.0 * alpha * t) > L / 8.0) throw std::invalid_argument("convolution oracle: kernel too wide for the box");
  const double h = L / static_cast<double>(n);
  const double four_at = 4.0 * alpha * t;
  const double norm = std::pow(std::numbers::pi * four_at, -0.5 * dim) * std::pow(h, dim);
  // Separable kernel: 1-d periodic-image weights by index offset.
  std::vector<double> k1(n, 0.0);
  for (std::size_t d = 0; d < n; ++d)
    for (int img = -images; img <= images; ++img) {
      const double x = static_cast<double>(d) * h + img * L;
      k1[d] += std::exp(-x * x / four_at);
    }
  std::vector<double> out(profile.size(), 0.0);
  if (dim == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += k1[(i + n - j) % n] * profile[j];
      out[i] = norm * s;
    }
    return out;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) s += k1[(i + n - a) % n] * k1[(j + n - b) % n] * profile[a * n + b];
      out[i * n + j] = norm * s;
    }
  return out;
}

}  // namespace oracle
