#pragma once

#include <cstddef>
#include <functional>

namespace fragkin {

/// 8-point Gauss-Legendre rule on [a, b].
double gauss_legendre(const std::function<double(double)>& f, double a, double b);

/// Integral of f over (0, upper] on dyadic panels (upper/2^(k+1), upper/2^k],
/// each integrated by 8-point Gauss-Legendre; `nodes` / 8 panels in total, the
/// last one reaching down to 0.  Integrable endpoint singularities x^a, a > -1,
/// are handled because the innermost panel carries a vanishing share of the mass.
double integrate_from_zero(const std::function<double(double)>& f, double upper, std::size_t nodes = 1024);

/// Integral over [a, b] split into geometric panels of ratio at most 2.
double integrate_geometric(const std::function<double(double)>& f, double a, double b);

}  // namespace fragkin
