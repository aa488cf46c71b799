#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "fragkin/errors.hpp"
#include "fragkin/grids.hpp"
#include "fragkin/rates.hpp"

using namespace fragkin;

TEST_CASE("space grid basics") {
  SpaceGrid g(1, 2.0 * std::numbers::pi, 64);
  CHECK(g.num_cells() == 64);
  double vol = 0.0;
  for (std::size_t c = 0; c < g.num_cells(); ++c) vol += g.cell_volume();
  CHECK(vol == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-14));
  SpaceGrid g2(2, 3.0, 16);
  CHECK(g2.num_cells() == 256);
  CHECK(g2.flat(3, 5) == 3 * 16 + 5);
  CHECK(g2.indices(g2.flat(3, 5))[1] == 5);
  CHECK_THROWS_AS(SpaceGrid(1, 1.0, 12), InvalidArgument);
  CHECK_THROWS_AS(SpaceGrid(3, 1.0, 16), InvalidArgument);
  CHECK_THROWS_AS(SpaceGrid(1, 1.0, 4), InvalidArgument);
}

TEST_CASE("periodic distance wraps") {
  SpaceGrid g(1, 10.0, 16);
  CHECK(g.periodic_distance_from_origin(1) == doctest::Approx(10.0 / 16));
  CHECK(g.periodic_distance_from_origin(15) == doctest::Approx(10.0 / 16));
}

TEST_CASE("size grid is geometric with positive weights") {
  SizeGrid sg(0.01, 100.0, 256);
  const double r = sg.ratio();
  for (std::size_t i = 0; i + 1 < sg.size(); ++i) CHECK(sg.node(i + 1) / sg.node(i) == doctest::Approx(r).epsilon(1e-12));
  for (std::size_t i = 0; i < sg.size(); ++i) CHECK(sg.weight(i) > 0.0);
  CHECK(sg.xi_min() == 0.01);
  CHECK(sg.xi_max() == doctest::Approx(100.0).epsilon(1e-14));
}

TEST_CASE("quadrature examples") {
  SizeGrid sg(0.01, 100.0, 256);
  std::vector<double> f(sg.size(), 0.0);
  CHECK(quadrature_integrate(f, sg) == 0.0);
  std::fill(f.begin(), f.end(), 1.0);
  CHECK(quadrature_integrate(f, sg) == doctest::Approx(99.99).epsilon(1e-12));
  for (std::size_t i = 0; i < sg.size(); ++i) f[i] = 1.0 / sg.node(i);
  CHECK(quadrature_integrate(f, sg) == doctest::Approx(std::log(1e4)).epsilon(1e-3));
  f[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(quadrature_integrate(f, sg));
}

TEST_CASE("quadrature is exact for piecewise linear in log xi") {
  SizeGrid sg(0.01, 100.0, 64);
  std::vector<double> f(sg.size());
  // f = 3 + 2 ln xi is linear in log xi; its integral is [3 xi + 2 (xi ln xi - xi)].
  for (std::size_t i = 0; i < sg.size(); ++i) f[i] = 3.0 + 2.0 * std::log(sg.node(i));
  auto F = [](double x) { return 3.0 * x + 2.0 * (x * std::log(x) - x); };
  CHECK(quadrature_integrate(f, sg) == doctest::Approx(F(sg.xi_max()) - F(sg.xi_min())).epsilon(1e-12));
}

TEST_CASE("weighted seminorm examples") {
  auto space = std::make_shared<const SpaceGrid>(1, 2.0 * std::numbers::pi, 32);
  auto sizes = std::make_shared<const SizeGrid>(0.01, 100.0, 64);
  const RateModel rates = RateModel::constant(1.0, 1.0);
  Field u(space, sizes);
  CHECK(weighted_seminorm(u, 1.0, 0.0, 0.0, rates) == 0.0);
  u.fill(2.5);
  CHECK(weighted_seminorm(u, 1.0, 0.0, 0.0, rates) ==
        doctest::Approx(2.5 * 2.0 * std::numbers::pi * 99.99).epsilon(1e-10));

  u.fill(0.0);
  const std::size_t c0 = 5, i0 = 17;
  u(c0, i0) = 3.0;
  const double h = space->spacing();
  const double expect = std::sqrt(h) * sizes->weight(i0) * (1.0 + sizes->node(i0)) * 3.0;
  CHECK(weighted_seminorm(u, 2.0, 1.0, 0.0, rates) == doctest::Approx(expect).epsilon(1e-13));
  CHECK_THROWS(weighted_seminorm(u, 0.5, 0.0, 0.0, rates));
}

TEST_CASE("seminorm monotone in ell and s, and homogeneous") {
  auto space = std::make_shared<const SpaceGrid>(1, 5.0, 16);
  auto sizes = std::make_shared<const SizeGrid>(0.01, 100.0, 64);
  PowerLaw law;
  law.theta_beta = 0.5;
  const RateModel rates = RateModel::power(law);  // beta_env >= 1
  Field u(space, sizes);
  for (std::size_t c = 0; c < u.num_cells(); ++c)
    for (std::size_t i = 0; i < u.num_sizes(); ++i) u(c, i) = 1.0 + std::sin(0.3 * c + 0.1 * i);
  double prev = 0.0;
  for (double ell : {0.0, 0.5, 1.0, 2.0, 3.0}) {
    const double v = weighted_seminorm(u, 3.0, ell, 0.0, rates);
    CHECK(v >= prev);
    prev = v;
  }
  prev = 0.0;
  for (double s : {0.0, 0.25, 0.5, 1.0}) {
    const double v = weighted_seminorm(u, 2.0, 1.0, s, rates);
    CHECK(v >= prev);
    prev = v;
  }
  Field v = u;
  v *= -3.0;
  CHECK(weighted_seminorm(v, 2.0, 1.0, 0.5, rates) ==
        doctest::Approx(3.0 * weighted_seminorm(u, 2.0, 1.0, 0.5, rates)).epsilon(1e-14));
}

TEST_CASE("moment weight") {
  CHECK(moment_weight(5.0, 0.0) == 1.0);
  CHECK(moment_weight(2.0, 2.0) == 5.0);
}

TEST_CASE("field arithmetic and grid checks") {
  auto space = std::make_shared<const SpaceGrid>(1, 5.0, 8);
  auto sizes = std::make_shared<const SizeGrid>(0.1, 10.0, 16);
  auto other = std::make_shared<const SizeGrid>(0.1, 10.0, 17);
  Field a(space, sizes), b(space, sizes), c(space, other);
  a.fill(1.0);
  b.fill(2.0);
  a.axpy(0.5, b);
  CHECK(a(3, 4) == 2.0);
  a += b;
  CHECK(a(0, 0) == 4.0);
  CHECK(a.is_physical());
  CHECK_THROWS_AS(require_same_grids(a, c, "test"), InvalidArgument);
  CHECK(total_number(b) == doctest::Approx(2.0 * 5.0 * 9.9).epsilon(1e-12));
}
