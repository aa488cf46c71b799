#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fragkin/moments.hpp"

using namespace fragkin;

TEST_CASE("sigma_ell matches the power-kernel closed form") {
  const auto eta = default_eta_samples();
  for (double nu : {0.0, -0.25, -0.5}) {
    const FragKernel k = FragKernel::power(nu);
    CHECK(std::abs(sigma_ell(k, 1.0, eta) - 1.0) <= 1e-8);
    for (double ell : {0.5, 1.0, 2.0, 5.0, 9.0})
      CHECK(std::abs(sigma_ell(k, ell, eta) - (nu + 2.0) / (nu + ell + 1.0)) <= 1e-6);
  }
  CHECK(std::abs(sigma_ell(FragKernel::power(0.0), 2.0, eta) - 2.0 / 3.0) <= 1e-6);
  CHECK(std::abs(sigma_ell(FragKernel::power(0.0), 9.0, eta) - 0.2) <= 1e-6);
}

TEST_CASE("sigma_zero_ell fragment counts") {
  const auto eta = default_eta_samples();
  CHECK(std::abs(sigma_zero_ell(FragKernel::power(0.0), 0.0, eta) - 2.0) <= 1e-6);
  CHECK(std::abs(sigma_zero_ell(FragKernel::power(-0.5), 0.0, eta) - 3.0) <= 1e-5);
  // With a finite count the ell = 2 proxy shrinks as the samples grow.
  const double small = sigma_zero_ell(FragKernel::power(0.0), 2.0, {1, 2, 4, 8});
  const double large = sigma_zero_ell(FragKernel::power(0.0), 2.0, {100, 200, 400, 800});
  CHECK(large < 1e-3 * small);
}

TEST_CASE("sigma table is non-increasing for ell >= 1") {
  for (double nu : {0.0, -0.25, -0.5}) {
    const MomentReport r = compute_moment_report(FragKernel::power(nu));
    double prev = INFINITY;
    for (const auto& [ell, s] : r.sigma_table) {
      if (ell < 1.0) continue;
      CHECK(s <= prev + 1e-6);
      prev = s;
    }
  }
}

TEST_CASE("ell bars of the binary families") {
  const auto grid = default_ell_grid();
  const auto eta = default_eta_samples();
  for (const FragKernel& k : {FragKernel::power(0.0), FragKernel::homogeneous([](double) { return 2.0; }),
                              FragKernel::separable([](double) { return 1.0; })}) {
    const EllBars b = estimate_ell_bars(k, grid, eta);
    REQUIRE(b.ell0.value.has_value());
    REQUIRE(b.ell1.value.has_value());
    CHECK(*b.ell0.value == 0.0);
    CHECK(*b.ell1.value == 0.0);
    CHECK(b.ell0.stabilized);
  }
}

TEST_CASE("kappa_delta and max_delta") {
  SizeGrid sg(0.01, 100.0, 128);
  CHECK(kappa_delta(RateModel::constant(1.0, 1.0), sg, 0.3) == doctest::Approx(1.0));
  PowerLaw law;
  law.theta_alpha = 0.2;
  law.theta_beta = 0.5;
  const RateModel r = RateModel::power(law);
  double scan = INFINITY;
  for (double xi : sg.nodes()) scan = std::min(scan, std::sqrt(r.alpha(xi)) * std::sqrt(r.beta_envelope(xi)));
  CHECK(kappa_delta(r, sg, 0.5) == doctest::Approx(scan).epsilon(1e-14));
  CHECK(kappa_delta(r, sg, 0.5) > 0.0);

  // delta above delta* = 0.5556: the combined exponent is negative, so the minimum falls with xi_max.
  const double small = kappa_delta(r, SizeGrid(0.01, 1e2, 128), 0.9);
  const double large = kappa_delta(r, SizeGrid(0.01, 1e6, 128), 0.9);
  CHECK(large < small);

  CHECK(max_delta(0.3, 0.3, 2) == doctest::Approx(0.5));
  CHECK(std::abs(max_delta(0.2, 0.5, 1) - 0.5 / 0.9) <= 1e-12);
  CHECK(max_delta(1e-9, 0.5, 1) > 0.999999);
}
