#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "gpd/error.hpp"
#include "gpd/littlewood_paley.hpp"
#include "gpd/special_functions.hpp"
#include "oracles.hpp"

using namespace gpd;
using std::numbers::pi;

TEST_CASE("window values") {
  CHECK(window_eval(0, 0.5) == 1.0);
  for (int j = 0; j <= 12; ++j) CHECK(window_eval(j, std::ldexp(1.0, j + 1)) == 0.0);
  CHECK(window_eval(1, 1.5) + window_eval(0, 1.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(window_eval(3, 2.0) == 0.0);
  const LPWindow w;
  CHECK(w.transition(0.0) == 1.0);
  CHECK(w.transition(1.0) == 0.0);
  CHECK(w.transition(0.5) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("hard bands") {
  CHECK(in_band(0, 0.0));
  CHECK(in_band(0, 1.0));
  CHECK_FALSE(in_band(1, 1.0));
  CHECK(in_band(1, 2.0));
  CHECK(in_band(3, 8.0));
  CHECK_FALSE(in_band(3, 4.0));
}

TEST_CASE("net edge cases") {
  const DeltaNet one = build_delta_net(Space::circle(), 1.5, 0.0, 1);
  CHECK(one.points.size() == 1);
  const DeltaNet iv = build_delta_net(Space::interval_mixed(), 2.0, 0.0, 1);
  CHECK(iv.points.size() == 1);
  for (std::uint64_t seed : {1ull, 2ull, 99ull}) {
    CHECK(build_delta_net(Space::circle(), 0.5, 0.0, seed).points.size() == 4);
  }
  CHECK_THROWS_AS(build_delta_net(Space::circle(), 0.1, 0.03, 1), ConfigError);
  CHECK_THROWS_AS(build_delta_net(Space::circle(), 1e-7, 0.0, 1), ConfigError);
}

TEST_CASE("sphere nets scale like delta^-2") {
  std::vector<double> lx, ly;
  for (double d : {0.4, 0.2, 0.1, 0.05}) {
    lx.push_back(std::log(d));
    ly.push_back(std::log(static_cast<double>(build_delta_net(Space::sphere(2), d, 0.0, 7).points.size())));
  }
  CHECK(oracle::slope(lx, ly) == doctest::Approx(-2.0).epsilon(0.1));
}

TEST_CASE("circle Brownian band sums match exact partial sums") {
  const KernelSpec k = spectral_coefficients(KernelSpec::circle_brownian(), 2 * 4096);
  for (int j = 0; j <= 11; ++j) {
    double expected = 0.0;
    for (int n = 1; n * pi <= std::ldexp(1.0, j); ++n) {
      if (n * pi > std::ldexp(1.0, j - 1) && n % 2 == 1) expected += 4.0 / (pi * pi * n * n);
    }
    const double diag = band_sum(k, j, {Discretization::InvariantDiagonal, 0});
    const double net = band_sum(k, j, {Discretization::NetSup, 0});
    CHECK(std::fabs(diag - expected) <= 1e-14 + 1e-12 * expected);
    CHECK(std::fabs(net - expected) <= 1e-14 + 1e-12 * expected);
  }
  CHECK(band_sum(k, 1, {Discretization::InvariantDiagonal, 0}) == 0.0);
}

TEST_CASE("Kbes slopes") {
  const KernelSpec m = spectral_coefficients(KernelSpec::min_xy(), 2048);
  CHECK(kbes_estimate(m, 10, 3, 9).fitted_s == doctest::Approx(1.0).epsilon(0.1));
  const KernelSpec f = spectral_coefficients(KernelSpec::circle_fractional(0.5), 2048);
  CHECK(kbes_estimate(f, 10, 3, 9).fitted_s == doctest::Approx(0.5).epsilon(0.2));
  for (double s : {0.5, 1.0, 1.5}) {
    const KernelSpec syn = synthetic_power_kernel(Space::circle(), 1.0 + s, 2048);
    CHECK(std::fabs(kbes_estimate(syn, 10, 3, 9).fitted_s - s) <= 0.1);
  }
}

TEST_CASE("Kbes errors") {
  const KernelSpec c = spectral_coefficients(KernelSpec::circle_brownian(), 2048);
  // Band 1 is empty on the circle.
  CHECK_THROWS_AS(kbes_estimate(c, 10, 0, 4), DegenerateFitError);
  CHECK_THROWS_AS(kbes_estimate(c, 5, 4, 6), ConfigError);
  CHECK_THROWS_AS(kbes_estimate(c, 10, 5, 6), ConfigError);
  const KernelSpec small = spectral_coefficients(KernelSpec::circle_brownian(), 8, {128, 1.0});
  CHECK_THROWS_AS(band_sum(small, 6), TruncationError);
}

TEST_CASE("log2 fit") {
  std::vector<double> v;
  for (int j = 0; j < 10; ++j) v.push_back(3.0 * std::pow(2.0, -0.7 * j));
  double r = 1.0;
  CHECK(fit_log2_decay(v, 2, 8, &r) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(r <= 1e-12);
  v[5] = 0.0;
  CHECK_THROWS_AS(fit_log2_decay(v, 2, 8), DegenerateFitError);
}

TEST_CASE("DPP bracket") {
  const KernelSpec c = spectral_coefficients(KernelSpec::circle_brownian(), 512);
  const DppResult inv = dpp_check(c, 5, 1000, 1);
  CHECK(inv.net_max == doctest::Approx(inv.probe_sup).epsilon(1e-12));

  const KernelSpec m = spectral_coefficients(KernelSpec::min_xy(), 512);
  const DppResult r = dpp_check(m, 4, 10000, 2);
  CHECK(r.net_max <= r.probe_sup);
  CHECK(r.probe_sup <= 4 * r.net_max + 1e-8);
  CHECK(r.net_size > 0);

  // One eigenfunction: H(x, x) = 2 sin^2((k + 1/2) pi x), sup 2.
  const EigenSystem sys = build_interval_mixed(512);
  std::vector<double> nu(sys.size(), 0.0);
  nu[4] = 1.0;  // sqrt_lambda = 4.5 pi <= 16
  const DppResult one = dpp_check(KernelSpec::spectral(sys, nu), 4, 10000, 3);
  CHECK(one.probe_sup == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(one.net_max >= one.probe_sup / 4);
}
