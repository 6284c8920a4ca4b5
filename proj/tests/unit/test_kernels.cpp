#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "gpd/error.hpp"
#include "gpd/kernels.hpp"
#include "gpd/special_functions.hpp"
#include "oracles.hpp"

using namespace gpd;
using std::numbers::pi;

namespace {

double k1(const KernelSpec& k, double x, double y) {
  const double p[1] = {x}, q[1] = {y};
  return k(p, q);
}

}  // namespace

TEST_CASE("closed-form values") {
  CHECK(k1(KernelSpec::min_xy(), 0.3, 0.8) == 0.3);
  CHECK(k1(KernelSpec::circle_brownian(), 0.4, 0.4) == 0.5);
  CHECK(k1(KernelSpec::circle_brownian(), -0.9, 0.9) == doctest::Approx(0.3).epsilon(1e-14));
  const KernelSpec a = KernelSpec::sphere_arcsin_bm(2);
  const double e[3] = {0, 0, 1}, m[3] = {0, 0, -1};
  CHECK(a(e, e) == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK(a(e, m) == doctest::Approx(-pi / 2).epsilon(1e-15));
  const double p[1] = {0.2};
  CHECK_THROWS_AS(a(e, p), DomainError);
}

TEST_CASE("psi from a covariance") {
  const NDKernel mxy = psi_from_pd(KernelSpec::min_xy());
  const double a[1] = {0.2}, b[1] = {0.7};
  CHECK(mxy(a, b) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mxy(a, a) == 0.0);
  // K = 1/2 - rho gives psi = 1/2 + 1/2 - 2 (1/2 - rho) = 2 rho.
  const NDKernel cb = psi_from_pd(KernelSpec::circle_brownian());
  oracle::Mix rng(1);
  for (int i = 0; i < 100; ++i) {
    const double x[1] = {rng.uniform(-1, 1)}, y[1] = {rng.uniform(-1, 1)};
    CHECK(cb(x, y) == doctest::Approx(2 * oracle::circle_distance(x[0], y[0])).epsilon(1e-13));
    CHECK(cb(x, x) == 0.0);
  }
  const KernelSpec skew = KernelSpec::derived(
      Space::interval_mixed(),
      [](std::span<const double> x, std::span<const double> y) { return x[0] * y[0] * y[0]; },
      "skew");
  CHECK_THROWS_AS(psi_from_pd(skew), ContractError);
}

TEST_CASE("recentred kernels") {
  const KernelSpec k = KernelSpec::min_xy();
  const double zero[1] = {0.0}, one[1] = {1.0};
  const KernelSpec k0 = k_u(k, zero);
  const KernelSpec k1u = k_u(k, one);
  for (int i = 0; i <= 10; ++i) {
    for (int j = 0; j <= 10; ++j) {
      const double x = i / 10.0, y = j / 10.0;
      CHECK(k1(k0, x, y) == doctest::Approx(k1(k, x, y)).epsilon(1e-15));
      const double expected = 0.5 * (std::fabs(x - 1) + std::fabs(y - 1) - std::fabs(x - y));
      CHECK(std::fabs(k1(k1u, x, y) - expected) <= 1e-15);
    }
    CHECK(std::fabs(k1(k1u, 1.0, i / 10.0)) <= 1e-15);
  }
  CHECK(k1(k1u, 1.0, 1.0) == 0.0);
}

TEST_CASE("K-tilde of |x - y| on the unit interval") {
  const TildeKernel t = nd_to_pd(power_distance(Space::interval_mixed(), 1.0));
  CHECK_FALSE(t.invariant_path);
  for (double x : {0.0, 0.3, 0.77, 1.0}) {
    const double one = oracle::integrate([&](double y) { return k1(t.kernel, x, y); }, 0.0, 1.0, 200);
    // The integrand has a kink at y = x; integrate the two sides separately.
    const double split =
        oracle::integrate([&](double y) { return k1(t.kernel, x, y); }, 0.0, x, 200) +
        oracle::integrate([&](double y) { return k1(t.kernel, x, y); }, x, 1.0, 200);
    CHECK(std::fabs(split - 1.0 / 6.0) <= 1e-8);
    CHECK(std::fabs(one - 1.0 / 6.0) <= 1e-5);
    for (int k = 1; k <= 3; ++k) {
      const auto f = [&](double y) { return k1(t.kernel, x, y) * std::cos(k * pi * y); };
      const double v = oracle::integrate(f, 0.0, x, 200) + oracle::integrate(f, x, 1.0, 200);
      CHECK(std::fabs(v - std::cos(k * pi * x) / (pi * pi * k * k)) <= 1e-8);
    }
  }
}

TEST_CASE("K-tilde trace identity for x ^ y") {
  // K-tilde - K = Tr K - K1(x) - K1(y), with Tr K = 1/2 and K1(x) = x - x^2/2.
  const KernelSpec k = KernelSpec::min_xy();
  const TildeKernel t = nd_to_pd(psi_from_pd(k));
  for (int i = 0; i <= 8; ++i) {
    for (int j = 0; j <= 8; ++j) {
      const double x = i / 8.0, y = j / 8.0;
      const double expected = 0.5 - (x - x * x / 2) - (y - y * y / 2);
      CHECK(std::fabs(k1(t.kernel, x, y) - k1(k, x, y) - expected) <= 1e-9);
    }
  }
}

TEST_CASE("C0 of rho on the sphere") {
  const TildeKernel t = nd_to_pd(power_distance(Space::sphere(2), 1.0));
  CHECK(t.invariant_path);
  CHECK(t.c0 == doctest::Approx(pi / 2).epsilon(1e-10));
  CHECK(t.constancy_error <= 1e-8);
}

TEST_CASE("definiteness verdicts") {
  const GramReport m = gram_definiteness_test(KernelSpec::min_xy(), 100, 1);
  CHECK(m.verdict == Verdict::PDPass);
  CHECK(m.min_eigenvalue >= -1e-8 * m.trace);

  const NDKernel r15 = power_distance(Space::circle(), 1.5);
  const GramReport v = gram_definiteness_test(r15, 60, 2);
  REQUIRE(v.verdict == Verdict::Violation);
  REQUIRE(v.witness.size() == 60);
  double sum = 0.0, form = 0.0;
  for (std::size_t i = 0; i < 60; ++i) {
    sum += v.witness[i];
    for (std::size_t j = 0; j < 60; ++j) {
      form += v.witness[i] * v.witness[j] * r15(v.points[i], v.points[j]);
    }
  }
  CHECK(std::fabs(sum) <= 1e-10);
  CHECK(form > 0.0);

  CHECK(gram_definiteness_test(power_distance(Space::sphere(2), 0.5), 150, 3).verdict ==
        Verdict::NDPass);
  CHECK(gram_definiteness_test(power_distance(Space::sphere(2), 1.0), 150, 3).verdict ==
        Verdict::NDPass);
  CHECK_THROWS_AS(gram_definiteness_test(KernelSpec::min_xy(), 1, 1), DomainError);
}

TEST_CASE("exp(-t psi) checks") {
  const NDKernel rho = power_distance(Space::sphere(2), 1.0);
  const double ts[2] = {1.0, 1e-9};
  const auto reports = exp_nd_is_pd_check(rho, ts, 80, 4);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].verdict == Verdict::PDPass);
  // Nearly the all-ones matrix: rank one, PSD.
  CHECK(reports[1].verdict == Verdict::PDPass);
  CHECK(reports[1].trace == doctest::Approx(80.0).epsilon(1e-6));
}

TEST_CASE("Mercer coefficients of the named kernels") {
  const KernelSpec m = spectral_coefficients(KernelSpec::min_xy(), 64);
  CHECK(m.nu()[0] == doctest::Approx(4.0 / (pi * pi)).epsilon(1e-14));
  const KernelSpec c = spectral_coefficients(KernelSpec::circle_brownian(), 64);
  CHECK(c.nu()[2] == 0.0);
  CHECK(c.nu()[1] == doctest::Approx(4.0 / (pi * pi)).epsilon(1e-12));
  CHECK(c.nu()[3] == doctest::Approx(4.0 / (9 * pi * pi)).epsilon(1e-12));

  const KernelSpec a = spectral_coefficients(KernelSpec::sphere_arcsin_bm(2), 64);
  const auto b = schoenberg_transform(PowerSeriesSpec::arcsin(), 0.5, 64);
  for (int j = 0; j <= 64; ++j) {
    const double lhs = a.nu()[j] * static_cast<double>(sphere_harmonic_dimension(2, j));
    CHECK(std::fabs(lhs - 4 * pi * b.coefficients[j]) <= 1e-12 * (1 + 4 * pi * b.coefficients[j]));
  }
  oracle::Mix rng(8);
  for (int i = 0; i < 20; ++i) {
    const auto x = rng.unit_vector(3), y = rng.unit_vector(3);
    CHECK(std::fabs(a(x, y) - KernelSpec::sphere_arcsin_bm(2)(x, y)) <= a.tail_bound() + 1e-6);
  }
  CHECK_THROWS_AS(spectral_coefficients(m, 8), ContractError);
}

TEST_CASE("kernel names") {
  CHECK(KernelSpec::parse("minxy", Space::interval_mixed()).name() == ClosedFormName::MinXY);
  CHECK(KernelSpec::parse("circle-fractional:0.5", Space::circle()).alpha() == 0.5);
  CHECK(KernelSpec::parse("hyp:0.3,0.4,1.2", Space::sphere(2)).hyp_c() == 1.2);
  CHECK_THROWS_AS(KernelSpec::parse("nonsense", Space::circle()), ConfigError);
  CHECK_THROWS_AS(KernelSpec::circle_fractional(1.5), DomainError);
}
