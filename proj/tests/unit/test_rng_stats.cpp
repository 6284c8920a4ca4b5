#include <cmath>
#include <vector>

#include "doctest.h"
#include "gpd/error.hpp"
#include "gpd/rng.hpp"
#include "gpd/stats.hpp"

using namespace gpd;

TEST_CASE("Philox4x32-10 known answers") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32(0)(C{0, 0, 0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32(0xffffffffffffffffull)(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32(0x299f31d0a4093822ull)(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("counter draws are pure and stream-separated") {
  const CounterRng a(42, Stream::KarhunenLoeve), b(42, Stream::JointGaussian);
  CHECK(a.normal2(3, 7) == a.normal2(3, 7));
  CHECK(a.normal2(3, 7) != b.normal2(3, 7));
  CHECK(a.uniform2(3, 7) != a.uniform2(4, 7));
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const auto [u, v] = a.uniform2(i, 0);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("normal draws have unit variance") {
  const CounterRng r(7, Stream::KarhunenLoeve);
  std::vector<double> x;
  for (std::uint64_t i = 0; i < 50000; ++i) {
    const auto [g, h] = r.normal2(i, 1);
    x.push_back(g);
    x.push_back(h);
  }
  const SampleMoments m = sample_moments(x);
  CHECK(std::fabs(m.mean) <= 4 * m.standard_error);
  // Var of the sample variance of N(0,1) is 2 / (n - 1).
  CHECK(std::fabs(m.variance - 1.0) <= 4 * std::sqrt(2.0 / (x.size() - 1)));
}

TEST_CASE("least squares") {
  const std::vector<double> x = {0, 1, 2, 3}, y = {1, 3, 5, 7};
  const LinearFit f = linear_fit(x, y);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(f.intercept == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.residual <= 1e-15);
  CHECK(f.n == 4);
  const std::vector<double> one = {1.0}, flat = {2, 2, 2};
  CHECK_THROWS_AS(linear_fit(one, one), DegenerateFitError);
  CHECK_THROWS_AS(linear_fit(flat, flat), DegenerateFitError);
}

TEST_CASE("sample moments") {
  const std::vector<double> v = {1, 2, 3, 4};
  const SampleMoments m = sample_moments(v);
  CHECK(m.mean == 2.5);
  CHECK(m.variance == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(m.standard_error == doctest::Approx(std::sqrt(5.0 / 12.0)).epsilon(1e-15));
}
