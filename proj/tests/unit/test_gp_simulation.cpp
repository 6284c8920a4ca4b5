#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "gpd/error.hpp"
#include "gpd/gp_simulation.hpp"
#include "gpd/littlewood_paley.hpp"
#include "gpd/stats.hpp"
#include "oracles.hpp"

using namespace gpd;

namespace {

PointSet line_points(std::initializer_list<double> xs) {
  return PointSet(1, std::vector<double>(xs));
}

SimConfig circle_config(std::size_t paths, std::uint64_t seed) {
  SimConfig c;
  c.kernel = spectral_coefficients(KernelSpec::circle_brownian(), 128);
  c.j_max = 6;
  c.n_paths = paths;
  c.seed = seed;
  c.points = line_points({-0.75, -0.1, 0.0, 0.3, 0.95});
  return c;
}

}  // namespace

TEST_CASE("pointwise variance matches the sampled kernel") {
  SimConfig c;
  c.kernel = spectral_coefficients(KernelSpec::min_xy(), 512);
  c.j_max = 8;
  c.n_paths = 4096;
  c.seed = 17;
  c.points = line_points({0.1, 0.5, 0.9});
  const PathEnsemble e = sample_paths(c);
  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<double> v(e.n_paths);
    for (std::size_t p = 0; p < e.n_paths; ++p) v[p] = e.full(p, i) * e.full(p, i);
    const SampleMoments m = sample_moments(v);
    const double target = sampled_covariance(c.kernel, c.window, c.j_max, -1, -1,
                                             c.points[i], c.points[i]);
    CHECK(std::fabs(m.mean - target) <= 4 * m.standard_error);
    // The truncation loses little of K(x, x) = x.
    CHECK(target == doctest::Approx(c.points[i][0]).epsilon(0.01));
  }
}

TEST_CASE("zero kernel gives zero paths") {
  const EigenSystem sys = build_circle(128);
  SimConfig c = circle_config(16, 1);
  c.kernel = KernelSpec::spectral(sys, std::vector<double>(sys.size(), 0.0));
  const PathEnsemble e = sample_paths(c);
  for (double v : e.full_values) CHECK(v == 0.0);
  for (double v : e.band_components) CHECK(v == 0.0);
}

TEST_CASE("seeded determinism") {
  const SimConfig c = circle_config(40, 123);
  const PathEnsemble a = sample_paths(c), b = sample_paths(c);
  CHECK(a.full_values == b.full_values);
  CHECK(a.band_components == b.band_components);
  SimConfig d = c;
  d.seed = 124;
  CHECK(sample_paths(d).full_values != a.full_values);

  SimConfig s;
  s.kernel = spectral_coefficients(KernelSpec::sphere_arcsin_bm(2), 64);
  s.j_max = 5;
  s.n_paths = 30;
  s.seed = 5;
  s.points = sample_uniform(Space::sphere(2), 12, 3);
  CHECK(sample_paths(s).full_values == sample_paths(s).full_values);
}

TEST_CASE("bands sum to the direct expansion") {
  const SimConfig c = circle_config(64, 9);
  const PathEnsemble e = sample_paths(c);
  const auto direct = kl_direct(c);
  for (std::size_t p = 0; p < e.n_paths; ++p) {
    for (std::size_t i = 0; i < e.n_points; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < e.n_bands; ++j) s += e.band(p, j, i);
      CHECK(std::fabs(s - direct[p * e.n_points + i]) <= 1e-9);
      CHECK(std::fabs(e.full(p, i) - direct[p * e.n_points + i]) <= 1e-9);
    }
  }
}

TEST_CASE("band maxima") {
  const SimConfig c = circle_config(8, 2);
  const PathEnsemble e = sample_paths(c);
  for (std::size_t p = 0; p < e.n_paths; ++p) {
    for (std::size_t j = 0; j < e.n_bands; ++j) {
      double m = 0.0;
      for (std::size_t i = 0; i < e.n_points; ++i) m = std::max(m, std::fabs(e.band(p, j, i)));
      CHECK(e.max_abs(p, j) == m);
    }
  }
  SimConfig lean = c;
  lean.store_bands = false;
  const PathEnsemble l = sample_paths(lean);
  CHECK_FALSE(l.has_bands());
  CHECK(l.band_max == e.band_max);
}

TEST_CASE("configuration errors") {
  SimConfig c = circle_config(8, 2);
  c.j_max = 8;  // 128 frequencies reach 128 pi > 2^8
  CHECK_NOTHROW(sample_paths(c));
  c.j_max = 9;
  CHECK_THROWS_AS(sample_paths(c), TruncationError);
  c = circle_config(8, 2);
  c.kernel = KernelSpec::circle_brownian();
  CHECK_THROWS_AS(sample_paths(c), ConfigError);
  c = circle_config(0, 2);
  CHECK_THROWS_AS(sample_paths(c), ConfigError);
  c = circle_config(8, 2);
  c.points = PointSet(1, {1.5});
  CHECK_THROWS_AS(sample_paths(c), DomainError);
}

TEST_CASE("structure function at coincident points") {
  const SimConfig c = circle_config(100, 4);
  const PathEnsemble e = sample_paths(c);
  const std::pair<std::size_t, std::size_t> pairs[] = {{2, 2}, {0, 4}};
  const NDKernel rho = power_distance(Space::circle(), 1.0);
  const auto rows = structure_function_check(e, pairs, rho.psi);
  CHECK(rows[0].mean == 0.0);
  CHECK(rows[0].distance == 0.0);
  CHECK_FALSE(rows[0].flagged);
  CHECK(rows[1].psi == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(rows[1].null_standard_error == doctest::Approx(0.3 * std::sqrt(2.0 / 100)).epsilon(1e-12));
}

TEST_CASE("structure function on the sphere") {
  // Exact joint sampling with the closed form completing the top band.
  const KernelSpec closed = KernelSpec::sphere_fractional(2, 0.5);
  SimConfig c;
  c.kernel = spectral_coefficients(closed, 40, {128, 1.0});
  c.closed_form = closed;
  c.j_max = 5;
  c.n_paths = 8192;
  c.seed = 31;
  c.points = sample_uniform(Space::sphere(2), 6, 8);
  const PathEnsemble e = sample_paths(c);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 1; i < 6; ++i) pairs.emplace_back(0, i);
  const NDKernel r = power_distance(Space::sphere(2), 0.5);
  for (const auto& row : structure_function_check(e, pairs, r.psi)) {
    CHECK(std::fabs(row.mean - row.psi) <= 4 * row.null_standard_error);
  }
}

TEST_CASE("Besov proxy") {
  const std::vector<double> zero(6, 0.0);
  CHECK(besov_norm_of_path(zero, 0.7) == 0.0);
  std::vector<double> one(6, 0.0);
  one[3] = 1.25;
  CHECK(besov_norm_of_path(one, 0.5) == doctest::Approx(std::pow(2.0, 1.5) * 1.25).epsilon(1e-15));
  const std::vector<double> path = {0.4, 0.1, 0.3, 0.05, 0.2, 0.01};
  CHECK(besov_norm_of_path(path, 0.2) <= besov_norm_of_path(path, 0.6));
}

TEST_CASE("regularity fit on synthetic maxima") {
  // E_j = 2^{-0.4 j} exactly on every path.
  const std::size_t n = 4, bands = 9;
  std::vector<double> t(n * bands);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t j = 0; j < bands; ++j) t[p * bands + j] = std::pow(2.0, -0.4 * j);
  }
  const RegularityReport raw = regularity_from_maxima(t, n, bands, 2, 8, false, 1.0);
  CHECK(raw.fitted_alpha == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(raw.standard_errors[3] == 0.0);
  const RegularityReport cor = regularity_from_maxima(t, n, bands, 2, 8, true, 1.0);
  CHECK(cor.fitted_alpha_raw == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(cor.fitted_alpha > raw.fitted_alpha);
  CHECK(cor.e_corrected[4] == doctest::Approx(t[4] / std::sqrt(1 + 4 * std::numbers::ln2)).epsilon(1e-14));
  for (std::size_t j = 3; j < bands; ++j) {
    for (std::size_t p = 0; p < n; ++p) t[p * bands + j] = 0.0;
  }
  CHECK_THROWS_AS(regularity_from_maxima(t, n, bands, 2, 8, false, 1.0), DegenerateFitError);
  CHECK_THROWS_AS(regularity_from_maxima(t, n, bands, 2, 9, false, 1.0), ConfigError);
}
