// Randomized invariant checks. Every case is seeded, so failures reproduce.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "../unit/oracles.hpp"
#include "doctest.h"
#include "gpd/gp_simulation.hpp"
#include "gpd/kernels.hpp"
#include "gpd/littlewood_paley.hpp"
#include "gpd/spaces.hpp"
#include "gpd/special_functions.hpp"
#include "gpd/stats.hpp"

using namespace gpd;
using std::numbers::pi;

namespace {

const Space kSpaces[] = {Space::interval_mixed(), Space::interval_neumann(), Space::circle(),
                         Space::sphere(2), Space::sphere(3)};

}  // namespace

TEST_SUITE("spaces") {
  TEST_CASE("triangle inequality on random triples") {
    for (const Space& s : kSpaces) {
      const PointSet p = sample_uniform(s, 30000, 77);
      for (std::size_t t = 0; t < 10000; ++t) {
        const double* a = p.data(3 * t);
        const double* b = p.data(3 * t + 1);
        const double* c = p.data(3 * t + 2);
        const double ab = s.metric_unchecked(a, b), bc = s.metric_unchecked(b, c),
                     ac = s.metric_unchecked(a, c);
        CHECK(ac <= ab + bc + 1e-12);
        CHECK(ab == s.metric_unchecked(b, a));
        CHECK(ab >= 0.0);
      }
    }
  }

  TEST_CASE("frequencies strictly increase") {
    for (const Space& s : kSpaces) {
      const EigenSystem sys = build_eigensystem(s, 300);
      for (std::size_t e = 1; e < sys.size(); ++e) {
        CHECK(sys.entries()[e].sqrt_lambda > sys.entries()[e - 1].sqrt_lambda);
      }
    }
  }

  TEST_CASE("basis Gram matrix is the identity") {
    for (const Space& s : {Space::interval_mixed(), Space::interval_neumann(), Space::circle()}) {
      const EigenSystem sys = build_eigensystem(s, 24);
      const Quadrature q = quadrature_nodes(s, 64);
      const std::size_t m = sys.basis_size();
      std::vector<double> gram(m * m, 0.0), row(m);
      for (std::size_t i = 0; i < q.points.size(); ++i) {
        sys.basis_row(q.points[i][0], row);
        for (std::size_t a = 0; a < m; ++a) {
          for (std::size_t b = 0; b < m; ++b) gram[a * m + b] += q.weights[i] * row[a] * row[b];
        }
      }
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
          CHECK(std::fabs(gram[a * m + b] - (a == b ? 1.0 : 0.0)) <= 1e-8);
        }
      }
    }
  }

  TEST_CASE("sphere addition forms reproduce") {
    // int L_j(<xi, eta>) L_k(<eta, zeta>) dmu(eta) = delta_jk L_k(<xi, zeta>).
    const EigenSystem sys = build_sphere(2, 8);
    const Quadrature q = quadrature_nodes(Space::sphere(2), 40);
    oracle::Mix rng(12);
    for (int trial = 0; trial < 4; ++trial) {
      const auto xi = rng.unit_vector(3), zeta = rng.unit_vector(3);
      for (std::size_t j = 0; j < sys.size(); ++j) {
        for (std::size_t k = 0; k < sys.size(); ++k) {
          double s = 0.0;
          for (std::size_t i = 0; i < q.points.size(); ++i) {
            s += q.weights[i] * sys.cross_value(j, xi, q.points[i]) *
                 sys.cross_value(k, q.points[i], zeta);
          }
          const double expected = j == k ? sys.cross_value(k, xi, zeta) : 0.0;
          CHECK(std::fabs(s - expected) <= 1e-8);
        }
      }
    }
  }
}

TEST_SUITE("special functions") {
  TEST_CASE("recurrence agrees with the generating function on a nu grid") {
    oracle::Mix rng(5);
    for (int t = 0; t < 30; ++t) {
      const double nu = rng.uniform(0.05, 4.0);
      const double x = rng.uniform(-1.0, 1.0);
      for (int k = 0; k <= 20; ++k) {
        CHECK(std::fabs(gegenbauer_w(nu, k, x) - static_cast<double>(oracle::gegenbauer_w(nu, k, x))) <= 1e-10);
      }
    }
  }

  TEST_CASE("nonnegative series give nonnegative Gegenbauer coefficients") {
    oracle::Mix rng(6);
    for (int t = 0; t < 20; ++t) {
      std::vector<double> c(25);
      for (std::size_t n = 0; n < c.size(); ++n) {
        c[n] = rng.uniform() < 0.3 ? 0.0 : rng.uniform() / std::pow(n + 1.0, 2.5);
      }
      const PowerSeriesSpec spec = PowerSeriesSpec::explicit_coefficients(c);
      const double nu = rng.uniform(0.5, 3.0);
      const auto e = schoenberg_transform(spec, nu, 24);
      for (double b : e.coefficients) CHECK(b >= -1e-12);
      for (int i = 0; i < 50; ++i) {
        const double x = rng.uniform(-1.0, 1.0);
        CHECK(std::fabs(e.evaluate(x) - spec.evaluate(x)) <= std::max(1e-8, e.tail_bound()));
      }
    }
  }
}

TEST_SUITE("kernels") {
  TEST_CASE("spectral and closed forms agree within the tail bound") {
    const KernelSpec named[] = {KernelSpec::min_xy(), KernelSpec::circle_brownian(),
                                KernelSpec::circle_fractional(0.5), KernelSpec::sphere_arcsin_bm(2),
                                KernelSpec::sphere_fractional(2, 0.5),
                                KernelSpec::hypergeometric_sphere(2, 0.3, 0.4, 1.2)};
    for (const KernelSpec& closed : named) {
      const KernelSpec spec = spectral_coefficients(closed, 400, {128, 1.0});
      const PointSet p = sample_uniform(closed.space(), 2000, 21);
      for (std::size_t i = 0; i < 1000; ++i) {
        const double diff = std::fabs(spec(p[2 * i], p[2 * i + 1]) - closed(p[2 * i], p[2 * i + 1]));
        CHECK(diff <= spec.tail_bound() + 1e-12);
      }
    }
  }

  TEST_CASE("psi of a spectral kernel is the coefficient sum") {
    const KernelSpec k = spectral_coefficients(KernelSpec::min_xy(), 200);
    const NDKernel psi = psi_from_pd(k);
    const EigenSystem& sys = k.system();
    std::vector<double> cx(sys.size()), cy(sys.size()), cxy(sys.size());
    for (int i = 0; i <= 20; ++i) {
      for (int j = 0; j <= 20; ++j) {
        const double x[1] = {i / 20.0}, y[1] = {j / 20.0};
        sys.diagonal_values(x, cx);
        sys.diagonal_values(y, cy);
        sys.cross_values(x, y, cxy);
        double s = 0.0;
        for (std::size_t e = 0; e < sys.size(); ++e) s += k.nu()[e] * (cx[e] + cy[e] - 2 * cxy[e]);
        CHECK(std::fabs(s - psi(x, y)) <= 1e-12);
        // Against the closed form |x - y| within twice the truncation tail.
        CHECK(std::fabs(psi(x, y) - std::fabs(x[0] - y[0])) <= 4 * k.tail_bound() + 1e-12);
      }
    }
  }

  TEST_CASE("square roots of negative definite kernels are metrics") {
    const NDKernel cases[] = {power_distance(Space::sphere(2), 0.5), power_distance(Space::circle(), 1.0),
                              power_distance(Space::interval_mixed(), 1.0),
                              psi_from_pd(KernelSpec::sphere_arcsin_bm(2))};
    for (const NDKernel& psi : cases) {
      const PointSet p = sample_uniform(psi.space, 3000, 4);
      for (std::size_t t = 0; t < 1000; ++t) {
        const auto a = p[3 * t], b = p[3 * t + 1], c = p[3 * t + 2];
        CHECK(std::sqrt(psi(a, c)) <= std::sqrt(psi(a, b)) + std::sqrt(psi(b, c)) + 1e-12);
      }
    }
  }

  TEST_CASE("vanishing psi means a constant kernel") {
    const KernelSpec c = KernelSpec::derived(
        Space::circle(), [](std::span<const double>, std::span<const double>) { return 0.75; },
        "const");
    const NDKernel psi = psi_from_pd(c);
    for (int i = 0; i < 40; ++i) {
      for (int j = 0; j < 40; ++j) {
        const double x[1] = {-1.0 + i / 20.0}, y[1] = {-1.0 + j / 20.0};
        CHECK(psi(x, y) == 0.0);
        CHECK(c(x, y) == 0.75);
      }
    }
  }
}

TEST_SUITE("littlewood-paley") {
  TEST_CASE("partition of unity and support") {
    for (const LPWindow w : {LPWindow(WindowShape::SmoothStep), LPWindow(WindowShape::CosineRamp)}) {
      const int jmax = 12;
      double worst = 0.0;
      for (int i = 0; i <= 100000; ++i) {
        const double lambda = std::ldexp(1.0, jmax) * i / 100000.0;
        double s = 0.0;
        std::vector<double> v(jmax + 1);
        for (int j = 0; j <= jmax; ++j) {
          v[j] = w(j, lambda);
          CHECK(v[j] >= 0.0);
          s += v[j];
        }
        worst = std::max(worst, std::fabs(s - 1.0));
        for (int j = 0; j <= jmax; ++j) {
          for (int k = j + 2; k <= jmax; ++k) CHECK(v[j] * v[k] == 0.0);
        }
        for (int j = 1; j <= jmax; ++j) {
          if (lambda >= std::ldexp(1.0, j - 1) && lambda <= std::ldexp(1.0, j)) {
            CHECK(v[j - 1] * v[j - 1] + v[j] * v[j] >= 0.5);
          }
        }
      }
      CHECK(worst <= 1e-12);
    }
  }

  TEST_CASE("window sums bracket band sums pointwise") {
    const KernelSpec kernels[] = {spectral_coefficients(KernelSpec::min_xy(), 1024),
                                  spectral_coefficients(KernelSpec::circle_fractional(0.5), 1024)};
    for (const KernelSpec& k : kernels) {
      const PointSet p = sample_uniform(k.space(), 64, 3);
      const LPWindow w;
      for (int j = 1; j <= 9; ++j) {
        const auto band = band_profile(k, j, p), next = band_profile(k, j + 1, p);
        const auto win = window_profile(k, j, w, p), prev = window_profile(k, j - 1, w, p);
        for (std::size_t i = 0; i < p.size(); ++i) {
          CHECK(win[i] <= band[i] + next[i] + 1e-14);
          CHECK(band[i] <= prev[i] + win[i] + 1e-14);
        }
      }
    }
  }

  TEST_CASE("window shape does not move the slope") {
    const KernelSpec k = spectral_coefficients(KernelSpec::min_xy(), 2048);
    std::vector<double> smooth, ramp;
    for (int j = 0; j <= 10; ++j) {
      smooth.push_back(window_sum(k, j, LPWindow(WindowShape::SmoothStep)));
      ramp.push_back(window_sum(k, j, LPWindow(WindowShape::CosineRamp)));
    }
    CHECK(std::fabs(fit_log2_decay(smooth, 3, 9) - fit_log2_decay(ramp, 3, 9)) <= 0.05);
    CHECK(fit_log2_decay(smooth, 3, 9) == doctest::Approx(1.0).epsilon(0.1));
  }

  TEST_CASE("fitted slope is scale invariant") {
    const KernelSpec k = spectral_coefficients(KernelSpec::circle_fractional(0.5), 2048);
    std::vector<double> scaled = k.nu();
    for (double& v : scaled) v *= 37.5;
    const KernelSpec c = KernelSpec::spectral(k.system(), scaled);
    for (auto d : {Discretization::NetSup, Discretization::InvariantDiagonal}) {
      const double a = kbes_estimate(k, 10, 3, 9, {d, 1}).fitted_s;
      const double b = kbes_estimate(c, 10, 3, 9, {d, 1}).fitted_s;
      CHECK(std::fabs(a - b) <= 1e-10);
    }
  }

  TEST_CASE("nets are separated and maximal") {
    oracle::Mix rng(19);
    for (const Space& s : {Space::interval_mixed(), Space::circle(), Space::sphere(2)}) {
      for (int t = 0; t < 6; ++t) {
        const double delta = s.kind() == SpaceKind::Sphere ? rng.uniform(0.08, 0.6)
                                                           : rng.uniform(0.005, 0.4);
        const std::uint64_t seed = rng.next();
        const DeltaNet net = build_delta_net(s, delta, 0.0, seed);
        const PointSet grid = generator_grid(s, delta / 8, seed);
        for (std::size_t a = 0; a < net.points.size(); ++a) {
          for (std::size_t b = a + 1; b < net.points.size(); ++b) {
            CHECK(s.metric_unchecked(net.points.data(a), net.points.data(b)) >= delta - 1e-12);
          }
        }
        for (std::size_t g = 0; g < grid.size(); ++g) {
          double best = 1e300;
          for (std::size_t a = 0; a < net.points.size(); ++a) {
            best = std::min(best, s.metric_unchecked(grid.data(g), net.points.data(a)));
          }
          CHECK(best < delta);
        }
      }
    }
  }
}

TEST_SUITE("simulation") {
  TEST_CASE("marginals are Gaussian") {
    SimConfig c;
    c.kernel = spectral_coefficients(KernelSpec::circle_brownian(), 256);
    c.j_max = 7;
    c.n_paths = 8192;
    c.seed = 2024;
    c.store_bands = false;
    c.points = PointSet(1, {-0.5, 0.1, 0.8});
    const PathEnsemble e = sample_paths(c);
    for (std::size_t i = 0; i < e.n_points; ++i) {
      std::vector<double> v(e.n_paths);
      for (std::size_t p = 0; p < e.n_paths; ++p) v[p] = e.full(p, i);
      const SampleMoments m = sample_moments(v);
      double m4 = 0.0;
      for (double x : v) m4 += std::pow(x - m.mean, 4);
      m4 /= static_cast<double>(v.size());
      const double kurt = m4 / std::pow(m.variance, 2);
      CHECK(std::fabs(kurt - 3.0) <= 0.25);
    }
  }

  TEST_CASE("band cross-covariances match the analytic values") {
    SimConfig c;
    c.kernel = spectral_coefficients(KernelSpec::circle_fractional(0.5), 256);
    c.j_max = 7;
    c.n_paths = 8192;
    c.seed = 99;
    c.points = PointSet(1, {-0.9, -0.2, 0.05, 0.6});
    const PathEnsemble e = sample_paths(c);
    oracle::Mix rng(1);
    for (int t = 0; t < 12; ++t) {
      const auto j = static_cast<std::size_t>(rng.next() % 8);
      const auto j2 = static_cast<std::size_t>(std::clamp<long>(static_cast<long>(j) + static_cast<long>(rng.next() % 3) - 1, 0, 7));
      const auto a = static_cast<std::size_t>(rng.next() % 4), b = static_cast<std::size_t>(rng.next() % 4);
      std::vector<double> prod(e.n_paths);
      for (std::size_t p = 0; p < e.n_paths; ++p) prod[p] = e.band(p, j, a) * e.band(p, j2, b);
      const SampleMoments m = sample_moments(prod);
      const double target = sampled_covariance(c.kernel, c.window, c.j_max, static_cast<int>(j),
                                               static_cast<int>(j2), c.points[a], c.points[b]);
      CHECK(std::fabs(m.mean - target) <= 4 * m.standard_error + 1e-15);
    }
  }

  TEST_CASE("white noise shows no decay") {
    const EigenSystem sys = build_circle(200);
    std::vector<double> nu(sys.size(), 0.5);
    SimConfig c;
    c.kernel = KernelSpec::spectral(sys, nu);
    c.j_max = 8;
    c.n_paths = 64;
    c.seed = 3;
    c.store_bands = false;
    c.points = build_delta_net(Space::circle(), std::ldexp(1.0, -8), 0.0, 1).points;
    const RegularityReport r = regularity_estimate(sample_paths(c), 2, 8, false, 1.0);
    CHECK(r.fitted_alpha_raw <= 0.0);
  }
}
