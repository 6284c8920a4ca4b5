#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gpd/kernels.hpp"
#include "gpd/spaces.hpp"

namespace gpd {

enum class WindowShape {
  SmoothStep,  // h(t) = g(1-t) / (g(t) + g(1-t)), g(t) = exp(-1/t)
  CosineRamp,  // h(t) = (1 + cos(pi t)) / 2, only C^1; used to show shape independence
};

/// Dyadic windows Psi_0 = Phi, Psi_j(lambda) = Phi(2^-j lambda) -
/// Phi(2^{1-j} lambda), with Phi = 1 on [0, 1], h(lambda - 1) on [1, 2] and 0
/// beyond. They telescope to a partition of unity.
class LPWindow {
 public:
  explicit LPWindow(WindowShape shape = WindowShape::SmoothStep) : shape_(shape) {}

  WindowShape shape() const noexcept { return shape_; }
  double transition(double t) const;
  double phi(double lambda) const;
  double operator()(int j, double lambda) const;

 private:
  WindowShape shape_;
};

/// Psi_j(lambda) with the default smooth step.
double window_eval(int j, double lambda);

/// Hard band membership: j = 0 is sqrt_lambda <= 1, j >= 1 is
/// 2^{j-1} < sqrt_lambda <= 2^j.
bool in_band(int j, double sqrt_lambda);

struct DeltaNet {
  Space space = Space::circle();
  double delta = 0.0;
  PointSet points;
  std::size_t grid_size = 0;
};

/// Generator grid for nets: uniform 1-D grids including both ends of the
/// interval, a Fibonacci lattice on S^2 and seeded uniform points on S^d.
/// Throws ConfigError beyond kMaxGridPoints.
inline constexpr std::size_t kMaxGridPoints = 4'000'000;
PointSet generator_grid(const Space& space, double spacing, std::uint64_t seed);

/// Greedy maximal delta-net over a generator grid of the given spacing
/// (0 selects delta / 8). Interval/circle grids are uniform and swept from a
/// seeded offset; S^2 uses a shuffled Fibonacci lattice, S^d (d > 2) seeded
/// uniform points. Throws ConfigError when spacing > delta / 4.
DeltaNet build_delta_net(const Space& space, double delta, double grid_spacing,
                         std::uint64_t seed);

enum class Discretization { NetSup, GridSup, InvariantDiagonal };
std::string to_string(Discretization d);
Discretization parse_discretization(const std::string& text);

struct BandOptions {
  Discretization discretization = Discretization::NetSup;
  std::uint64_t seed = 0;
};

/// Evaluation set of one band: the 2^-j net, its generator grid, or one
/// point for the invariant diagonal.
PointSet band_evaluation_set(const Space& space, int j, const BandOptions& options);

/// Per-point band and window sums on `points`.
std::vector<double> band_profile(const KernelSpec& spectral, int j,
                                 const PointSet& points);
std::vector<double> window_profile(const KernelSpec& spectral, int j,
                                   const LPWindow& window, const PointSet& points);

/// S_j = sup_x sum_{k in band j} nu_k * diag_k(x) over the evaluation set.
/// Throws TruncationError when the kernel does not cover sqrt_lambda <= 2^j.
double band_sum(const KernelSpec& spectral, int j, const BandOptions& options = {});

/// sup_x sum_k Psi_j(sqrt_lambda_k) nu_k diag_k(x) over the same evaluation
/// set as band_sum.
double window_sum(const KernelSpec& spectral, int j, const LPWindow& window,
                  const BandOptions& options = {});

struct BandReport {
  std::vector<double> band_sums;
  double fitted_s = 0.0;
  int fit_lo = 0;
  int fit_hi = 0;
  double fit_residual = 0.0;
  Discretization discretization = Discretization::NetSup;
};

/// S_0..S_{j_max} and fitted_s = -slope of log2 S_j on j over [fit_lo,
/// fit_hi]. Requires j_max >= fit_hi >= fit_lo + 2.
BandReport kbes_estimate(const KernelSpec& spectral, int j_max, int fit_lo,
                         int fit_hi, const BandOptions& options = {});

/// Fit -slope of log2 values[j] over [lo, hi]; throws DegenerateFitError on
/// a non-positive value inside the range.
double fit_log2_decay(const std::vector<double>& values, int lo, int hi,
                      double* residual = nullptr);

struct DppResult {
  double net_max = 0.0;
  double probe_sup = 0.0;
  std::size_t net_size = 0;
};

/// H = kernel truncated to sqrt_lambda <= 2^j. net_max is max H(xi, xi) over
/// the 2^-j net; probe_sup is the sup of H(x, x) (= sup |H(x, y)|) over
/// n_probe random points together with the net.
DppResult dpp_check(const KernelSpec& spectral, int j, std::size_t n_probe,
                    std::uint64_t seed = 0);

}  // namespace gpd
