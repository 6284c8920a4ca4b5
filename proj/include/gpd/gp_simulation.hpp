#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpd/kernels.hpp"
#include "gpd/littlewood_paley.hpp"
#include "gpd/spaces.hpp"

namespace gpd {

struct SimConfig {
  KernelSpec kernel;  // spectral form
  int j_max = 8;
  std::size_t n_paths = 256;
  std::uint64_t seed = 0;
  PointSet points;
  // Keep every band component; when false only per-band maxima survive.
  bool store_bands = true;
  LPWindow window{};
  // When set (the closed form of `kernel`), sampling is joint and the top
  // band j_max absorbs every frequency above 2^{j_max - 1}, its covariance
  // completed from the closed form. Full values then follow the untruncated
  // law exactly.
  std::optional<KernelSpec> closed_form;
};

/// Gaussian paths Z = sum_k sqrt(nu_k) u_k B_k restricted to sqrt_lambda <=
/// 2^j_max, split into windowed bands j = 0..j_max that sum back to Z.
struct PathEnsemble {
  std::size_t n_paths = 0;
  std::size_t n_bands = 0;
  std::size_t n_points = 0;
  std::vector<double> band_components;  // [path][band][point], may be empty
  std::vector<double> full_values;      // [path][point]
  std::vector<double> band_max;         // [path][band], max over points of |band|
  PointSet points;
  Space space = Space::circle();
  std::string kernel_label;
  int j_max = 0;
  std::uint64_t seed = 0;

  bool has_bands() const noexcept { return !band_components.empty(); }
  double band(std::size_t path, std::size_t j, std::size_t point) const {
    return band_components[(path * n_bands + j) * n_points + point];
  }
  double full(std::size_t path, std::size_t point) const {
    return full_values[path * n_points + point];
  }
  double max_abs(std::size_t path, std::size_t j) const {
    return band_max[path * n_bands + j];
  }
};

/// Interval/circle: i.i.d. Karhunen-Loeve coefficients keyed by (seed, path,
/// component). Spheres, or any space with closed_form set: exact joint
/// Gaussian of the stacked band vector by a symmetric eigendecomposition
/// (NumericError if min eig < -1e-6 * trace).
PathEnsemble sample_paths(const SimConfig& config);

/// Direct Karhunen-Loeve values [path][point] with the same coefficients as
/// sample_paths (interval/circle only).
std::vector<double> kl_direct(const SimConfig& config);

/// The sampled covariance: sum over sqrt_lambda <= 2^j_max of
/// Psi_j Psi_j' nu_k addition_k(x, y); a negative band index means "no window".
double sampled_covariance(const KernelSpec& spectral, const LPWindow& window,
                          int j_max, int j, int j2, std::span<const double> x,
                          std::span<const double> y);

struct StructureRow {
  std::size_t i = 0, k = 0;
  double distance = 0.0;
  double mean = 0.0;
  double standard_error = 0.0;  // sample standard error of the mean
  double psi = 0.0;
  // psi * sqrt(2 / n): exact standard error of the mean under the hypothesis,
  // since Z_x - Z_y is Gaussian and Var (Z_x - Z_y)^2 = 2 psi^2.
  double null_standard_error = 0.0;
  bool flagged = false;  // |mean - psi| > 3 null_standard_error
};

/// Monte Carlo E(Z_x - Z_y)^2 for index pairs into ensemble.points. The
/// flag uses the null standard error: the sample one is correlated with the
/// sample mean of a chi-square variable, which skews the ratio to the left.
std::vector<StructureRow> structure_function_check(
    const PathEnsemble& ensemble,
    std::span<const std::pair<std::size_t, std::size_t>> pairs,
    const PointFunction& psi);

struct RegularityReport {
  std::vector<double> e;                // E_j
  std::vector<double> standard_errors;  // of E_j
  std::vector<double> e_corrected;      // E_j / sqrt(1 + j d ln 2)
  double fitted_alpha_raw = 0.0;
  double fitted_alpha_corrected = 0.0;
  double fitted_alpha = 0.0;  // corrected when requested, else raw
  bool pisier_corrected = false;
  int fit_lo = 0, fit_hi = 0;
  double fit_residual = 0.0;
  std::size_t n_paths = 0;
};

/// E_j = mean over paths of max over points |band j|; fitted_alpha = -slope
/// of log2 E_j. Requires three positive bands in [fit_lo, fit_hi].
RegularityReport regularity_estimate(const PathEnsemble& ensemble, int fit_lo,
                                     int fit_hi, bool pisier_correct,
                                     double doubling_dim);

/// Same from a [path][band] table of maxima.
RegularityReport regularity_from_maxima(std::span<const double> band_max,
                                        std::size_t n_paths, std::size_t n_bands,
                                        int fit_lo, int fit_hi, bool pisier_correct,
                                        double doubling_dim);

/// sum_j 2^{j alpha} * band_max[j], the discrete B^alpha_{inf,1} proxy.
double besov_norm_of_path(std::span<const double> band_max, double alpha);

}  // namespace gpd
