#include "gpd/gp_simulation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "gpd/error.hpp"
#include "gpd/parallel.hpp"
#include "gpd/rng.hpp"
#include "gpd/stats.hpp"

namespace gpd {

namespace {

constexpr std::size_t kPathBlock = 64;
constexpr std::size_t kMaxJointDimension = 6000;

struct BandRange {
  Eigen::Index first = 0;
  Eigen::Index count = 0;
};

void validate_config(const SimConfig& config) {
  if (config.n_paths < 1) throw ConfigError("n_paths must be >= 1");
  if (config.j_max < 0) throw ConfigError("j_max must be >= 0");
  if (config.points.empty()) throw ConfigError("no evaluation points");
  const KernelSpec& k = config.kernel;
  if (k.form() != KernelSpec::Form::Spectral) {
    throw ConfigError("simulation needs a spectral kernel");
  }
  if (config.points.coords() != k.space().coords()) {
    throw ConfigError("evaluation points do not belong to the kernel's space");
  }
  for (std::size_t i = 0; i < config.points.size(); ++i) k.space().validate(config.points[i]);
  const double limit = std::ldexp(1.0, config.j_max);
  if (k.system().next_sqrt_lambda() <= limit) {
    throw TruncationError("kernel truncation does not cover band j_max = " +
                              std::to_string(config.j_max),
                          k.tail_bound());
  }
}

PathEnsemble empty_ensemble(const SimConfig& config) {
  PathEnsemble ens;
  ens.n_paths = config.n_paths;
  ens.n_bands = static_cast<std::size_t>(config.j_max) + 1;
  ens.n_points = config.points.size();
  ens.points = config.points;
  ens.space = config.kernel.space();
  ens.kernel_label = config.kernel.label();
  ens.j_max = config.j_max;
  ens.seed = config.seed;
  ens.full_values.assign(ens.n_paths * ens.n_points, 0.0);
  ens.band_max.assign(ens.n_paths * ens.n_bands, 0.0);
  if (config.store_bands) {
    ens.band_components.assign(ens.n_paths * ens.n_bands * ens.n_points, 0.0);
  }
  return ens;
}

// Copies one block of band values [point x path] into the ensemble.
void store_band(PathEnsemble& ens, std::size_t j, std::size_t first_path,
                const Eigen::MatrixXd& values) {
  for (Eigen::Index b = 0; b < values.cols(); ++b) {
    const std::size_t path = first_path + static_cast<std::size_t>(b);
    double m = 0.0;
    for (Eigen::Index i = 0; i < values.rows(); ++i) m = std::max(m, std::abs(values(i, b)));
    ens.band_max[path * ens.n_bands + j] = m;
    if (ens.has_bands()) {
      double* dst = &ens.band_components[(path * ens.n_bands + j) * ens.n_points];
      for (Eigen::Index i = 0; i < values.rows(); ++i) dst[i] = values(i, b);
    }
  }
}

void store_full(PathEnsemble& ens, std::size_t first_path, const Eigen::MatrixXd& values) {
  for (Eigen::Index b = 0; b < values.cols(); ++b) {
    double* dst = &ens.full_values[(first_path + static_cast<std::size_t>(b)) * ens.n_points];
    for (Eigen::Index i = 0; i < values.rows(); ++i) dst[i] = values(i, b);
  }
}

// Standard normals keyed by (path, key / 2) so that a draw depends only on
// the seed, the path and the component.
void fill_normals(const CounterRng& rng, std::size_t first_path,
                  std::span<const std::uint32_t> keys, Eigen::MatrixXd& g) {
  for (Eigen::Index b = 0; b < g.cols(); ++b) {
    const std::uint64_t path = first_path + static_cast<std::size_t>(b);
    std::size_t r = 0;
    while (r < keys.size()) {
      const std::uint32_t pair = keys[r] / 2;
      const auto [z0, z1] = rng.normal2(path, pair);
      if (keys[r] % 2 == 0) {
        g(static_cast<Eigen::Index>(r), b) = z0;
        if (r + 1 < keys.size() && keys[r + 1] == keys[r] + 1) {
          g(static_cast<Eigen::Index>(r + 1), b) = z1;
          ++r;
        }
      } else {
        g(static_cast<Eigen::Index>(r), b) = z1;
      }
      ++r;
    }
  }
}

struct LineModel {
  Eigen::MatrixXd basis;  // [point x component], scaled by sqrt(nu)
  std::vector<std::uint32_t> keys;
  std::vector<double> sqrt_lambda;
};

LineModel line_model(const SimConfig& config) {
  const EigenSystem& sys = config.kernel.system();
  const auto& nu = config.kernel.nu();
  const double limit = std::ldexp(1.0, config.j_max);
  LineModel model;
  std::vector<std::size_t> comps;
  for (std::size_t c = 0; c < sys.basis_size(); ++c) {
    const std::size_t e = sys.component_entry(c);
    if (sys.entries()[e].sqrt_lambda <= limit && nu[e] > 0.0) {
      comps.push_back(c);
      model.keys.push_back(static_cast<std::uint32_t>(c));
      model.sqrt_lambda.push_back(sys.entries()[e].sqrt_lambda);
    }
  }
  const auto n = static_cast<Eigen::Index>(config.points.size());
  model.basis.resize(n, static_cast<Eigen::Index>(comps.size()));
  std::vector<double> row(sys.basis_size());
  for (Eigen::Index i = 0; i < n; ++i) {
    sys.basis_row(config.points[static_cast<std::size_t>(i)][0], row);
    for (std::size_t col = 0; col < comps.size(); ++col) {
      const std::size_t c = comps[col];
      model.basis(i, static_cast<Eigen::Index>(col)) =
          std::sqrt(nu[sys.component_entry(c)]) * row[c];
    }
  }
  return model;
}

PathEnsemble sample_line(const SimConfig& config) {
  PathEnsemble ens = empty_ensemble(config);
  const LineModel model = line_model(config);
  const auto m = static_cast<Eigen::Index>(model.keys.size());
  const auto n_bands = static_cast<int>(ens.n_bands);

  // Components are sorted by frequency, so each window covers a contiguous
  // column range.
  std::vector<BandRange> ranges(ens.n_bands);
  std::vector<Eigen::MatrixXd> band_basis(ens.n_bands);
  for (int j = 0; j < n_bands; ++j) {
    Eigen::Index first = m, last = -1;
    for (Eigen::Index col = 0; col < m; ++col) {
      if (config.window(j, model.sqrt_lambda[static_cast<std::size_t>(col)]) != 0.0) {
        first = std::min(first, col);
        last = col;
      }
    }
    if (last < first) continue;
    ranges[static_cast<std::size_t>(j)] = {first, last - first + 1};
    Eigen::MatrixXd u = model.basis.middleCols(first, last - first + 1);
    for (Eigen::Index col = 0; col < u.cols(); ++col) {
      u.col(col) *= config.window(j, model.sqrt_lambda[static_cast<std::size_t>(first + col)]);
    }
    band_basis[static_cast<std::size_t>(j)] = std::move(u);
  }

  const CounterRng rng(config.seed, Stream::KarhunenLoeve);
  const std::size_t n_blocks = (config.n_paths + kPathBlock - 1) / kPathBlock;
  const auto n_points = static_cast<Eigen::Index>(ens.n_points);
  parallel_for(n_blocks, [&](std::size_t block) {
    const std::size_t first_path = block * kPathBlock;
    const auto width = static_cast<Eigen::Index>(
        std::min(kPathBlock, config.n_paths - first_path));
    Eigen::MatrixXd g(m, width);
    fill_normals(rng, first_path, model.keys, g);
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n_points, width);
    for (int j = 0; j < n_bands; ++j) {
      const BandRange r = ranges[static_cast<std::size_t>(j)];
      Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n_points, width);
      if (r.count > 0) {
        values.noalias() = band_basis[static_cast<std::size_t>(j)] * g.middleRows(r.first, r.count);
      }
      full += values;
      store_band(ens, static_cast<std::size_t>(j), first_path, values);
    }
    store_full(ens, first_path, full);
  });
  return ens;
}

PathEnsemble sample_joint(const SimConfig& config) {
  PathEnsemble ens = empty_ensemble(config);
  const EigenSystem& sys = config.kernel.system();
  const auto& nu = config.kernel.nu();
  const double limit = std::ldexp(1.0, config.j_max);
  const std::size_t n = ens.n_points;
  const std::size_t bands = ens.n_bands;
  const std::size_t dim = n * bands;
  if (dim > kMaxJointDimension) {
    throw ConfigError("joint sampling of " + std::to_string(dim) +
                      " band values exceeds the supported " +
                      std::to_string(kMaxJointDimension) + "; use fewer points or bands");
  }
  const KernelSpec* closed = config.closed_form ? &*config.closed_form : nullptr;
  if (closed && !(closed->space() == config.kernel.space())) {
    throw ConfigError("closed form and spectral kernel live on different spaces");
  }

  // weights[j][k] = Psi_j(sqrt_lambda_k), zero beyond the truncation. With a
  // closed form the top band is 1 - Phi(2^{1-J} sqrt_lambda) instead.
  std::vector<std::vector<double>> weights(bands, std::vector<double>(sys.size(), 0.0));
  for (std::size_t j = 0; j < bands; ++j) {
    for (std::size_t k = 0; k < sys.size(); ++k) {
      const double s = sys.entries()[k].sqrt_lambda;
      if (s > limit || nu[k] <= 0.0) continue;
      if (closed && j + 1 == bands) {
        weights[j][k] = j == 0 ? 1.0 : 1.0 - config.window.phi(std::ldexp(s, 1 - config.j_max));
      } else {
        weights[j][k] = config.window(static_cast<int>(j), s);
      }
    }
  }

  // Stacked index (j, i) -> j * n + i.
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(dim));
  std::vector<double> add(sys.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t i2 = i; i2 < n; ++i2) {
      sys.cross_values(config.points[i], config.points[i2], add);
      for (std::size_t k = 0; k < add.size(); ++k) add[k] *= nu[k];
      for (std::size_t j = 0; j < bands; ++j) {
        for (std::size_t j2 = j; j2 < std::min(bands, j + 2); ++j2) {
          double s = 0.0;
          if (closed && j + 1 == bands) {
            // Complement of the finitely supported part 1 - w_T^2.
            s = closed->evaluate(config.points[i], config.points[i2]);
            for (std::size_t k = 0; k < add.size(); ++k) {
              const double w = weights[j][k];
              if (sys.entries()[k].sqrt_lambda <= limit) s -= (1.0 - w * w) * add[k];
            }
          } else {
            for (std::size_t k = 0; k < add.size(); ++k) {
              s += weights[j][k] * weights[j2][k] * add[k];
            }
          }
          const auto a = static_cast<Eigen::Index>(j * n + i);
          const auto b = static_cast<Eigen::Index>(j2 * n + i2);
          cov(a, b) = s;
          cov(b, a) = s;
          const auto a2 = static_cast<Eigen::Index>(j * n + i2);
          const auto b2 = static_cast<Eigen::Index>(j2 * n + i);
          cov(a2, b2) = s;
          cov(b2, a2) = s;
        }
      }
    }
  }

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericError("covariance eigensolve failed");
  const double trace = cov.trace();
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig < -1e-6 * trace) {
    throw NumericError("band covariance has eigenvalue " + std::to_string(min_eig) +
                       " below -1e-6 * trace");
  }
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd factor = eig.eigenvectors() * root.asDiagonal();

  std::vector<std::uint32_t> keys(dim);
  for (std::size_t r = 0; r < dim; ++r) keys[r] = static_cast<std::uint32_t>(r);
  const CounterRng rng(config.seed, Stream::JointGaussian);
  const std::size_t n_blocks = (config.n_paths + kPathBlock - 1) / kPathBlock;
  parallel_for(n_blocks, [&](std::size_t block) {
    const std::size_t first_path = block * kPathBlock;
    const auto width = static_cast<Eigen::Index>(
        std::min(kPathBlock, config.n_paths - first_path));
    Eigen::MatrixXd g(static_cast<Eigen::Index>(dim), width);
    fill_normals(rng, first_path, keys, g);
    const Eigen::MatrixXd stacked = factor * g;
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), width);
    for (std::size_t j = 0; j < bands; ++j) {
      const Eigen::MatrixXd values =
          stacked.middleRows(static_cast<Eigen::Index>(j * n), static_cast<Eigen::Index>(n));
      full += values;
      store_band(ens, j, first_path, values);
    }
    store_full(ens, first_path, full);
  });
  return ens;
}

}  // namespace

PathEnsemble sample_paths(const SimConfig& config) {
  validate_config(config);
  if (config.kernel.space().kind() == SpaceKind::Sphere || config.closed_form) {
    return sample_joint(config);
  }
  return sample_line(config);
}

std::vector<double> kl_direct(const SimConfig& config) {
  validate_config(config);
  if (!config.kernel.system().has_basis()) {
    throw ConfigError("direct Karhunen-Loeve evaluation needs an explicit basis");
  }
  const LineModel model = line_model(config);
  const auto m = static_cast<Eigen::Index>(model.keys.size());
  const std::size_t n = config.points.size();
  std::vector<double> out(config.n_paths * n, 0.0);
  const CounterRng rng(config.seed, Stream::KarhunenLoeve);
  Eigen::MatrixXd g(m, 1);
  for (std::size_t p = 0; p < config.n_paths; ++p) {
    fill_normals(rng, p, model.keys, g);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (Eigen::Index c = 0; c < m; ++c) {
        s += model.basis(static_cast<Eigen::Index>(i), c) * g(c, 0);
      }
      out[p * n + i] = s;
    }
  }
  return out;
}

double sampled_covariance(const KernelSpec& spectral, const LPWindow& window,
                          int j_max, int j, int j2, std::span<const double> x,
                          std::span<const double> y) {
  const EigenSystem& sys = spectral.system();
  const auto& nu = spectral.nu();
  const double limit = std::ldexp(1.0, j_max);
  std::vector<double> add(sys.size());
  sys.cross_values(x, y, add);
  double s = 0.0;
  for (std::size_t k = 0; k < sys.size(); ++k) {
    const double lam = sys.entries()[k].sqrt_lambda;
    if (lam > limit) continue;
    const double w1 = j < 0 ? 1.0 : window(j, lam);
    const double w2 = j2 < 0 ? 1.0 : window(j2, lam);
    s += w1 * w2 * nu[k] * add[k];
  }
  return s;
}

std::vector<StructureRow> structure_function_check(
    const PathEnsemble& ensemble,
    std::span<const std::pair<std::size_t, std::size_t>> pairs,
    const PointFunction& psi) {
  std::vector<StructureRow> rows;
  std::vector<double> sq(ensemble.n_paths);
  for (const auto& [i, k] : pairs) {
    if (i >= ensemble.n_points || k >= ensemble.n_points) {
      throw ContractError("structure pair outside the evaluation points");
    }
    for (std::size_t p = 0; p < ensemble.n_paths; ++p) {
      const double d = ensemble.full(p, i) - ensemble.full(p, k);
      sq[p] = d * d;
    }
    const SampleMoments mom = sample_moments(sq);
    StructureRow row;
    row.i = i;
    row.k = k;
    row.distance = ensemble.space.metric(ensemble.points[i], ensemble.points[k]);
    row.mean = mom.mean;
    row.standard_error = mom.standard_error;
    row.psi = psi(ensemble.points[i], ensemble.points[k]);
    row.null_standard_error =
        std::abs(row.psi) * std::sqrt(2.0 / static_cast<double>(ensemble.n_paths));
    const double gap = std::abs(row.mean - row.psi);
    row.flagged = row.null_standard_error > 0.0 ? gap > 3.0 * row.null_standard_error
                                                : gap > 1e-12;
    rows.push_back(row);
  }
  return rows;
}

RegularityReport regularity_from_maxima(std::span<const double> band_max,
                                        std::size_t n_paths, std::size_t n_bands,
                                        int fit_lo, int fit_hi, bool pisier_correct,
                                        double doubling_dim) {
  if (band_max.size() != n_paths * n_bands || n_paths == 0) {
    throw ContractError("band maxima table has the wrong shape");
  }
  if (fit_lo < 0 || fit_hi < fit_lo || static_cast<std::size_t>(fit_hi) >= n_bands) {
    throw ConfigError("fit range outside the sampled bands");
  }
  RegularityReport rep;
  rep.n_paths = n_paths;
  rep.fit_lo = fit_lo;
  rep.fit_hi = fit_hi;
  rep.pisier_corrected = pisier_correct;
  std::vector<double> column(n_paths);
  for (std::size_t j = 0; j < n_bands; ++j) {
    for (std::size_t p = 0; p < n_paths; ++p) column[p] = band_max[p * n_bands + j];
    const SampleMoments mom = sample_moments(column);
    rep.e.push_back(mom.mean);
    rep.standard_errors.push_back(mom.standard_error);
    rep.e_corrected.push_back(
        mom.mean / std::sqrt(1.0 + static_cast<double>(j) * doubling_dim * std::numbers::ln2));
  }

  std::vector<double> x, raw, corrected;
  for (int j = fit_lo; j <= fit_hi; ++j) {
    const double v = rep.e[static_cast<std::size_t>(j)];
    if (!(v > 0.0)) continue;
    x.push_back(j);
    raw.push_back(std::log2(v));
    corrected.push_back(std::log2(rep.e_corrected[static_cast<std::size_t>(j)]));
  }
  if (x.size() < 3) {
    throw DegenerateFitError("fewer than 3 usable bands in the fit range");
  }
  const LinearFit fit_raw = linear_fit(x, raw);
  const LinearFit fit_corr = linear_fit(x, corrected);
  rep.fitted_alpha_raw = -fit_raw.slope;
  rep.fitted_alpha_corrected = -fit_corr.slope;
  rep.fitted_alpha = pisier_correct ? rep.fitted_alpha_corrected : rep.fitted_alpha_raw;
  rep.fit_residual = pisier_correct ? fit_corr.residual : fit_raw.residual;
  return rep;
}

RegularityReport regularity_estimate(const PathEnsemble& ensemble, int fit_lo,
                                     int fit_hi, bool pisier_correct,
                                     double doubling_dim) {
  return regularity_from_maxima(ensemble.band_max, ensemble.n_paths, ensemble.n_bands,
                                fit_lo, fit_hi, pisier_correct, doubling_dim);
}

double besov_norm_of_path(std::span<const double> band_max, double alpha) {
  double s = 0.0;
  for (std::size_t j = 0; j < band_max.size(); ++j) {
    s += std::pow(2.0, alpha * static_cast<double>(j)) * band_max[j];
  }
  return s;
}

}  // namespace gpd
