#include "gpd/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <unordered_map>

#include "gpd/error.hpp"
#include "gpd/rng.hpp"
#include "gpd/special_functions.hpp"
#include "gpd/stats.hpp"

namespace gpd {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSeparationSlack = 1e-12;

double mollifier_g(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double band_upper(int j) { return std::ldexp(1.0, j); }

void require_cover(const KernelSpec& spectral, double limit) {
  if (spectral.form() != KernelSpec::Form::Spectral) {
    throw ContractError("band sums need a spectral kernel");
  }
  if (spectral.system().next_sqrt_lambda() <= limit) {
    throw TruncationError("kernel truncation does not cover sqrt_lambda <= " +
                              std::to_string(limit) + "; raise k_max",
                          spectral.tail_bound());
  }
}

// Greedy acceptance on 1-D spaces: an ordered set answers the nearest
// accepted neighbour in O(log n).
class LineAcceptor {
 public:
  LineAcceptor(const Space& space, double delta)
      : circle_(space.kind() == SpaceKind::Circle), delta_(delta) {}

  bool try_accept(double x) {
    if (!accepted_.empty()) {
      auto hi = accepted_.lower_bound(x);
      if (hi != accepted_.end() && !far(x, *hi)) return false;
      if (hi != accepted_.begin() && !far(x, *std::prev(hi))) return false;
      if (circle_) {
        if (!far(x, *accepted_.begin()) || !far(x, *accepted_.rbegin())) return false;
      }
    }
    accepted_.insert(x);
    return true;
  }

 private:
  bool far(double x, double y) const {
    double d = std::abs(x - y);
    if (circle_) d = std::min(d, 2.0 - d);
    return d >= delta_ - kSeparationSlack;
  }

  bool circle_;
  double delta_;
  std::set<double> accepted_;
};

// Greedy acceptance on spheres with a uniform hash over the ambient cube.
class SphereAcceptor {
 public:
  SphereAcceptor(const Space& space, double delta) : space_(space), delta_(delta) {
    const double capped = std::min(delta, kPi);
    cell_ = std::max(2.0 * std::sin(capped / 2.0), 1e-9);
    coords_ = space.coords();
  }

  bool try_accept(const double* x) {
    std::vector<std::int64_t> cell(static_cast<std::size_t>(coords_));
    for (int i = 0; i < coords_; ++i) {
      cell[static_cast<std::size_t>(i)] =
          static_cast<std::int64_t>(std::floor((x[i] + 1.0) / cell_));
    }
    std::vector<std::int64_t> probe(cell.size());
    const int combos = static_cast<int>(std::pow(3, coords_));
    for (int c = 0; c < combos; ++c) {
      int rest = c;
      for (std::size_t i = 0; i < cell.size(); ++i) {
        probe[i] = cell[i] + (rest % 3) - 1;
        rest /= 3;
      }
      const auto it = buckets_.find(key(probe));
      if (it == buckets_.end()) continue;
      for (std::size_t idx : it->second) {
        if (space_.metric_unchecked(x, points_.data() + idx * coords_) <
            delta_ - kSeparationSlack) {
          return false;
        }
      }
    }
    const std::size_t idx = points_.size() / static_cast<std::size_t>(coords_);
    points_.insert(points_.end(), x, x + coords_);
    buckets_[key(cell)].push_back(idx);
    return true;
  }

 private:
  static std::uint64_t key(const std::vector<std::int64_t>& cell) {
    std::uint64_t h = 0x9E3779B97F4A7C15ull;
    for (std::int64_t v : cell) {
      std::uint64_t z = static_cast<std::uint64_t>(v) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
      h ^= z ^ (z >> 31);
    }
    return h;
  }

  const Space& space_;
  double delta_;
  double cell_;
  int coords_;
  std::vector<double> points_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

}  // namespace

double LPWindow::transition(double t) const {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  if (shape_ == WindowShape::CosineRamp) return 0.5 * (1.0 + std::cos(kPi * t));
  const double a = mollifier_g(1.0 - t);
  const double b = mollifier_g(t);
  return a / (a + b);
}

double LPWindow::phi(double lambda) const {
  if (lambda <= 1.0) return 1.0;
  if (lambda >= 2.0) return 0.0;
  return transition(lambda - 1.0);
}

double LPWindow::operator()(int j, double lambda) const {
  if (j < 0) throw DomainError("band index must be >= 0");
  if (j == 0) return phi(lambda);
  return phi(std::ldexp(lambda, -j)) - phi(std::ldexp(lambda, 1 - j));
}

double window_eval(int j, double lambda) {
  if (lambda < 0.0) throw DomainError("window_eval: lambda must be >= 0");
  static const LPWindow window;
  return window(j, lambda);
}

bool in_band(int j, double sqrt_lambda) {
  if (j == 0) return sqrt_lambda <= 1.0;
  return sqrt_lambda > band_upper(j - 1) && sqrt_lambda <= band_upper(j);
}

PointSet generator_grid(const Space& space, double spacing, std::uint64_t seed) {
  if (!(spacing > 0.0)) throw ConfigError("grid spacing must be > 0");
  PointSet grid(space.coords());
  auto check_size = [](double n) {
    if (n > static_cast<double>(kMaxGridPoints)) {
      throw ConfigError("generator grid would hold " +
                        std::to_string(static_cast<long long>(n)) +
                        " points; use a coarser delta or the invariant diagonal");
    }
  };
  switch (space.kind()) {
    case SpaceKind::IntervalMixed:
    case SpaceKind::IntervalNeumann: {
      const double n = std::ceil(1.0 / spacing);
      check_size(n + 1);
      const auto cells = static_cast<std::size_t>(n);
      grid.reserve(cells + 1);
      for (std::size_t i = 0; i <= cells; ++i) {
        const double x = static_cast<double>(i) / n;
        grid.push_back(std::span<const double>(&x, 1));
      }
      return grid;
    }
    case SpaceKind::Circle: {
      const double n = std::ceil(2.0 / spacing);
      check_size(n);
      const auto cells = static_cast<std::size_t>(n);
      grid.reserve(cells);
      for (std::size_t i = 0; i < cells; ++i) {
        const double x = -1.0 + 2.0 * static_cast<double>(i) / n;
        grid.push_back(std::span<const double>(&x, 1));
      }
      return grid;
    }
    case SpaceKind::Sphere: {
      const double n = std::ceil(space.total_measure() / std::pow(spacing, space.dim()));
      check_size(n);
      if (space.dim() == 2) return fibonacci_sphere(static_cast<std::size_t>(n));
      return sample_uniform(space, static_cast<std::size_t>(n), seed);
    }
  }
  return grid;
}

DeltaNet build_delta_net(const Space& space, double delta, double grid_spacing,
                         std::uint64_t seed) {
  if (!(delta > 0.0)) throw DomainError("delta must be > 0");
  if (grid_spacing == 0.0) grid_spacing = delta / 8.0;
  if (grid_spacing > delta / 4.0) {
    throw ConfigError("generator grid spacing " + std::to_string(grid_spacing) +
                      " is coarser than delta / 4");
  }
  const PointSet grid = generator_grid(space, grid_spacing, seed);
  const std::size_t n = grid.size();
  const CounterRng rng(seed, Stream::NetShuffle);

  DeltaNet net;
  net.space = space;
  net.delta = delta;
  net.grid_size = n;
  net.points = PointSet(space.coords());

  if (space.kind() != SpaceKind::Sphere) {
    // Sweep the grid cyclically from a seeded offset.
    const auto offset =
        std::min(n - 1, static_cast<std::size_t>(rng.uniform(0, 0) * static_cast<double>(n)));
    LineAcceptor acceptor(space, delta);
    for (std::size_t t = 0; t < n; ++t) {
      const double x = grid[(offset + t) % n][0];
      if (acceptor.try_accept(x)) net.points.push_back(std::span<const double>(&x, 1));
    }
    return net;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const auto r = static_cast<std::size_t>(rng.uniform(i, 1) * static_cast<double>(i));
    std::swap(order[i - 1], order[std::min(r, i - 1)]);
  }
  SphereAcceptor acceptor(space, delta);
  for (std::size_t idx : order) {
    if (acceptor.try_accept(grid.data(idx))) net.points.push_back(grid[idx]);
  }
  return net;
}

std::string to_string(Discretization d) {
  switch (d) {
    case Discretization::NetSup: return "net";
    case Discretization::GridSup: return "grid";
    case Discretization::InvariantDiagonal: return "diag";
  }
  return "?";
}

Discretization parse_discretization(const std::string& text) {
  if (text == "net") return Discretization::NetSup;
  if (text == "grid") return Discretization::GridSup;
  if (text == "diag") return Discretization::InvariantDiagonal;
  throw ConfigError("unknown discretization '" + text + "' (net|grid|diag)");
}

PointSet band_evaluation_set(const Space& space, int j, const BandOptions& options) {
  if (j < 0) throw DomainError("band index must be >= 0");
  const double delta = std::ldexp(1.0, -j);
  switch (options.discretization) {
    case Discretization::NetSup:
      return build_delta_net(space, delta, 0.0, options.seed).points;
    case Discretization::GridSup:
      return generator_grid(space, delta / 8.0, options.seed);
    case Discretization::InvariantDiagonal: {
      if (!space.homogeneous()) {
        throw ConfigError("the invariant diagonal needs the circle or a sphere");
      }
      PointSet one(space.coords());
      std::vector<double> base(static_cast<std::size_t>(space.coords()), 0.0);
      base.back() = space.kind() == SpaceKind::Sphere ? 1.0 : 0.0;
      one.push_back(base);
      return one;
    }
  }
  return PointSet(space.coords());
}

std::vector<double> band_profile(const KernelSpec& spectral, int j,
                                 const PointSet& points) {
  require_cover(spectral, band_upper(j));
  const EigenSystem& sys = spectral.system();
  const auto& nu = spectral.nu();
  std::vector<std::size_t> members;
  for (std::size_t e = 0; e < sys.size(); ++e) {
    if (in_band(j, sys.entries()[e].sqrt_lambda) && nu[e] != 0.0) members.push_back(e);
  }
  std::vector<double> out(points.size(), 0.0);
  for (std::size_t p = 0; p < points.size(); ++p) {
    double s = 0.0;
    for (std::size_t e : members) s += nu[e] * sys.diagonal_entry(e, points.data(p));
    out[p] = s;
  }
  return out;
}

std::vector<double> window_profile(const KernelSpec& spectral, int j,
                                   const LPWindow& window, const PointSet& points) {
  require_cover(spectral, band_upper(j + 1));
  const EigenSystem& sys = spectral.system();
  const auto& nu = spectral.nu();
  std::vector<std::pair<std::size_t, double>> members;
  for (std::size_t e = 0; e < sys.size(); ++e) {
    const double w = window(j, sys.entries()[e].sqrt_lambda);
    if (w != 0.0 && nu[e] != 0.0) members.emplace_back(e, w * nu[e]);
  }
  std::vector<double> out(points.size(), 0.0);
  for (std::size_t p = 0; p < points.size(); ++p) {
    double s = 0.0;
    for (const auto& [e, weight] : members) s += weight * sys.diagonal_entry(e, points.data(p));
    out[p] = s;
  }
  return out;
}

double band_sum(const KernelSpec& spectral, int j, const BandOptions& options) {
  require_cover(spectral, band_upper(j));
  const auto values =
      band_profile(spectral, j, band_evaluation_set(spectral.space(), j, options));
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

double window_sum(const KernelSpec& spectral, int j, const LPWindow& window,
                  const BandOptions& options) {
  const auto values = window_profile(spectral, j, window,
                                     band_evaluation_set(spectral.space(), j, options));
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

double fit_log2_decay(const std::vector<double>& values, int lo, int hi,
                      double* residual) {
  if (lo < 0 || hi < lo || static_cast<std::size_t>(hi) >= values.size()) {
    throw ConfigError("fit range outside the available bands");
  }
  std::vector<double> x, y;
  for (int j = lo; j <= hi; ++j) {
    const double v = values[static_cast<std::size_t>(j)];
    if (!(v > 0.0)) {
      throw DegenerateFitError("band " + std::to_string(j) +
                               " is zero inside the fit range; narrow the range");
    }
    x.push_back(j);
    y.push_back(std::log2(v));
  }
  const LinearFit fit = linear_fit(x, y);
  if (residual) *residual = fit.residual;
  return -fit.slope;
}

BandReport kbes_estimate(const KernelSpec& spectral, int j_max, int fit_lo,
                         int fit_hi, const BandOptions& options) {
  if (fit_lo < 0 || fit_hi < fit_lo + 2 || j_max < fit_hi) {
    throw ConfigError("need j_max >= fit_hi >= fit_lo + 2");
  }
  require_cover(spectral, band_upper(j_max));
  BandReport report;
  report.discretization = options.discretization;
  report.fit_lo = fit_lo;
  report.fit_hi = fit_hi;
  for (int j = 0; j <= j_max; ++j) report.band_sums.push_back(band_sum(spectral, j, options));
  report.fitted_s = fit_log2_decay(report.band_sums, fit_lo, fit_hi, &report.fit_residual);
  return report;
}

DppResult dpp_check(const KernelSpec& spectral, int j, std::size_t n_probe,
                    std::uint64_t seed) {
  const double limit = band_upper(j);
  require_cover(spectral, limit);
  const EigenSystem& sys = spectral.system();
  const auto& nu = spectral.nu();
  std::vector<std::size_t> members;
  for (std::size_t e = 0; e < sys.size(); ++e) {
    if (sys.entries()[e].sqrt_lambda <= limit && nu[e] != 0.0) members.push_back(e);
  }
  auto h_diag = [&](const double* x) {
    double s = 0.0;
    for (std::size_t e : members) s += nu[e] * sys.diagonal_entry(e, x);
    return s;
  };

  const DeltaNet net = build_delta_net(spectral.space(), std::ldexp(1.0, -j), 0.0, seed);
  DppResult result;
  result.net_size = net.points.size();
  for (std::size_t p = 0; p < net.points.size(); ++p) {
    result.net_max = std::max(result.net_max, h_diag(net.points.data(p)));
  }
  // H is positive definite, so sup |H(x, y)| is attained on the diagonal.
  result.probe_sup = result.net_max;
  const PointSet probes = sample_uniform(spectral.space(), n_probe, seed ^ 0x5bd1e995ull);
  for (std::size_t p = 0; p < probes.size(); ++p) {
    result.probe_sup = std::max(result.probe_sup, h_diag(probes.data(p)));
  }
  return result;
}

}  // namespace gpd
