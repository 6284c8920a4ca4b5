#include "gpd/spaces.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "gpd/error.hpp"
#include "gpd/rng.hpp"
#include "gpd/special_functions.hpp"

namespace gpd {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kIntervalSlack = 1e-12;
constexpr double kUnitSlack = 1e-9;

}  // namespace

// ---------------------------------------------------------------------------
// Space

Space Space::interval_mixed() { return {SpaceKind::IntervalMixed, 1}; }
Space Space::interval_neumann() { return {SpaceKind::IntervalNeumann, 1}; }
Space Space::circle() { return {SpaceKind::Circle, 1}; }

Space Space::sphere(int d) {
  if (d < 2) throw DomainError("sphere dimension must be >= 2 (S^1 is the circle)");
  return {SpaceKind::Sphere, d};
}

Space Space::parse(std::string_view name) {
  if (name == "interval-mixed" || name == "interval") return interval_mixed();
  if (name == "interval-neumann") return interval_neumann();
  if (name == "circle") return circle();
  if (name.starts_with("sphere:")) {
    const auto digits = name.substr(7);
    int d = 0;
    const auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), d);
    if (ec == std::errc() && ptr == digits.data() + digits.size()) {
      return sphere(d);
    }
  }
  throw ConfigError("unknown space '" + std::string(name) +
                    "' (expected interval-mixed, interval-neumann, circle or "
                    "sphere:d)");
}

double Space::total_measure() const noexcept {
  switch (kind_) {
    case SpaceKind::Circle: return 2.0;
    case SpaceKind::Sphere: return sphere_area(dim_);
    default: return 1.0;
  }
}

double Space::diameter() const noexcept {
  switch (kind_) {
    case SpaceKind::Sphere: return kPi;
    default: return 1.0;
  }
}

std::string Space::name() const {
  switch (kind_) {
    case SpaceKind::IntervalMixed: return "interval-mixed";
    case SpaceKind::IntervalNeumann: return "interval-neumann";
    case SpaceKind::Circle: return "circle";
    case SpaceKind::Sphere: return "sphere:" + std::to_string(dim_);
  }
  return "?";
}

void Space::validate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != coords()) {
    throw DomainError("point has " + std::to_string(x.size()) +
                      " coordinates, " + name() + " expects " +
                      std::to_string(coords()));
  }
  switch (kind_) {
    case SpaceKind::IntervalMixed:
    case SpaceKind::IntervalNeumann:
      if (!(x[0] >= -kIntervalSlack && x[0] <= 1.0 + kIntervalSlack)) {
        throw DomainError("interval point outside [0, 1]");
      }
      break;
    case SpaceKind::Circle:
      if (!(x[0] >= -1.0 - kIntervalSlack && x[0] <= 1.0 + kIntervalSlack)) {
        throw DomainError("circle point outside [-1, 1]");
      }
      break;
    case SpaceKind::Sphere: {
      double norm2 = 0.0;
      for (double v : x) norm2 += v * v;
      if (!(std::fabs(std::sqrt(norm2) - 1.0) <= kUnitSlack)) {
        throw DomainError("sphere point is not a unit vector");
      }
      break;
    }
  }
}

double Space::metric(std::span<const double> x, std::span<const double> y) const {
  validate(x);
  validate(y);
  return metric_unchecked(x.data(), y.data());
}

double Space::metric_unchecked(const double* x, const double* y) const noexcept {
  switch (kind_) {
    case SpaceKind::Circle: {
      const double d = std::fmod(std::fabs(x[0] - y[0]), 2.0);
      return std::min(d, 2.0 - d);
    }
    case SpaceKind::Sphere: {
      double dot = 0.0;
      for (int i = 0; i <= dim_; ++i) dot += x[i] * y[i];
      if (dot > 0.5) {
        // chord form keeps full relative accuracy for nearby points
        double chord2 = 0.0;
        for (int i = 0; i <= dim_; ++i) chord2 += (x[i] - y[i]) * (x[i] - y[i]);
        return 2.0 * std::asin(std::min(1.0, 0.5 * std::sqrt(chord2)));
      }
      return std::acos(std::clamp(dot, -1.0, 1.0));
    }
    default: return std::fabs(x[0] - y[0]);
  }
}

double Space::radial_integral(const std::function<double(double)>& f) const {
  switch (kind_) {
    case SpaceKind::Circle:
      return 2.0 * integrate_piecewise(f, 0.0, 1.0);
    case SpaceKind::Sphere: {
      const double shell = sphere_area(dim_ - 1);
      const int power = dim_ - 1;
      auto g = [&](double r) { return f(r) * std::pow(std::sin(r), power); };
      return shell * integrate_piecewise(g, 0.0, kPi);
    }
    default:
      throw ContractError("radial_integral needs a homogeneous space");
  }
}

// ---------------------------------------------------------------------------
// PointSet

PointSet::PointSet(int coords, std::vector<double> flat)
    : coords_(coords), flat_(std::move(flat)) {
  if (coords <= 0 || flat_.size() % static_cast<std::size_t>(coords) != 0) {
    throw ContractError("PointSet: flat size is not a multiple of coords");
  }
}

void PointSet::push_back(std::span<const double> p) {
  if (static_cast<int>(p.size()) != coords_) {
    throw ContractError("PointSet: coordinate count mismatch");
  }
  flat_.insert(flat_.end(), p.begin(), p.end());
}

// ---------------------------------------------------------------------------
// Eigen systems

double sqrt_lambda_of(const Space& space, int k) {
  switch (space.kind()) {
    case SpaceKind::IntervalMixed: return (k + 0.5) * kPi;
    case SpaceKind::IntervalNeumann:
    case SpaceKind::Circle: return k * kPi;
    case SpaceKind::Sphere: {
      const double kd = k;
      return std::sqrt(kd * (kd + space.dim() - 1.0));
    }
  }
  return 0.0;
}

int k_max_covering(const Space& space, double limit) {
  int k = 0;
  switch (space.kind()) {
    case SpaceKind::IntervalMixed:
      k = static_cast<int>(std::floor(limit / kPi - 0.5));
      break;
    case SpaceKind::IntervalNeumann:
    case SpaceKind::Circle:
      k = static_cast<int>(std::floor(limit / kPi));
      break;
    case SpaceKind::Sphere:
      k = static_cast<int>(std::floor(limit));
      break;
  }
  k = std::max(k, 0);
  while (sqrt_lambda_of(space, k + 1) <= limit) ++k;
  while (k > 0 && sqrt_lambda_of(space, k) > limit) --k;
  return std::max(k, 1);
}

double EigenSystem::next_sqrt_lambda() const noexcept {
  return sqrt_lambda_of(space_, k_max_ + 1);
}

void EigenSystem::finish() {
  component_entry_.clear();
  if (space_.kind() == SpaceKind::Sphere) {
    const double area = sphere_area(space_.dim());
    sphere_scale_.resize(entries_.size());
    for (std::size_t e = 0; e < entries_.size(); ++e) {
      sphere_scale_[e] = static_cast<double>(entries_[e].multiplicity) / area;
    }
    return;
  }
  for (std::size_t e = 0; e < entries_.size(); ++e) {
    for (std::int64_t m = 0; m < entries_[e].multiplicity; ++m) {
      component_entry_.push_back(e);
    }
  }
}

EigenSystem build_interval_mixed(int k_max) {
  if (k_max < 1) throw DomainError("k_max must be >= 1");
  EigenSystem sys(Space::interval_mixed());
  sys.k_max_ = k_max;
  for (int k = 0; k <= k_max; ++k) sys.entries_.push_back({k, (k + 0.5) * kPi, 1});
  sys.finish();
  return sys;
}

EigenSystem build_interval_neumann(int k_max) {
  if (k_max < 1) throw DomainError("k_max must be >= 1");
  EigenSystem sys(Space::interval_neumann());
  sys.k_max_ = k_max;
  for (int k = 0; k <= k_max; ++k) sys.entries_.push_back({k, k * kPi, 1});
  sys.finish();
  return sys;
}

EigenSystem build_circle(int k_max) {
  if (k_max < 1) throw DomainError("k_max must be >= 1");
  EigenSystem sys(Space::circle());
  sys.k_max_ = k_max;
  sys.entries_.push_back({0, 0.0, 1});
  for (int k = 1; k <= k_max; ++k) sys.entries_.push_back({k, k * kPi, 2});
  sys.finish();
  return sys;
}

EigenSystem build_sphere(int d, int k_max) {
  if (k_max < 1) throw DomainError("k_max must be >= 1");
  EigenSystem sys(Space::sphere(d));
  sys.k_max_ = k_max;
  for (int k = 0; k <= k_max; ++k) {
    sys.entries_.push_back(
        {k, sqrt_lambda_of(sys.space_, k), sphere_harmonic_dimension(d, k)});
  }
  sys.finish();
  return sys;
}

EigenSystem build_eigensystem(const Space& space, int k_max) {
  switch (space.kind()) {
    case SpaceKind::IntervalMixed: return build_interval_mixed(k_max);
    case SpaceKind::IntervalNeumann: return build_interval_neumann(k_max);
    case SpaceKind::Circle: return build_circle(k_max);
    case SpaceKind::Sphere: return build_sphere(space.dim(), k_max);
  }
  throw ContractError("unknown space kind");
}

void EigenSystem::cross_values(std::span<const double> x,
                               std::span<const double> y,
                               std::span<double> out) const {
  if (out.size() != entries_.size()) {
    throw ContractError("cross_values: output size mismatch");
  }
  space_.validate(x);
  space_.validate(y);
  switch (space_.kind()) {
    case SpaceKind::IntervalMixed:
      for (std::size_t e = 0; e < out.size(); ++e) {
        const double w = entries_[e].sqrt_lambda;
        out[e] = 2.0 * std::sin(w * x[0]) * std::sin(w * y[0]);
      }
      break;
    case SpaceKind::IntervalNeumann:
      out[0] = 1.0;
      for (std::size_t e = 1; e < out.size(); ++e) {
        const double w = entries_[e].sqrt_lambda;
        out[e] = 2.0 * std::cos(w * x[0]) * std::cos(w * y[0]);
      }
      break;
    case SpaceKind::Circle:
      addition_at_distance(x[0] - y[0], out);
      break;
    case SpaceKind::Sphere: {
      double dot = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
      addition_at_distance(std::acos(std::clamp(dot, -1.0, 1.0)), out);
      break;
    }
  }
}

void EigenSystem::diagonal_values(std::span<const double> x,
                                  std::span<double> out) const {
  cross_values(x, x, out);
}

double EigenSystem::cross_value(std::size_t entry, std::span<const double> x,
                                std::span<const double> y) const {
  std::vector<double> all(entries_.size());
  cross_values(x, y, all);
  return all.at(entry);
}

double EigenSystem::diagonal_value(std::size_t entry,
                                   std::span<const double> x) const {
  space_.validate(x);
  if (entry >= entries_.size()) throw ContractError("entry out of range");
  return diagonal_entry(entry, x.data());
}

double EigenSystem::diagonal_entry(std::size_t entry,
                                   const double* x) const noexcept {
  const double w = entries_[entry].sqrt_lambda;
  switch (space_.kind()) {
    case SpaceKind::IntervalMixed: {
      const double s = std::sin(w * x[0]);
      return 2.0 * s * s;
    }
    case SpaceKind::IntervalNeumann: {
      if (entry == 0) return 1.0;
      const double c = std::cos(w * x[0]);
      return 2.0 * c * c;
    }
    case SpaceKind::Circle: return entry == 0 ? 0.5 : 1.0;
    case SpaceKind::Sphere: return sphere_scale_[entry];
  }
  return 0.0;
}

void EigenSystem::addition_at_distance(double r, std::span<double> out) const {
  if (out.size() != entries_.size()) {
    throw ContractError("addition_at_distance: output size mismatch");
  }
  if (space_.kind() == SpaceKind::Circle) {
    // cos(k pi r) by the Chebyshev recurrence in k
    const double c1 = std::cos(kPi * r);
    double prev = 1.0, cur = c1;
    out[0] = 0.5;
    for (std::size_t e = 1; e < out.size(); ++e) {
      out[e] = cur;
      const double next = 2.0 * c1 * cur - prev;
      prev = cur;
      cur = next;
    }
    return;
  }
  if (space_.kind() != SpaceKind::Sphere) {
    throw ContractError("addition_at_distance needs a homogeneous space");
  }
  const double nu = 0.5 * (space_.dim() - 1);
  GegenbauerEvaluator(nu, k_max_).values(std::cos(r), out);
  for (std::size_t e = 0; e < out.size(); ++e) out[e] *= sphere_scale_[e];
}

void EigenSystem::basis_row(double x, std::span<double> out) const {
  if (!has_basis()) throw ContractError("spheres expose no individual basis");
  if (out.size() != component_entry_.size()) {
    throw ContractError("basis_row: output size mismatch");
  }
  constexpr double kRoot2 = std::numbers::sqrt2;
  switch (space_.kind()) {
    case SpaceKind::IntervalMixed:
      for (std::size_t e = 0; e < entries_.size(); ++e) {
        out[e] = kRoot2 * std::sin(entries_[e].sqrt_lambda * x);
      }
      break;
    case SpaceKind::IntervalNeumann:
      out[0] = 1.0;
      for (std::size_t e = 1; e < entries_.size(); ++e) {
        out[e] = kRoot2 * std::cos(entries_[e].sqrt_lambda * x);
      }
      break;
    case SpaceKind::Circle:
      out[0] = 1.0 / kRoot2;
      for (std::size_t e = 1; e < entries_.size(); ++e) {
        const double angle = entries_[e].sqrt_lambda * x;
        out[2 * e - 1] = std::cos(angle);
        out[2 * e] = std::sin(angle);
      }
      break;
    default: break;
  }
}

// ---------------------------------------------------------------------------
// Quadrature and sampling

double integrate_piecewise(const std::function<double(double)>& f, double a,
                           double b, std::span<const double> interior_breaks,
                           int panels, int grading_levels) {
  if (!(b > a)) return 0.0;
  std::vector<double> knots{a};
  for (double t : interior_breaks) {
    if (t > a && t < b) knots.push_back(t);
  }
  knots.push_back(b);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  constexpr double kRatio = 0.15;
  const GaussRule& rule = gauss_legendre(16);
  std::vector<double> edges;
  double total = 0.0;
  for (std::size_t p = 0; p + 1 < knots.size(); ++p) {
    const double lo = knots[p], hi = knots[p + 1];
    const double h = (hi - lo) / panels;
    edges.clear();
    edges.push_back(lo);
    for (int m = grading_levels; m >= 1; --m) edges.push_back(lo + h * std::pow(kRatio, m));
    for (int i = 1; i < panels; ++i) edges.push_back(lo + i * h);
    for (int m = 1; m <= grading_levels; ++m) edges.push_back(hi - h * std::pow(kRatio, m));
    edges.push_back(hi);
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
      const double half = 0.5 * (edges[e + 1] - edges[e]);
      const double mid = 0.5 * (edges[e + 1] + edges[e]);
      if (half <= 0.0) continue;
      double s = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        s += rule.weights[q] * f(mid + half * rule.nodes[q]);
      }
      total += half * s;
    }
  }
  return total;
}

Quadrature quadrature_nodes(const Space& space, int resolution,
                            std::uint64_t seed) {
  if (resolution < 2) throw DomainError("quadrature resolution must be >= 2");
  Quadrature q;
  q.points = PointSet(space.coords());
  if (space.kind() != SpaceKind::Sphere) {
    const double lo = space.kind() == SpaceKind::Circle ? -1.0 : 0.0;
    const double width = space.kind() == SpaceKind::Circle ? 2.0 : 1.0;
    const GaussRule& rule = gauss_legendre(16);
    const double h = width / resolution;
    q.points.reserve(static_cast<std::size_t>(resolution) * rule.nodes.size());
    for (int p = 0; p < resolution; ++p) {
      const double mid = lo + (p + 0.5) * h;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double x = mid + 0.5 * h * rule.nodes[i];
        q.points.push_back(std::span<const double>(&x, 1));
        q.weights.push_back(0.5 * h * rule.weights[i]);
      }
    }
    return q;
  }
  if (space.dim() == 2) {
    const GaussRule& rule = gauss_legendre(resolution);
    const int n_phi = 2 * resolution;
    const double dphi = 2.0 * kPi / n_phi;
    for (int i = 0; i < resolution; ++i) {
      const double z = rule.nodes[static_cast<std::size_t>(i)];
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      for (int m = 0; m < n_phi; ++m) {
        const double phi = (m + 0.5) * dphi;
        const double p[3] = {s * std::cos(phi), s * std::sin(phi), z};
        q.points.push_back(p);
        q.weights.push_back(rule.weights[static_cast<std::size_t>(i)] * dphi);
      }
    }
    return q;
  }
  q.points = sample_uniform(space, static_cast<std::size_t>(resolution), seed);
  q.weights.assign(static_cast<std::size_t>(resolution),
                   space.total_measure() / resolution);
  return q;
}

PointSet sample_uniform(const Space& space, std::size_t n, std::uint64_t seed) {
  const CounterRng rng(seed, Stream::PointSampling);
  PointSet out(space.coords());
  out.reserve(n);
  if (space.kind() != SpaceKind::Sphere) {
    const bool circle = space.kind() == SpaceKind::Circle;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform(i, 0);
      const double x = circle ? 2.0 * u - 1.0 : u;
      out.push_back(std::span<const double>(&x, 1));
    }
    return out;
  }
  const int c = space.coords();
  std::vector<double> v(static_cast<std::size_t>(c));
  for (std::size_t i = 0; i < n; ++i) {
    double norm2 = 0.0;
    for (int pair = 0; 2 * pair < c; ++pair) {
      const auto [g1, g2] = rng.normal2(i, static_cast<std::uint32_t>(pair));
      v[static_cast<std::size_t>(2 * pair)] = g1;
      if (2 * pair + 1 < c) v[static_cast<std::size_t>(2 * pair + 1)] = g2;
    }
    for (double t : v) norm2 += t * t;
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& t : v) t *= inv;
    out.push_back(v);
  }
  return out;
}

PointSet fibonacci_sphere(std::size_t n) {
  PointSet out(3);
  out.reserve(n);
  const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / static_cast<double>(n);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * static_cast<double>(i);
    const double p[3] = {s * std::cos(phi), s * std::sin(phi), z};
    out.push_back(p);
  }
  return out;
}

}  // namespace gpd
