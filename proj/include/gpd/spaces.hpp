#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gpd {

enum class SpaceKind { IntervalNeumann, IntervalMixed, Circle, Sphere };

/// One of the concrete geometries. Points are flat coordinate arrays:
/// one real for the interval ([0, 1]) and the circle ([-1, 1) with the
/// endpoints identified), d + 1 reals (a unit vector) for S^d.
class Space {
 public:
  static Space interval_mixed();
  static Space interval_neumann();
  static Space circle();
  static Space sphere(int d);
  // "interval-mixed", "interval-neumann", "circle", "sphere:d"
  static Space parse(std::string_view name);

  SpaceKind kind() const noexcept { return kind_; }
  // Manifold dimension; also the doubling exponent used in reports.
  int dim() const noexcept { return dim_; }
  double dim_doubling() const noexcept { return dim_; }
  // Number of stored coordinates per point.
  int coords() const noexcept { return kind_ == SpaceKind::Sphere ? dim_ + 1 : 1; }
  double total_measure() const noexcept;
  double diameter() const noexcept;
  // True for the circle and spheres, where invariant kernels depend only on
  // the distance.
  bool homogeneous() const noexcept {
    return kind_ == SpaceKind::Circle || kind_ == SpaceKind::Sphere;
  }
  std::string name() const;

  // Throws DomainError for a point outside the space.
  void validate(std::span<const double> x) const;
  // Geodesic distance; validates both points.
  double metric(std::span<const double> x, std::span<const double> y) const;
  // Same without validation, for inner loops over trusted points.
  double metric_unchecked(const double* x, const double* y) const noexcept;

  // int_M f(rho(o, u)) dmu(u) for a fixed base point o, as a 1-D integral
  // over the distance r in [0, diameter]. Only for homogeneous spaces.
  double radial_integral(const std::function<double(double)>& f) const;

  bool operator==(const Space&) const = default;

 private:
  Space(SpaceKind kind, int dim) : kind_(kind), dim_(dim) {}
  SpaceKind kind_;
  int dim_;
};

/// Points of one space stored contiguously.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(int coords) : coords_(coords) {}
  PointSet(int coords, std::vector<double> flat);

  int coords() const noexcept { return coords_; }
  std::size_t size() const noexcept {
    return coords_ == 0 ? 0 : flat_.size() / static_cast<std::size_t>(coords_);
  }
  bool empty() const noexcept { return flat_.empty(); }
  std::span<const double> operator[](std::size_t i) const {
    return {flat_.data() + i * static_cast<std::size_t>(coords_),
            static_cast<std::size_t>(coords_)};
  }
  const double* data(std::size_t i) const {
    return flat_.data() + i * static_cast<std::size_t>(coords_);
  }
  void push_back(std::span<const double> p);
  void reserve(std::size_t n) { flat_.reserve(n * static_cast<std::size_t>(coords_)); }
  const std::vector<double>& flat() const noexcept { return flat_; }

 private:
  int coords_ = 1;
  std::vector<double> flat_;
};

struct EigenEntry {
  int index = 0;             // frequency k
  double sqrt_lambda = 0.0;  // sqrt of the eigenvalue of A
  std::int64_t multiplicity = 1;
};

/// Enumerable spectral data of one space, truncated at frequency k_max.
/// Eigenfunctions are L^2-normalized for the unnormalized measure of the
/// space; the addition value of entry k is sum_m u_{k,m}(x) u_{k,m}(y).
class EigenSystem {
 public:
  const Space& space() const noexcept { return space_; }
  const std::vector<EigenEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  int truncation_index() const noexcept { return k_max_; }
  // sqrt_lambda of the first entry not stored; every eigenvalue below it is
  // present.
  double next_sqrt_lambda() const noexcept;

  // Addition values of every entry at (x, y); out.size() == size().
  void cross_values(std::span<const double> x, std::span<const double> y,
                    std::span<double> out) const;
  void diagonal_values(std::span<const double> x, std::span<double> out) const;
  double cross_value(std::size_t entry, std::span<const double> x,
                     std::span<const double> y) const;
  double diagonal_value(std::size_t entry, std::span<const double> x) const;
  // Unvalidated addition value of one entry at (x, x); O(1).
  double diagonal_entry(std::size_t entry, const double* x) const noexcept;
  // Addition values as a function of the distance (homogeneous spaces only).
  void addition_at_distance(double r, std::span<double> out) const;

  // Individual basis functions (interval and circle only). basis_size() is
  // the total multiplicity; component_entry(c) maps a component to its entry.
  bool has_basis() const noexcept { return space_.kind() != SpaceKind::Sphere; }
  std::size_t basis_size() const noexcept { return component_entry_.size(); }
  std::size_t component_entry(std::size_t c) const { return component_entry_[c]; }
  void basis_row(double x, std::span<double> out) const;

  friend EigenSystem build_interval_mixed(int k_max);
  friend EigenSystem build_interval_neumann(int k_max);
  friend EigenSystem build_circle(int k_max);
  friend EigenSystem build_sphere(int d, int k_max);

 private:
  explicit EigenSystem(Space space) : space_(space) {}
  void finish();

  Space space_;
  int k_max_ = 0;
  std::vector<EigenEntry> entries_;
  std::vector<std::size_t> component_entry_;
  std::vector<double> sphere_scale_;  // dim H_k / |S^d|
};

EigenSystem build_interval_mixed(int k_max);
EigenSystem build_interval_neumann(int k_max);
EigenSystem build_circle(int k_max);
EigenSystem build_sphere(int d, int k_max);
EigenSystem build_eigensystem(const Space& space, int k_max);

/// sqrt_lambda of frequency k in the given space.
double sqrt_lambda_of(const Space& space, int k);
/// Smallest k_max whose system holds every eigenvalue with sqrt_lambda <= limit.
int k_max_covering(const Space& space, double limit);

struct Quadrature {
  PointSet points;
  std::vector<double> weights;
};

/// Interval/circle: `resolution` composite 16-point Gauss-Legendre panels.
/// S^2: Gauss-Legendre in cos(theta) with `resolution` nodes times 2
/// `resolution` equispaced azimuths. S^d, d > 2: `resolution` uniform Monte
/// Carlo nodes with equal weights (error O(N^{-1/2})).
Quadrature quadrature_nodes(const Space& space, int resolution,
                            std::uint64_t seed = 0);

/// int_a^b f by 16-point Gauss-Legendre on `panels` panels per piece between
/// consecutive breakpoints, geometrically graded towards every breakpoint so
/// that kinks and algebraic endpoint singularities converge quickly.
double integrate_piecewise(const std::function<double(double)>& f, double a,
                           double b, std::span<const double> interior_breaks = {},
                           int panels = 8, int grading_levels = 12);

/// Uniformly distributed random points (inverse CDF on 1-D spaces,
/// normalized Gaussian vectors on spheres).
PointSet sample_uniform(const Space& space, std::size_t n, std::uint64_t seed);

/// Near-uniform deterministic points on S^2 (spherical Fibonacci lattice).
PointSet fibonacci_sphere(std::size_t n);

}  // namespace gpd
