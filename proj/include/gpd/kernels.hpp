#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpd/spaces.hpp"

namespace gpd {

enum class ClosedFormName {
  MinXY,                 // x ^ y on the interval
  CircleBrownian,        // 1/2 - rho on the circle
  CircleFractional,      // 1/(alpha+1) - rho^alpha on the circle
  SphereArcsinBM,        // pi/2 - rho = arcsin<xi, eta> on S^d
  SphereFractional,      // C0 - rho^alpha / 2 on S^d
  HypergeometricSphere,  // 2F1(a, b; c; <xi, eta>) on S^d
};

using PointFunction =
    std::function<double(std::span<const double>, std::span<const double>)>;

/// A symmetric kernel on one space, in one of three forms:
///   Spectral   sum_k nu_k * addition_k(x, y) over an EigenSystem,
///   ClosedForm one of the named kernels above,
///   Derived    an arbitrary callable (recentred K_u, K-tilde, exp(-t psi)).
/// Kernels that depend only on the distance also carry a radial profile.
class KernelSpec {
 public:
  enum class Form { Spectral, ClosedForm, Derived };

  // The x ^ y kernel; prefer the named factories.
  KernelSpec() : space_(Space::interval_mixed()) {}

  static KernelSpec spectral(EigenSystem system, std::vector<double> nu,
                             double tail_bound = 0.0, std::string label = "");
  static KernelSpec min_xy();
  static KernelSpec circle_brownian();
  static KernelSpec circle_fractional(double alpha);
  static KernelSpec sphere_arcsin_bm(int d);
  // C0 = |S^d|^{-1} int rho^alpha is computed by quadrature.
  static KernelSpec sphere_fractional(int d, double alpha);
  static KernelSpec hypergeometric_sphere(int d, double a, double b, double c);
  static KernelSpec derived(Space space, PointFunction k, std::string label,
                            std::function<double(double)> radial = {});

  /// CLI names: minxy, circle-brownian, circle-fractional:ALPHA, arcsin,
  /// sphere-fractional:ALPHA, hyp:A,B,C. The sphere forms use `space`.
  static KernelSpec parse(const std::string& name, const Space& space);

  Form form() const noexcept { return form_; }
  const Space& space() const noexcept { return space_; }
  const std::string& label() const noexcept { return label_; }

  // ClosedForm parameters.
  ClosedFormName name() const;
  double alpha() const noexcept { return alpha_; }
  double c0() const noexcept { return c0_; }
  double hyp_a() const noexcept { return a_; }
  double hyp_b() const noexcept { return b_; }
  double hyp_c() const noexcept { return c_; }

  // Spectral data; throws ContractError for other forms.
  const EigenSystem& system() const;
  const std::vector<double>& nu() const;
  // sup_x of the neglected diagonal mass (spectral form).
  double tail_bound() const noexcept { return tail_bound_; }

  double evaluate(std::span<const double> x, std::span<const double> y) const;
  double operator()(std::span<const double> x, std::span<const double> y) const {
    return evaluate(x, y);
  }
  // K as a function of the distance when the kernel is invariant.
  bool has_radial_profile() const noexcept { return static_cast<bool>(radial_); }
  double radial(double r) const;
  const std::function<double(double)>& radial_profile() const noexcept {
    return radial_;
  }

 private:
  Form form_ = Form::ClosedForm;
  Space space_;
  std::string label_;
  ClosedFormName name_ = ClosedFormName::MinXY;
  double alpha_ = 0.0, c0_ = 0.0, a_ = 0.0, b_ = 0.0, c_ = 0.0;
  std::shared_ptr<const EigenSystem> system_;
  std::vector<double> nu_;
  double tail_bound_ = 0.0;
  PointFunction derived_;
  std::function<double(double)> radial_;
};

/// psi(x, y) with psi(x, x) = 0, optionally with a radial profile.
struct NDKernel {
  Space space = Space::interval_mixed();
  PointFunction psi;
  std::function<double(double)> radial;  // empty unless invariant
  std::string label;

  double operator()(std::span<const double> x, std::span<const double> y) const {
    return psi(x, y);
  }
};

/// rho^alpha on a homogeneous space (or |x - y|^alpha on the interval).
NDKernel power_distance(const Space& space, double alpha);

/// psi_K(x, y) = K(x, x) + K(y, y) - 2 K(x, y). Checks symmetry of K on 100
/// sampled pairs (ContractError beyond 1e-10).
NDKernel psi_from_pd(const KernelSpec& kernel, std::uint64_t seed = 0);

/// K_u(x, y) = K(x, y) + K(u, u) - K(x, u) - K(y, u).
KernelSpec k_u(const KernelSpec& kernel, std::span<const double> u);

struct TildeKernel {
  KernelSpec kernel;
  double c0 = 0.0;
  // True when psi was invariant and K-tilde = C0 - psi / 2 was used.
  bool invariant_path = false;
  // Largest relative deviation of x -> |M|^{-1} int psi(x, u) from C0 over
  // the probed x (invariant path only).
  double constancy_error = 0.0;
};

/// K-tilde(x, y) = (2|M|)^{-1} int [psi(x,u) + psi(y,u) - psi(x,y)] dmu(u).
TildeKernel nd_to_pd(const NDKernel& psi, std::uint64_t seed = 0);

/// |M|^{-1} int psi(x, u) dmu(u) by quadrature with a kink at x (and at the
/// antipode on the circle).
double psi_mean(const NDKernel& psi, std::span<const double> x);

enum class Definiteness { PD, ND };
enum class Verdict { PDPass, NDPass, Violation };
std::string to_string(Verdict v);

struct GramReport {
  std::size_t n_points = 0;
  double min_eigenvalue = 0.0;
  double max_zero_sum_form = 0.0;
  double trace = 0.0;
  double sup_norm = 0.0;
  double tolerance = 0.0;  // threshold the verdict was checked against
  Verdict verdict = Verdict::Violation;
  std::vector<double> witness;  // unit coefficient vector on a violation
  PointSet points;
};

/// Gram test on `points`. PD: min eigenvalue >= -1e-8 * trace. ND: largest
/// eigenvalue of the psi Gram restricted to zero-sum vectors <= 1e-8 *
/// sup|psi| * n.
GramReport gram_definiteness_test(const PointFunction& f, const Space& space,
                                  const PointSet& points, Definiteness mode);
/// Same, on n_points seeded uniform points.
GramReport gram_definiteness_test(const KernelSpec& kernel, std::size_t n_points,
                                  std::uint64_t seed);
GramReport gram_definiteness_test(const NDKernel& psi, std::size_t n_points,
                                  std::uint64_t seed);

/// PD test of exp(-t psi) for every t.
std::vector<GramReport> exp_nd_is_pd_check(const NDKernel& psi,
                                           std::span<const double> t_list,
                                           std::size_t n_points,
                                           std::uint64_t seed);

struct SpectralOptions {
  // Gegenbauer coefficients up to this degree come from the power series;
  // higher ones from the zonal projection.
  int series_degree_limit = 128;
  // Throw TruncationError when tail_bound / K(x, x) exceeds this.
  double max_relative_tail = 0.05;
};

/// Mercer coefficients of a closed-form kernel on frequencies 0..k_max.
KernelSpec spectral_coefficients(const KernelSpec& closed, int k_max,
                                 const SpectralOptions& options = {});

/// nu_k = sqrt_lambda_k^{-gamma} for k with sqrt_lambda_k > 0, nu_0 = 0.
KernelSpec synthetic_power_kernel(const Space& space, double gamma, int k_max);

/// sup_x K(x, x) for the closed forms.
double closed_form_diagonal_sup(const KernelSpec& closed);

}  // namespace gpd
