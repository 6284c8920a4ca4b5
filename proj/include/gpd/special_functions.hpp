#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace gpd {

/// Normalized Gegenbauer polynomials W_k^nu = C_k^nu / C_k^nu(1).
///
/// nu > 0 uses the three-term recurrence rescaled so that W_k(1) = 1 exactly;
/// nu == 0 is the Chebyshev convention W_k^0 = T_k. The normalized recurrence
/// never forms C_k(1) = (2nu)_k / k!, so it stays finite for k up to 1e5 and
/// beyond.
class GegenbauerEvaluator {
 public:
  GegenbauerEvaluator(double nu, int k_max);

  double nu() const noexcept { return nu_; }
  int k_max() const noexcept { return k_max_; }

  double operator()(int k, double x) const;

  // Fills out[0..out.size()) with W_0(x), W_1(x), ...; out.size() may exceed
  // k_max.
  void values(double x, std::span<double> out) const;

 private:
  double nu_;
  int k_max_;
};

double gegenbauer_w(double nu, int k, double x);
double chebyshev_t(int k, double x);

/// ln((a)_n) = ln Gamma(a+n) - ln Gamma(a) for a > 0.
double log_pochhammer(double a, std::int64_t n);

/// dim H_k(S^d) = C(k+d, d) - C(k-2+d, d).
std::int64_t sphere_harmonic_dimension(int d, int k);

/// |S^d| = 2 pi^{(d+1)/2} / Gamma((d+1)/2).
double sphere_area(int d);

/// A power series f(x) = sum_n (A_n / n!) x^n with nonnegative coefficients,
/// given either by a rule or by an explicit coefficient list.
class PowerSeriesSpec {
 public:
  enum class Rule { Arcsin, Hypergeometric, Monomial, Explicit };

  static PowerSeriesSpec arcsin(std::int64_t n_max = 4'000'000);
  // Coefficients (a)_n (b)_n / ((c)_n n!); requires a, b > 0, c > a + b.
  static PowerSeriesSpec hypergeometric(double a, double b, double c,
                                        std::int64_t n_max = 4'000'000);
  static PowerSeriesSpec monomial(int n);
  // coefficients[n] is the coefficient of x^n, i.e. A_n / n!.
  static PowerSeriesSpec explicit_coefficients(std::vector<double> coefficients);

  Rule rule() const noexcept { return rule_; }
  std::int64_t n_max() const noexcept { return n_max_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double c() const noexcept { return c_; }
  int degree() const noexcept { return degree_; }
  const std::vector<double>& explicit_list() const noexcept { return list_; }

  // Nominal decay exponent alpha in A_n/n! = O(n^{-1-alpha}); 0 when the
  // series is a polynomial.
  double alpha_nominal() const noexcept;

  // Coefficients of x^n for n = 0..n_max as (log|c_n|, sign) pairs; zero
  // coefficients carry sign 0.
  struct LogCoefficients {
    std::vector<double> log_abs;
    std::vector<signed char> sign;
  };
  LogCoefficients log_coefficients() const;

  double coefficient(std::int64_t n) const;

  // f(1) = sum of all coefficients (closed form where available).
  double value_at_one() const;

  // Direct evaluation of the series at x in [-1, 1].
  double evaluate(double x) const;

  std::string describe() const;

 private:
  PowerSeriesSpec() = default;

  Rule rule_ = Rule::Explicit;
  std::int64_t n_max_ = 0;
  double a_ = 0.0, b_ = 0.0, c_ = 0.0;
  int degree_ = 0;
  std::vector<double> list_;
};

/// f(x) = sum_j B_j W_j^nu(x).
struct GegenbauerExpansion {
  double nu = 0.0;
  std::vector<double> coefficients;
  // Residual bound of each B_j's inner series.
  std::vector<double> inner_tail;
  // sum_{j > j_max} B_j when f(1) is known, else NaN.
  double outer_tail = 0.0;

  int j_max() const noexcept {
    return static_cast<int>(coefficients.size()) - 1;
  }
  // Bound on |f(x) - evaluate(x)| over [-1, 1].
  double tail_bound() const;
  double evaluate(double x) const;
};

struct SchoenbergOptions {
  // Stop when a term falls below this fraction of the partial sum.
  double relative_term_threshold = 1e-16;
  // Accept the continued tail once the estimates at two cutoffs agree to this
  // fraction of the sum.
  double tail_tolerance = 1e-9;
  // Reject B_j whose residual bound (relative to the partial sum) exceeds
  // this at the coefficient cap.
  double max_relative_tail = 1e-6;
};

/// Power series -> Gegenbauer coefficients:
///   B_j = (2nu)_j / (2^j j! (nu)_j) * sum_k A_{j+2k} / (4^k k! (nu+j+1)_k).
/// Terms are accumulated in log-space; the tail past the summation cutoff is
/// the Euler-Maclaurin continuation of the term sequence, and the difference
/// between cutoffs K and 2K is reported in inner_tail. Throws TruncationError if a coefficient cannot be resolved
/// within the spec's n_max.
GegenbauerExpansion schoenberg_transform(const PowerSeriesSpec& spec,
                                         double nu, int j_max,
                                         const SchoenbergOptions& options = {});

/// Funk-Hecke projection of a zonal profile g(theta) = f(cos theta) onto
/// W_j^nu, by composite Gauss-Legendre quadrature in theta with geometric
/// grading at both poles. Exact-normalized against the closed-form
/// Gegenbauer norms.
GegenbauerExpansion gegenbauer_projection(
    const std::function<double(double)>& profile, double nu, int j_max,
    double value_at_one);

/// Coefficients of x^{2j+1} in arcsin x, listed by power n = 0..n_max.
PowerSeriesSpec arcsin_coefficients(std::int64_t n_max);

/// gamma_k = int_0^{k pi} u^{alpha-1} sin u du, 0 < alpha <= 1.
double gamma_k_integral(double alpha, int k);

/// Cosine coefficients c_k (k = 1..k_max) of 1/(alpha+1) - |x|^alpha on
/// [-1, 1]: c_k = 2 alpha gamma_k / (pi k)^{alpha+1}. Accepts any alpha > 0
/// so that the sign change for alpha > 1 can be exhibited.
std::vector<double> fourier_abs_alpha(double alpha, int k_max);

/// Gauss hypergeometric 2F1(a, b; c; x) on [-1, 1] for c > a + b.
double hypergeometric_2f1(double a, double b, double c, double x);

/// Least-squares slope of log(B_j) against log(j) over j in [j_lo, j_hi],
/// using only strictly positive coefficients. Returns -slope.
double fitted_decay(const GegenbauerExpansion& expansion, int j_lo, int j_hi);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

}  // namespace gpd
