#include "gpd/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>

#include "gpd/error.hpp"
#include "gpd/stats.hpp"

namespace gpd {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDomainSlack = 1e-12;

double checked_unit_argument(double x) {
  if (!(x >= -1.0 - kDomainSlack && x <= 1.0 + kDomainSlack)) {
    throw DomainError("Gegenbauer argument outside [-1, 1]: " +
                      std::to_string(x));
  }
  return std::clamp(x, -1.0, 1.0);
}

// Streaming log-sum-exp of positive terms.
class LogAccumulator {
 public:
  void add(double log_term) {
    if (!std::isfinite(log_term)) return;
    if (empty_) {
      max_ = log_term;
      scaled_ = 1.0;
      empty_ = false;
    } else if (log_term > max_) {
      scaled_ = scaled_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    } else {
      scaled_ += std::exp(log_term - max_);
    }
  }
  bool empty() const { return empty_; }
  double log_sum() const {
    return empty_ ? -std::numeric_limits<double>::infinity()
                  : max_ + std::log(scaled_);
  }

 private:
  bool empty_ = true;
  double max_ = 0.0;
  double scaled_ = 0.0;
};

double series_2f1(double a, double b, double c, double z) {
  double term = 1.0;
  double sum = 1.0;
  for (long n = 0; n < 50'000'000; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
    sum += term;
    if (n > 8 && std::fabs(term) < 1e-17 * std::fabs(sum)) break;
  }
  return sum;
}

double gauss_sum_at_one(double a, double b, double c) {
  return std::exp(std::lgamma(c) + std::lgamma(c - a - b) -
                  std::lgamma(c - a) - std::lgamma(c - b));
}

// int_0^pi sin(u) (u + j pi)^{alpha-1} du. The first arch of alpha < 1 has an
// integrable endpoint singularity, removed by u = t^{1/alpha}.
double arch_integral(double alpha, int j) {
  using boost::math::quadrature::gauss_kronrod;
  constexpr unsigned kMaxDepth = 30;
  constexpr double kTol = 1e-14;
  if (j == 0 && alpha < 1.0) {
    const double inv = 1.0 / alpha;
    auto f = [inv](double t) { return std::sin(std::pow(t, inv)); };
    return inv * gauss_kronrod<double, 31>::integrate(
                     f, 0.0, std::pow(kPi, alpha), kMaxDepth, kTol);
  }
  const double shift = j * kPi;
  auto f = [alpha, shift](double u) {
    return std::sin(u) * std::pow(u + shift, alpha - 1.0);
  };
  return gauss_kronrod<double, 31>::integrate(f, 0.0, kPi, kMaxDepth, kTol);
}

// Partial sums gamma_1..gamma_k_max of the alternating arch series.
std::vector<double> gamma_partial_sums(double alpha, int k_max) {
  std::vector<double> gamma(static_cast<std::size_t>(k_max) + 1, 0.0);
  double partial = 0.0;
  for (int j = 0; j < k_max; ++j) {
    const double arch = arch_integral(alpha, j);
    partial += (j % 2 == 0) ? arch : -arch;
    gamma[static_cast<std::size_t>(j) + 1] = partial;
  }
  return gamma;
}

// log of (2nu)_j / (2^j j! (nu)_j)
double schoenberg_prefactor(double nu, int j) {
  return log_pochhammer(2.0 * nu, j) - j * std::numbers::ln2 -
         std::lgamma(j + 1.0) - log_pochhammer(nu, j);
}

// ln(Gamma(z + a) / Gamma(z + b)) for z > 0, switching to the asymptotic
// Bernoulli-polynomial expansion once lgamma differences would cancel.
double log_gamma_ratio(double z, double a, double b) {
  const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  if (z < std::max(1e6, 100.0 * scale * scale)) {
    return std::lgamma(z + a) - std::lgamma(z + b);
  }
  auto b2 = [](double x) { return x * x - x + 1.0 / 6.0; };
  auto b3 = [](double x) { return x * x * x - 1.5 * x * x + 0.5 * x; };
  auto b4 = [](double x) {
    return x * x * x * x - 2.0 * x * x * x + x * x - 1.0 / 30.0;
  };
  const double inv = 1.0 / z;
  return (a - b) * std::log(z) + (b2(a) - b2(b)) * inv / 2.0 +
         (b3(a) - b3(b)) * inv * inv / 6.0 +
         (b4(a) - b4(b)) * inv * inv * inv / 12.0;
}

// Continuous extension t -> ln T(t) of the inner-series terms, defined up to
// an additive constant. Only the infinite rules need it. The weight
// n! / (4^k k! (nu+j+1)_k) is rewritten with the duplication formula so that
// every piece is a gamma ratio with a fixed offset.
std::function<double(double)> continuous_log_term(const PowerSeriesSpec& spec,
                                                  double nu, int j) {
  const double jd = j;
  const double shift = nu + jd + 1.0;
  auto weight = [jd, shift](double t) {
    return log_gamma_ratio(t, 0.5 * (jd + 1.0), 1.0) +
           log_gamma_ratio(t, 0.5 * (jd + 2.0), shift);
  };
  if (spec.rule() == PowerSeriesSpec::Rule::Arcsin) {
    return [weight, jd](double t) {
      return weight(t) + log_gamma_ratio(t, 0.5 * jd, 0.5 * (jd + 1.0)) +
             log_gamma_ratio(t, 0.5 * jd, 0.5 * (jd + 2.0));
    };
  }
  const double a = spec.a(), b = spec.b(), c = spec.c();
  return [weight, jd, a, b, c](double t) {
    const double n = jd + 2.0 * t;
    return weight(t) + log_gamma_ratio(n, a, c) + log_gamma_ratio(n, b, 1.0);
  };
}

struct TailEstimate {
  double value = 0.0;  // relative to the term at the cutoff
  double error = 0.0;
};

// sum_{m >= K} T(m) / T(K) by Euler-Maclaurin on the continuous extension:
// int_K^inf T + T(K)/2 - T'(K)/12.
TailEstimate euler_maclaurin_tail(const std::function<double(double)>& log_t,
                                  double cutoff) {
  const double base = log_t(cutoff);
  // t = K e^s turns the algebraic decay into an exponential one.
  auto integrand = [&](double s) {
    const double t = cutoff * std::exp(s);
    if (!std::isfinite(t) || t > 1e290) return 0.0;
    return std::exp(log_t(t) - base + s) * cutoff;
  };
  thread_local boost::math::quadrature::exp_sinh<double> integrator;
  double quad_error = 0.0;
  const double integral = integrator.integrate(
      integrand, 0.0, std::numeric_limits<double>::infinity(), 1e-12,
      &quad_error);
  const double slope = 0.5 * (log_t(cutoff + 1.0) - log_t(cutoff - 1.0));
  TailEstimate est;
  est.value = integral + 0.5 - slope / 12.0;
  est.error = quad_error + std::fabs(slope * slope * slope) / 720.0;
  return est;
}

struct InnerSum {
  double log_value = -std::numeric_limits<double>::infinity();
  double log_bound = -std::numeric_limits<double>::infinity();
};

InnerSum schoenberg_inner_sum(const PowerSeriesSpec& spec,
                              const PowerSeriesSpec::LogCoefficients& coeffs,
                              double nu, int j, const SchoenbergOptions& opt) {
  const auto n_max = static_cast<std::int64_t>(coeffs.log_abs.size()) - 1;
  InnerSum out;
  if (j > n_max) return out;
  bool any_term = false;
  for (std::int64_t n = j; n <= n_max && !any_term; n += 2) {
    any_term = coeffs.sign[static_cast<std::size_t>(n)] != 0;
  }
  if (!any_term) return out;
  const bool finite = spec.rule() == PowerSeriesSpec::Rule::Monomial ||
                      spec.rule() == PowerSeriesSpec::Rule::Explicit;
  std::function<double(double)> log_t;
  if (!finite) log_t = continuous_log_term(spec, nu, j);

  LogAccumulator acc;
  // weight_k = ln( n! / (4^k k! (nu+j+1)_k) ) with n = j + 2k
  double log_weight = std::lgamma(j + 1.0);
  const std::int64_t k_cap = (n_max - j) / 2;
  double prev_log_term = -std::numeric_limits<double>::infinity();
  std::int64_t k_peak = 0;
  double peak_log = -std::numeric_limits<double>::infinity();
  const double log_rel_threshold = std::log(opt.relative_term_threshold);

  std::int64_t next_cutoff = -1;
  double previous_log_estimate = std::numeric_limits<double>::quiet_NaN();
  double best_log_estimate = std::numeric_limits<double>::quiet_NaN();
  double best_relative = std::numeric_limits<double>::infinity();

  for (std::int64_t k = 0; k <= k_cap; ++k) {
    const std::int64_t n = j + 2 * k;
    if (k > 0) {
      const double np = static_cast<double>(n);
      log_weight += std::log((np - 1.0) * np /
                             (4.0 * k * (nu + j + static_cast<double>(k))));
    }
    const auto idx = static_cast<std::size_t>(n);
    if (coeffs.sign[idx] == 0) continue;
    const double log_term = log_weight + coeffs.log_abs[idx];
    const bool decreasing = log_term < prev_log_term;
    prev_log_term = log_term;
    if (log_term > peak_log) {
      peak_log = log_term;
      k_peak = k;
    }

    if (!finite && decreasing) {
      if (!acc.empty() && log_term - acc.log_sum() < log_rel_threshold) {
        out.log_value = acc.log_sum();
        out.log_bound = log_term + std::log(static_cast<double>(k) + 1.0);
        return out;
      }
      if (next_cutoff < 0 && k >= 2 * k_peak + 256) next_cutoff = k;
      if (k == next_cutoff) {
        // Sum of terms < k plus the extrapolated tail from k on, kept in
        // log-space: the inner sums alone can exceed the double range.
        const TailEstimate tail =
            euler_maclaurin_tail(log_t, static_cast<double>(k));
        const double ref = acc.log_sum();
        const double log_estimate =
            ref + std::log1p(std::exp(log_term - ref) * tail.value);
        if (std::isfinite(previous_log_estimate)) {
          const double relative =
              std::fabs(std::expm1(log_estimate - previous_log_estimate)) +
              std::exp(log_term - log_estimate) * tail.error;
          if (relative < best_relative) {
            best_relative = relative;
            best_log_estimate = log_estimate;
          }
          if (relative <= opt.tail_tolerance) {
            out.log_value = log_estimate;
            out.log_bound = log_estimate + std::log(relative);
            return out;
          }
        }
        previous_log_estimate = log_estimate;
        next_cutoff = 2 * k;
      }
    }
    acc.add(log_term);
  }

  if (acc.empty()) return out;
  out.log_value = acc.log_sum();
  if (finite) return out;

  // Coefficient cap reached before the extrapolated tail settled.
  if (best_relative <= opt.max_relative_tail) {
    out.log_value = best_log_estimate;
    out.log_bound = best_log_estimate + std::log(best_relative);
    return out;
  }
  throw TruncationError("schoenberg_transform: inner series for B_" +
                            std::to_string(j) +
                            " not resolved within the coefficient cap",
                        best_relative);
}

}  // namespace

// ---------------------------------------------------------------------------
// Gegenbauer / Chebyshev

GegenbauerEvaluator::GegenbauerEvaluator(double nu, int k_max)
    : nu_(nu), k_max_(k_max) {
  if (!(nu >= 0.0)) throw DomainError("Gegenbauer index nu must be >= 0");
  if (k_max < 0) throw DomainError("Gegenbauer degree must be >= 0");
}

void GegenbauerEvaluator::values(double x, std::span<double> out) const {
  x = checked_unit_argument(x);
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = x;
  if (nu_ == 0.0) {
    for (std::size_t k = 2; k < out.size(); ++k) {
      out[k] = 2.0 * x * out[k - 1] - out[k - 2];
    }
    return;
  }
  for (std::size_t k = 2; k < out.size(); ++k) {
    const double kd = static_cast<double>(k);
    out[k] = (2.0 * (kd + nu_ - 1.0) * x * out[k - 1] - (kd - 1.0) * out[k - 2]) /
             (2.0 * nu_ + kd - 1.0);
  }
}

double GegenbauerEvaluator::operator()(int k, double x) const {
  if (k < 0) throw DomainError("Gegenbauer degree must be >= 0");
  x = checked_unit_argument(x);
  if (k == 0) return 1.0;
  double w_prev = 1.0;
  double w = x;
  for (int i = 2; i <= k; ++i) {
    const double id = i;
    const double next =
        nu_ == 0.0
            ? 2.0 * x * w - w_prev
            : (2.0 * (id + nu_ - 1.0) * x * w - (id - 1.0) * w_prev) /
                  (2.0 * nu_ + id - 1.0);
    w_prev = w;
    w = next;
  }
  return w;
}

double gegenbauer_w(double nu, int k, double x) {
  return GegenbauerEvaluator(nu, k)(k, x);
}

double chebyshev_t(int k, double x) { return gegenbauer_w(0.0, k, x); }

double log_pochhammer(double a, std::int64_t n) {
  if (!(a > 0.0)) throw DomainError("log_pochhammer: a must be positive");
  if (n < 0) throw DomainError("log_pochhammer: n must be >= 0");
  if (n == 0) return 0.0;
  // Direct products keep full relative accuracy where lgamma differences
  // would cancel (large a, small n).
  const double direct_limit = std::max(256.0, a / 64.0);
  if (static_cast<double>(n) <= direct_limit) {
    double total = 0.0;
    double block = 1.0;
    for (std::int64_t i = 0; i < n; ++i) {
      block *= a + static_cast<double>(i);
      if (block > 1e250 || (i + 1) % 16 == 0) {
        total += std::log(block);
        block = 1.0;
      }
    }
    return total + std::log(block);
  }
  return std::lgamma(a + static_cast<double>(n)) - std::lgamma(a);
}

std::int64_t sphere_harmonic_dimension(int d, int k) {
  if (d < 1 || k < 0) throw DomainError("sphere_harmonic_dimension: bad args");
  auto binom = [d](std::int64_t top) -> __int128 {
    // C(top, d), zero when top < d
    if (top < d) return 0;
    __int128 r = 1;
    for (int i = 1; i <= d; ++i) {
      r = r * (top - d + i) / i;
    }
    return r;
  };
  return static_cast<std::int64_t>(binom(k + d) - binom(k - 2 + d));
}

double sphere_area(int d) {
  if (d < 1) throw DomainError("sphere_area: d must be >= 1");
  const double h = 0.5 * (d + 1);
  return 2.0 * std::pow(kPi, h) / std::tgamma(h);
}

// ---------------------------------------------------------------------------
// Power series

PowerSeriesSpec PowerSeriesSpec::arcsin(std::int64_t n_max) {
  if (n_max < 1) throw DomainError("arcsin series needs n_max >= 1");
  PowerSeriesSpec s;
  s.rule_ = Rule::Arcsin;
  s.n_max_ = n_max;
  return s;
}

PowerSeriesSpec PowerSeriesSpec::hypergeometric(double a, double b, double c,
                                                std::int64_t n_max) {
  if (!(a > 0.0 && b > 0.0 && c > a + b)) {
    throw DomainError("hypergeometric series requires a, b > 0 and c > a + b");
  }
  PowerSeriesSpec s;
  s.rule_ = Rule::Hypergeometric;
  s.a_ = a;
  s.b_ = b;
  s.c_ = c;
  s.n_max_ = n_max;
  return s;
}

PowerSeriesSpec PowerSeriesSpec::monomial(int n) {
  if (n < 0) throw DomainError("monomial degree must be >= 0");
  PowerSeriesSpec s;
  s.rule_ = Rule::Monomial;
  s.degree_ = n;
  s.n_max_ = n;
  return s;
}

PowerSeriesSpec PowerSeriesSpec::explicit_coefficients(
    std::vector<double> coefficients) {
  if (coefficients.empty()) {
    throw DomainError("explicit power series needs at least one coefficient");
  }
  for (double c : coefficients) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw DomainError("power series coefficients must be finite and >= 0");
    }
  }
  PowerSeriesSpec s;
  s.rule_ = Rule::Explicit;
  s.n_max_ = static_cast<std::int64_t>(coefficients.size()) - 1;
  s.degree_ = static_cast<int>(s.n_max_);
  s.list_ = std::move(coefficients);
  return s;
}

double PowerSeriesSpec::alpha_nominal() const noexcept {
  switch (rule_) {
    case Rule::Arcsin: return 0.5;
    case Rule::Hypergeometric: return c_ - a_ - b_;
    default: return 0.0;
  }
}

PowerSeriesSpec::LogCoefficients PowerSeriesSpec::log_coefficients() const {
  const auto size = static_cast<std::size_t>(n_max_) + 1;
  LogCoefficients out;
  out.log_abs.assign(size, -std::numeric_limits<double>::infinity());
  out.sign.assign(size, 0);
  switch (rule_) {
    case Rule::Arcsin: {
      // c_{2j+1} = ((1/2)_j / j!) / (2j+1)
      double ratio = 1.0;
      for (std::size_t n = 1; n < size; n += 2) {
        const double j = static_cast<double>((n - 1) / 2);
        if (j > 0) ratio *= (j - 0.5) / j;
        out.log_abs[n] = std::log(ratio / (2.0 * j + 1.0));
        out.sign[n] = 1;
      }
      break;
    }
    case Rule::Hypergeometric: {
      double log_c = 0.0;
      for (std::size_t n = 0; n < size; ++n) {
        if (n > 0) {
          const double m = static_cast<double>(n - 1);
          log_c += std::log((a_ + m) * (b_ + m) / ((c_ + m) * (m + 1.0)));
        }
        out.log_abs[n] = log_c;
        out.sign[n] = 1;
      }
      break;
    }
    case Rule::Monomial:
      out.log_abs[static_cast<std::size_t>(degree_)] = 0.0;
      out.sign[static_cast<std::size_t>(degree_)] = 1;
      break;
    case Rule::Explicit:
      for (std::size_t n = 0; n < size; ++n) {
        if (list_[n] > 0.0) {
          out.log_abs[n] = std::log(list_[n]);
          out.sign[n] = 1;
        }
      }
      break;
  }
  return out;
}

double PowerSeriesSpec::coefficient(std::int64_t n) const {
  if (n < 0) return 0.0;
  switch (rule_) {
    case Rule::Arcsin: {
      if (n % 2 == 0) return 0.0;
      const std::int64_t j = (n - 1) / 2;
      return std::exp(2.0 * log_pochhammer(0.5, j) - std::lgamma(j + 1.0) -
                      log_pochhammer(1.5, j));
    }
    case Rule::Hypergeometric:
      return std::exp(log_pochhammer(a_, n) + log_pochhammer(b_, n) -
                      log_pochhammer(c_, n) - std::lgamma(n + 1.0));
    case Rule::Monomial: return n == degree_ ? 1.0 : 0.0;
    case Rule::Explicit:
      return n < static_cast<std::int64_t>(list_.size())
                 ? list_[static_cast<std::size_t>(n)]
                 : 0.0;
  }
  return 0.0;
}

double PowerSeriesSpec::value_at_one() const {
  switch (rule_) {
    case Rule::Arcsin: return kPi / 2.0;
    case Rule::Hypergeometric: return gauss_sum_at_one(a_, b_, c_);
    case Rule::Monomial: return 1.0;
    case Rule::Explicit: {
      double s = 0.0;
      for (double c : list_) s += c;
      return s;
    }
  }
  return 0.0;
}

double PowerSeriesSpec::evaluate(double x) const {
  x = checked_unit_argument(x);
  switch (rule_) {
    case Rule::Arcsin: return std::asin(x);
    case Rule::Hypergeometric: return hypergeometric_2f1(a_, b_, c_, x);
    case Rule::Monomial: return std::pow(x, degree_);
    case Rule::Explicit: {
      double r = 0.0;
      for (auto it = list_.rbegin(); it != list_.rend(); ++it) r = r * x + *it;
      return r;
    }
  }
  return 0.0;
}

std::string PowerSeriesSpec::describe() const {
  std::ostringstream os;
  switch (rule_) {
    case Rule::Arcsin: os << "arcsin"; break;
    case Rule::Hypergeometric:
      os << "hyp:" << a_ << "," << b_ << "," << c_;
      break;
    case Rule::Monomial: os << "monomial:" << degree_; break;
    case Rule::Explicit: os << "explicit[" << list_.size() << "]"; break;
  }
  return os.str();
}

PowerSeriesSpec arcsin_coefficients(std::int64_t n_max) {
  if (n_max < 1) throw DomainError("arcsin_coefficients: n_max must be >= 1");
  std::vector<double> list(static_cast<std::size_t>(n_max) + 1, 0.0);
  double ratio = 1.0;  // (1/2)_j / j!
  for (std::int64_t n = 1; n <= n_max; n += 2) {
    const double j = static_cast<double>((n - 1) / 2);
    if (j > 0) ratio *= (j - 0.5) / j;
    list[static_cast<std::size_t>(n)] = ratio / (2.0 * j + 1.0);
  }
  return PowerSeriesSpec::explicit_coefficients(std::move(list));
}

// ---------------------------------------------------------------------------
// Gegenbauer expansions

double GegenbauerExpansion::tail_bound() const {
  double bound = std::isfinite(outer_tail) ? std::fabs(outer_tail) : 0.0;
  for (double t : inner_tail) bound += t;
  return bound;
}

double GegenbauerExpansion::evaluate(double x) const {
  std::vector<double> w(coefficients.size());
  GegenbauerEvaluator(nu, j_max()).values(x, w);
  double s = 0.0;
  for (std::size_t j = 0; j < coefficients.size(); ++j) s += coefficients[j] * w[j];
  return s;
}

GegenbauerExpansion schoenberg_transform(const PowerSeriesSpec& spec,
                                         double nu, int j_max,
                                         const SchoenbergOptions& options) {
  if (!(nu > 0.0)) throw DomainError("schoenberg_transform: nu must be > 0");
  if (j_max < 0) throw DomainError("schoenberg_transform: j_max must be >= 0");
  const bool finite = spec.rule() == PowerSeriesSpec::Rule::Monomial ||
                      spec.rule() == PowerSeriesSpec::Rule::Explicit;
  const auto coeffs = spec.log_coefficients();

  GegenbauerExpansion out;
  out.nu = nu;
  out.coefficients.assign(static_cast<std::size_t>(j_max) + 1, 0.0);
  out.inner_tail.assign(static_cast<std::size_t>(j_max) + 1, 0.0);
  for (int j = 0; j <= j_max; ++j) {
    const InnerSum inner = schoenberg_inner_sum(spec, coeffs, nu, j, options);
    if (!std::isfinite(inner.log_value)) continue;
    const double pre = schoenberg_prefactor(nu, j);
    out.coefficients[static_cast<std::size_t>(j)] =
        std::exp(pre + inner.log_value);
    out.inner_tail[static_cast<std::size_t>(j)] =
        std::isfinite(inner.log_bound) ? std::exp(pre + inner.log_bound) : 0.0;
  }
  if (finite && spec.degree() <= j_max) {
    out.outer_tail = 0.0;
  } else {
    double total = 0.0;
    for (double b : out.coefficients) total += b;
    out.outer_tail = std::max(0.0, spec.value_at_one() - total);
  }
  return out;
}

GegenbauerExpansion gegenbauer_projection(
    const std::function<double(double)>& profile, double nu, int j_max,
    double value_at_one) {
  if (!(nu > 0.0)) throw DomainError("gegenbauer_projection: nu must be > 0");
  if (j_max < 0) throw DomainError("gegenbauer_projection: j_max must be >= 0");

  const int panels = std::max(32, (j_max + 2) / 3);
  const double width = kPi / panels;
  std::vector<double> breaks;
  constexpr int kGraded = 20;
  constexpr double kRatio = 0.15;
  breaks.push_back(0.0);
  for (int m = kGraded; m >= 1; --m) breaks.push_back(width * std::pow(kRatio, m));
  for (int p = 1; p < panels; ++p) breaks.push_back(p * width);
  for (int m = 1; m <= kGraded; ++m) breaks.push_back(kPi - width * std::pow(kRatio, m));
  breaks.push_back(kPi);
  std::sort(breaks.begin(), breaks.end());

  const GaussRule& rule = gauss_legendre(16);
  const auto jn = static_cast<std::size_t>(j_max) + 1;
  std::vector<double> numer(jn, 0.0);
  std::vector<double> w(jn);
  const GegenbauerEvaluator eval(nu, j_max);
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double lo = breaks[p], hi = breaks[p + 1];
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double theta = mid + half * rule.nodes[q];
      const double g = profile(theta) * std::pow(std::sin(theta), 2.0 * nu) *
                       half * rule.weights[q];
      if (g == 0.0) continue;
      eval.values(std::cos(theta), w);
      for (std::size_t j = 0; j < jn; ++j) numer[j] += g * w[j];
    }
  }

  // int_0^pi W_j(cos t)^2 sin^{2nu} t dt
  //   = pi 2^{1-2nu} Gamma(2nu)^2 / Gamma(nu)^2 * j! / ((j+nu) Gamma(j+2nu))
  const double log_const = std::log(kPi) + (1.0 - 2.0 * nu) * std::numbers::ln2 +
                           2.0 * std::lgamma(2.0 * nu) - 2.0 * std::lgamma(nu);
  GegenbauerExpansion out;
  out.nu = nu;
  out.coefficients.resize(jn);
  out.inner_tail.assign(jn, 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < jn; ++j) {
    const double jd = static_cast<double>(j);
    const double log_norm = log_const + std::lgamma(jd + 1.0) -
                            std::lgamma(jd + 2.0 * nu) - std::log(jd + nu);
    out.coefficients[j] = numer[j] * std::exp(-log_norm);
    total += out.coefficients[j];
  }
  out.outer_tail = std::isfinite(value_at_one)
                       ? std::fabs(value_at_one - total)
                       : std::numeric_limits<double>::quiet_NaN();
  return out;
}

double fitted_decay(const GegenbauerExpansion& expansion, int j_lo, int j_hi) {
  std::vector<double> xs, ys;
  for (int j = std::max(1, j_lo); j <= std::min(j_hi, expansion.j_max()); ++j) {
    const double b = expansion.coefficients[static_cast<std::size_t>(j)];
    if (b > 1e-300) {
      xs.push_back(std::log(static_cast<double>(j)));
      ys.push_back(std::log(b));
    }
  }
  if (xs.size() < 3) {
    throw DegenerateFitError("fitted_decay: fewer than 3 positive coefficients");
  }
  return -linear_fit(xs, ys).slope;
}

// ---------------------------------------------------------------------------
// Fractional circle integrals

double gamma_k_integral(double alpha, int k) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("gamma_k_integral: alpha must lie in (0, 1]");
  }
  if (k < 1) throw DomainError("gamma_k_integral: k must be >= 1");
  return gamma_partial_sums(alpha, k)[static_cast<std::size_t>(k)];
}

std::vector<double> fourier_abs_alpha(double alpha, int k_max) {
  if (!(alpha > 0.0)) throw DomainError("fourier_abs_alpha: alpha must be > 0");
  if (k_max < 1) throw DomainError("fourier_abs_alpha: k_max must be >= 1");
  const auto gamma = gamma_partial_sums(alpha, k_max);
  std::vector<double> c(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) {
    c[static_cast<std::size_t>(k) - 1] =
        2.0 * alpha * gamma[static_cast<std::size_t>(k)] /
        std::pow(kPi * k, alpha + 1.0);
  }
  return c;
}

// ---------------------------------------------------------------------------
// 2F1 on [-1, 1]

double hypergeometric_2f1(double a, double b, double c, double x) {
  x = checked_unit_argument(x);
  if (!(c > a + b)) {
    throw DomainError("hypergeometric_2f1: requires c > a + b on [-1, 1]");
  }
  if (x == 1.0) return gauss_sum_at_one(a, b, c);
  if (x < 0.0) {
    // Pfaff: F(a,b;c;x) = (1-x)^{-a} F(a, c-b; c; x/(x-1))
    return std::pow(1.0 - x, -a) * series_2f1(a, c - b, c, x / (x - 1.0));
  }
  const double s = c - a - b;
  if (x <= 0.5 || std::fabs(s - std::round(s)) < 1e-6) {
    return series_2f1(a, b, c, x);
  }
  // 1 - x connection formula (s not an integer)
  const double y = 1.0 - x;
  const double g1 = std::tgamma(c) * std::tgamma(s) /
                    (std::tgamma(c - a) * std::tgamma(c - b));
  const double g2 = std::tgamma(c) * std::tgamma(-s) /
                    (std::tgamma(a) * std::tgamma(b));
  return g1 * series_2f1(a, b, 1.0 - s, y) +
         g2 * std::pow(y, s) * series_2f1(c - a, c - b, 1.0 + s, y);
}

// ---------------------------------------------------------------------------
// Gauss-Legendre rules

const GaussRule& gauss_legendre(int order) {
  if (order < 1) throw DomainError("gauss_legendre: order must be >= 1");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(order); it != cache.end()) return it->second;

  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  const int n = order;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    const double wgt = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -z;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = z;
    rule.weights[static_cast<std::size_t>(i)] = wgt;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = wgt;
  }
  return cache.emplace(order, std::move(rule)).first->second;
}

}  // namespace gpd
