#pragma once

// Independent reference computations shared by the unit tests. None of
// these call into the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

// Composite 5-point Gauss-Legendre on [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        int panels = 400) {
  static const double node[5] = {0.0, -0.5384693101056831, 0.5384693101056831,
                                 -0.9061798459386640, 0.9061798459386640};
  static const double weight[5] = {0.5688888888888889, 0.4786286704993665,
                                   0.4786286704993665, 0.2369268850561891,
                                   0.2369268850561891};
  const double h = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int i = 0; i < 5; ++i) s += weight[i] * f(mid + 0.5 * h * node[i]);
  }
  return 0.5 * h * s;
}

// C_k^nu(x) from the coefficient of r^k in (1 - 2xr + r^2)^{-nu}:
// sum_m (-1)^m Gamma(k-m+nu) / (Gamma(nu) m! (k-2m)!) (2x)^{k-2m}.
inline long double gegenbauer_c(long double nu, int k, long double x) {
  long double s = 0.0L;
  for (int m = 0; 2 * m <= k; ++m) {
    const long double log_mag = std::lgamma(static_cast<long double>(k - m) + nu) -
                                std::lgamma(nu) - std::lgamma(m + 1.0L) -
                                std::lgamma(k - 2.0L * m + 1.0L);
    const long double term = std::exp(log_mag) * std::pow(2.0L * x, k - 2 * m);
    s += (m % 2 ? -term : term);
  }
  return s;
}

inline long double gegenbauer_w(long double nu, int k, long double x) {
  return gegenbauer_c(nu, k, x) / gegenbauer_c(nu, k, 1.0L);
}

inline double binomial(int n, int k) {
  if (k < 0 || n < k) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Unnormalized recurrence k C_k = 2(k+nu-1) x C_{k-1} - (k+2nu-2) C_{k-2}.
inline double gegenbauer_c_recurrence(double nu, int k, double x) {
  double prev = 1.0, cur = 2.0 * nu * x;
  if (k == 0) return prev;
  for (int n = 2; n <= k; ++n) {
    const double next = (2.0 * (n + nu - 1.0) * x * cur - (n + 2.0 * nu - 2.0) * prev) / n;
    prev = cur;
    cur = next;
  }
  return cur;
}

// Coefficient of x^{2j+1} in arcsin x by the ratio c_{j+1}/c_j =
// (2j+1)^2 / ((2j+2)(2j+3)).
inline std::vector<double> arcsin_odd(int j_max) {
  std::vector<double> c(static_cast<std::size_t>(j_max) + 1);
  c[0] = 1.0;
  for (int j = 0; j < j_max; ++j) {
    c[j + 1] = c[j] * (2.0 * j + 1) * (2.0 * j + 1) / ((2.0 * j + 2) * (2.0 * j + 3));
  }
  return c;
}

inline double circle_distance(double x, double y) {
  const double d = std::fabs(x - y);
  return std::min(d, 2.0 - d);
}

// Least-squares slope of y on x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// SplitMix64, for test-side random points.
struct Mix {
  std::uint64_t state;
  explicit Mix(std::uint64_t s) : state(s) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform() { return (next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double normal() {
    const double u1 = 1.0 - uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  std::vector<double> unit_vector(int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    double s = 0.0;
    for (auto& c : v) {
      c = normal();
      s += c * c;
    }
    for (auto& c : v) c /= std::sqrt(s);
    return v;
  }
};

}  // namespace oracle
