#include "gpd/stats.hpp"

#include <cmath>

#include "gpd/error.hpp"

namespace gpd {

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ContractError("linear_fit: x and y differ in length");
  }
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2) {
    throw DegenerateFitError("linear_fit: need at least two points");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) {
    throw DegenerateFitError("linear_fit: abscissae are all equal");
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.n = static_cast<int>(x.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

SampleMoments sample_moments(std::span<const double> values) {
  SampleMoments m;
  const auto n = static_cast<double>(values.size());
  if (values.empty()) return m;
  for (double v : values) m.mean += v;
  m.mean /= n;
  if (values.size() > 1) {
    for (double v : values) m.variance += (v - m.mean) * (v - m.mean);
    m.variance /= (n - 1.0);
  }
  m.standard_error = std::sqrt(m.variance / n);
  return m;
}

}  // namespace gpd
