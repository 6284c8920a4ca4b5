#pragma once

#include <span>

namespace gpd {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  // Root-mean-square of the fit residuals.
  double residual = 0.0;
  int n = 0;
};

// Ordinary least squares y ~ intercept + slope * x. Throws DegenerateFitError
// for fewer than two points or a constant x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double standard_error = 0.0;
};

SampleMoments sample_moments(std::span<const double> values);

}  // namespace gpd
