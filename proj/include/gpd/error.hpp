#pragma once

#include <stdexcept>
#include <string>

namespace gpd {

// Base of everything the library throws on a violated contract or a failed
// numerical procedure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain (x not in [-1,1], alpha <= 0, a
// non-unit sphere vector, a point from another space, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Bad configuration: grid coarser than the net scale, fit range too short,
// kernel truncation not covering the requested band.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A caller-side contract failed (e.g. an asymmetric "kernel").
class ContractError : public Error {
 public:
  using Error::Error;
};

// Eigensolver failure or an indefinite covariance that should be PSD.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A least-squares fit had too few usable (positive) points.
class DegenerateFitError : public Error {
 public:
  using Error::Error;
};

// A series or spectral truncation whose residual exceeds the threshold. The
// achieved bound travels with the exception.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double bound)
      : Error(what), bound_(bound) {}

  double bound() const noexcept { return bound_; }

 private:
  double bound_;
};

}  // namespace gpd
