#pragma once

#include <stdexcept>
#include <string>

namespace wkbsplit {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed configuration files or schema violations.
struct ConfigError : Error {
  using Error::Error;
};

// Invalid runtime parameters (eps <= 0, sigma < 1, ...).
struct ParameterError : Error {
  using Error::Error;
};

// Field and grid shapes do not match.
struct GridMismatchError : Error {
  using Error::Error;
};

// Left the pre-caustic validity regime.  Carries the estimated time at
// which the caustic monitor would reach its threshold.
struct HorizonError : Error {
  double critical_time;
  HorizonError(const std::string& what, double t_crit)
      : Error(what), critical_time(t_crit) {}
};

// A self-certifying reference integration could not reach its tolerance.
struct ReferenceQualityError : Error {
  using Error::Error;
};

// Analytic-norm weight exceeded the double-precision exponent guard.
struct NormOverflowError : Error {
  using Error::Error;
};

// Field dump/load failures (bad magic, version, size, grid mismatch).
struct IoError : Error {
  using Error::Error;
};

}  // namespace wkbsplit
