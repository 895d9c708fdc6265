#pragma once

#include <stdexcept>

namespace spectraldiff {

// Error categories aligned with the CLI exit-code table:
// config/input 2, numeric 3, estimator 4, root finding 5.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct NumericError : Error {
  using Error::Error;
};

struct EstimatorError : Error {
  using Error::Error;
};

struct RootFindError : Error {
  using Error::Error;
};

}  // namespace spectraldiff
