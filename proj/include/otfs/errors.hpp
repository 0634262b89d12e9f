#pragma once

#include <stdexcept>
#include <string>

namespace otfs {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape or length mismatch between an input and its grid.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid parameters: grid geometry, thresholds, sweep values, framing.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// No dominant path survived thresholding.
class EmptyChannelError : public Error {
 public:
  using Error::Error;
};

// A factorization or solve failed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace otfs
