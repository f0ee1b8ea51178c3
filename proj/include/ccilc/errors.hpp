#pragma once

#include <stdexcept>
#include <string>

namespace ccilc {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape or horizon mismatch between matrices, signals, or schedules.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid scenario/config input (bad file, schema violation, out-of-range key).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Numerical failure inside a solver (singular factor, non-finite values).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace ccilc
