#pragma once

#include <stdexcept>
#include <string>

namespace tsrate {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (CSV rows, prediction files, labels).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A run configuration that fails parsing or validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A statistic that is undefined for the given input (e.g. MASE on a flat
/// training window).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace tsrate
