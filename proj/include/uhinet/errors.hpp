#pragma once

#include <stdexcept>
#include <string>

namespace uhinet {

// Root of every error the toolkit raises. The CLI maps the concrete type to an
// exit code, the service maps it to an HTTP status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor or grid shapes that do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// An argument outside its documented domain (dropout rate, k, epsilon...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf produced or consumed where finite values are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

// API misuse, e.g. replaying a consumed tape.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Input data is incomplete or inconsistent (missing hours, ragged stacks).
class DataError : public Error {
 public:
  using Error::Error;
};

// Configuration that cannot describe a valid run.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Corrupt or incompatible file contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

// No weather type could be chosen as target.
class SelectionError : public Error {
 public:
  using Error::Error;
};

}  // namespace uhinet
