#pragma once

#include <stdexcept>
#include <string>

namespace cnls {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid or array sizing problem (bad r_max, too few nodes, length mismatch).
class SizingError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of an operation (q < 1, s > 1, R > r_max, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or a numerical breakdown during a computation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An iterative method (bisection, fixed point, descent) did not converge.
class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Malformed or inconsistent configuration text.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& message)
      : Error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace cnls
