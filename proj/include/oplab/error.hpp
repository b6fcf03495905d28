#pragma once

#include <stdexcept>
#include <string>

namespace oplab {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation (non-positive-definite
// matrix raised to a fractional power, h < 1, non-Hermitian input, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration: tolerance policy, grid, check constraints, CLI input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, int sweeps)
      : Error(what), residual_(residual), sweeps_(sweeps) {}

  double residual() const noexcept { return residual_; }
  int sweeps() const noexcept { return sweeps_; }

 private:
  double residual_;
  int sweeps_;
};

}  // namespace oplab
