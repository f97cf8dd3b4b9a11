#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace polariton {

// Base for everything the library throws. Numerical failures map to CLI exit
// code 3, configuration failures to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularInterspecies : public NumericalError {
 public:
  SingularInterspecies()
      : NumericalError("SingularInterspecies: delta4^2 == delta_q^2, chi12 has a pole") {}
};

class InvalidLattice : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class LambdaPole : public NumericalError {
 public:
  LambdaPole() : NumericalError("LambdaPole: omega^2 - delta3*delta2/2 vanishes") {}
};

class InfeasibleBasis : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotInBasis : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DimensionOverflow : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DimensionMismatch : public NumericalError {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : NumericalError("DimensionMismatch: expected " + std::to_string(expected) + ", got " +
                       std::to_string(got)) {}
};

class NotConverged : public NumericalError {
 public:
  NotConverged(std::size_t iterations, double best_residual)
      : NumericalError("NotConverged after " + std::to_string(iterations) +
                       " matvecs, best residual " + std::to_string(best_residual)),
        iterations_(iterations),
        best_residual_(best_residual) {}

  std::size_t iterations() const { return iterations_; }
  double best_residual() const { return best_residual_; }

 private:
  std::size_t iterations_;
  double best_residual_;
};

class DenseLimitExceeded : public NumericalError {
 public:
  DenseLimitExceeded(std::size_t dim, std::size_t limit)
      : NumericalError("DenseLimitExceeded: dimension " + std::to_string(dim) + " > limit " +
                       std::to_string(limit)) {}
};

class ZeroReference : public NumericalError {
 public:
  ZeroReference() : NumericalError("ZeroReference: normalization reference is zero") {}
};

class ConfigError : public Error {
 public:
  ConfigError(std::size_t line, const std::string& message)
      : Error(line == 0 ? "config: " + message
                        : "config line " + std::to_string(line) + ": " + message),
        line_(line) {}

  // 0 when the error is not tied to a specific line (e.g. a missing key).
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace polariton
