#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hoc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGridError : public Error {
 public:
  using Error::Error;
};

class SingularMappingError : public Error {
 public:
  using Error::Error;
};

class NonMonotoneMappingError : public Error {
 public:
  using Error::Error;
};

/// A stencil operator was evaluated at a node whose stencil leaves the grid.
class OutOfStencilError : public Error {
 public:
  using Error::Error;
};

/// Diffusion matrix is not positive definite somewhere.
class IllPosedError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Dense oracle factorization failed; this signals an assembly bug.
class OracleFailureError : public Error {
 public:
  using Error::Error;
};

/// An iteration hit its limit before reaching tolerance.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}

  const std::vector<double>& history() const noexcept { return history_; }
  double last_residual() const noexcept { return history_.empty() ? 0.0 : history_.back(); }

 private:
  std::vector<double> history_;
};

}  // namespace hoc
