#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace conformal {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point (or stencil) lies outside the domain of a field or formula.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation hit a singular point of a kernel (e.g. z == zeta).
class SingularPointError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Invalid construction parameters (grid sizes, orders, radii, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A required derivative of a source field is not available.
class SmoothnessError : public Error {
 public:
  using Error::Error;
};

/// Iterative procedure failed to reach its tolerance. Carries the trace of
/// the monitored quantity (residual norms, refinement errors, ...).
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> trace = {})
      : Error(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

/// A numerically checked hypothesis fails (e.g. the growth
/// condition of the Riesz decomposition). Carries the measured quantity.
class HypothesisError : public Error {
 public:
  HypothesisError(const std::string& what, double measured) : Error(what), measured_(measured) {}
  double measured() const noexcept { return measured_; }

 private:
  double measured_;
};

}  // namespace conformal
