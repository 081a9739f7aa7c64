#pragma once

#include <stdexcept>
#include <string>

namespace wk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid geometry, grid, or parameter value.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A point, support, or interval lies outside the admissible domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A quadrature or solver produced NaN/Inf.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// An input does not satisfy the hypotheses of the inequality it is fed to.
class HypothesisViolation : public Error {
 public:
  HypothesisViolation(std::string hypothesis, double measured)
      : Error("hypothesis violated: " + hypothesis + " (measured " + std::to_string(measured) + ")"),
        hypothesis_(std::move(hypothesis)),
        measured_(measured) {}

  const std::string& hypothesis() const noexcept { return hypothesis_; }
  double measured() const noexcept { return measured_; }

 private:
  std::string hypothesis_;
  double measured_;
};

/// Linear solve or eigen-iteration failure.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace wk
