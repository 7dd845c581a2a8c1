#pragma once

#include <stdexcept>
#include <string>

namespace cccd {

/// Bad model parameters, bad input data, or a precondition violated by the caller.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation could not produce a result within its configured limits.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quadrature ran out of subdivisions; the best estimate is attached.
class ConvergenceError : public ComputationError {
 public:
  ConvergenceError(const std::string& what, double estimate, double error)
      : ComputationError(what), estimate_(estimate), error_(error) {}
  double estimate() const { return estimate_; }
  double error() const { return error_; }

 private:
  double estimate_;
  double error_;
};

}  // namespace cccd
