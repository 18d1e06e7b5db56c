#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace paraode {

// Base class for everything this library throws on purpose.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values or otherwise malformed arguments.
class InvalidInputError : public SolverError {
 public:
  using SolverError::SolverError;
};

// Mismatched matrix/vector shapes.
class DimensionError : public SolverError {
 public:
  using SolverError::SolverError;
};

// A triangular factor that must be invertible has a (numerically) zero
// diagonal entry: singular innovation covariance, degenerate prediction,
// or a singular combination factor.
class SingularFactorError : public SolverError {
 public:
  using SolverError::SolverError;
};

// Vector field or Jacobian evaluation produced non-finite values.  Carries
// the time point (and trajectory index) at which linearization failed.
class LinearizationError : public SolverError {
 public:
  LinearizationError(const std::string& what, double time, std::size_t index)
      : SolverError(what), time_(time), index_(index) {}
  double time() const { return time_; }
  std::size_t index() const { return index_; }

 private:
  double time_ = 0.0;
  std::size_t index_ = 0;
};

// The reference integrator failed its step-halving self check.
class ReferenceError : public SolverError {
 public:
  using SolverError::SolverError;
};

// A combine operator failed inside the associative scan; the message names
// the element range that was being combined.
class ScanError : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace paraode
