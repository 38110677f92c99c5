#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netsync {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed sizes, parameters or configuration.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An iterative kernel failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public NumericalError {
 public:
  SingularMatrixError(const std::string& what, double rcond)
      : NumericalError(what), rcond_(rcond) {}
  /// Reciprocal condition estimate of the offending matrix.
  double rcond() const { return rcond_; }

 private:
  double rcond_;
};

/// A matrix (or modal subsystem) required to be Hurwitz is not.
class UnstableError : public Error {
 public:
  UnstableError(const std::string& what, std::ptrdiff_t mode = -1,
                double lambda = 0.0, double abscissa = 0.0)
      : Error(what), mode_(mode), lambda_(lambda), abscissa_(abscissa) {}
  /// Zero-based mode index, or -1 when the failure is not modal.
  std::ptrdiff_t mode() const { return mode_; }
  double lambda() const { return lambda_; }
  double abscissa() const { return abscissa_; }

 private:
  std::ptrdiff_t mode_;
  double lambda_;
  double abscissa_;
};

/// LQR preconditions (stabilizability, detectability, ...) do not hold.
class AssumptionError : public Error {
 public:
  using Error::Error;
};

}  // namespace netsync
