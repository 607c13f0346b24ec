#pragma once

#include <stdexcept>
#include <string>

namespace geophase {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the window an operation is defined on
/// (a time outside a segment, too few samples for a quadrature, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Construction parameters violate a type invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Failures of the numerics themselves. The CLI maps these to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularFieldError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IntegrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class FitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace geophase
