#pragma once

#include <stdexcept>
#include <string>

namespace pmono {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: parameter outside its admissible range, malformed config.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An integrator, quadrature or fit could not meet its contract.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A geometric hypothesis (minimal boundary, R >= 0, ...) does not hold.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

}  // namespace pmono
