#pragma once

#include <stdexcept>
#include <string>

namespace nlslab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument values (non-positive radius, unknown scenario, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Two fields or a field and an operator live on different grids.
class GridMismatch : public Error {
 public:
  GridMismatch() : Error("fields are defined on different radial grids") {}
};

// The high-frequency tail of a field carries too much mass for spectral
// differentiation to be trusted, or a rescaled field leaves the band.
class Unresolved : public Error {
 public:
  using Error::Error;
};

// A documented precondition of an operation does not hold.
class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

// A computed object failed one of its certified invariants; the message names it.
class CertificationFailed : public Error {
 public:
  using Error::Error;
};

class NotConverged : public Error {
 public:
  using Error::Error;
};

}  // namespace nlslab
