#pragma once

#include <stdexcept>
#include <string>

namespace kramers {

// Bad caller input: out-of-range parameters, dimension mismatch, malformed grids.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation ran but did not produce a trustworthy number (divergence,
// non-converged eigensolve, failed refinement or truncation certificate).
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A mathematical precondition of a bound was found violated at runtime.
class PreconditionViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kramers
