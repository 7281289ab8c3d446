#pragma once

#include <stdexcept>
#include <string>

namespace rankadapt {

/// Violated precondition or out-of-domain argument.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A factorization or iteration failed to produce a trustworthy result
/// (SVD non-convergence, unstable system, singular design, iteration cap).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Target is unreachable, e.g. a sample-complexity inversion whose threshold
/// sits below the irreducible approximation tail.
class InfeasibleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// File could not be read or written; the message names the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rankadapt
