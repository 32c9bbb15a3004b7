#pragma once

#include <stdexcept>
#include <string>

namespace rmflow {

// Bad input: caught by the CLI and mapped to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A function was evaluated outside where it is defined (e.g. log of a
// non-positive spectrum).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Explosion, non-convergence, or a consistency check that failed at runtime.
// Exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Asking a moment-only law for a CDF, and similar.
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The closed moment hierarchy would need moments beyond the computed triangle.
class TruncationError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace rmflow
