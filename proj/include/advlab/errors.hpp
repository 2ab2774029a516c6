#pragma once

#include <stdexcept>
#include <string>

namespace advlab {

// Error taxonomy.  The CLI maps these onto exit codes: configuration and I/O
// problems exit 2, cap violations exit 3, everything that reaches a verdict
// exits 0/1 on pass/fail.

// A value is outside the mathematical domain of an operation (wrong range,
// non-symmetric input, nonzero diagonal where a zero one is required, ...).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A size or resource cap was exceeded (arity, matrix dimension, constraint
// count).  Caps exist because everything here is dense and exhaustive.
struct SizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterative routine failed to converge or hit a conditioning wall.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A certificate object violates one of its structural invariants.
struct CertificateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A witness or report is malformed (missing vectors, stray entries, ...).
struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input: unknown fixture, unreadable file, invalid flag combination.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace advlab
