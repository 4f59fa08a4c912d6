#pragma once

#include <stdexcept>

namespace k3conics {

/// Raised when a construction produces an object that fails its own
/// defining invariants; always indicates a bug, never bad input.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a computed quantity contradicts a claim being verified.
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace k3conics
