#pragma once

#include <stdexcept>
#include <string>

namespace nilhodge {

/// Input failed validation (bad structure constants, d^2 != 0, bad complex).
class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An internal identity that must hold did not (d-closedness of an
/// obstruction, accounting mismatch, disagreeing methods).
class InvariantError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

}  // namespace nilhodge
