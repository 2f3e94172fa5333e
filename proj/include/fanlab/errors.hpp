#pragma once

#include <stdexcept>
#include <string>

namespace fanlab {

// Invalid arguments and out-of-range accesses use the std exception types
// directly. The types below cover the failure modes that have no std analogue.

// A finite array was too small to represent the infinite-volume quantity
// being asked for (an edge cell moved, or a minimiser walked off the grid).
class GridTooSmall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The requested parameter combination is outside what a formula covers.
class UnsupportedCase : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A dynamics invariant was violated. Always a bug, never a user error.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace fanlab
