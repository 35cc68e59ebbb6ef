#pragma once

#include <stdexcept>
#include <string>

namespace midconvex {

/// A set failed a midconvexity-based decomposition. `what()` carries the reason.
class NotMidconvexError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A finite view of an infinite set cannot certify the answer.
class WindowTooSmallError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configured size limit (group order, point count, iteration count) was hit.
class ResourceCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated an operation's precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace midconvex
