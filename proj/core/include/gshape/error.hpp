#pragma once

#include <stdexcept>
#include <string>

namespace gshape {

// Caller passed something that violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical solver failed to produce a trustworthy result.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file on disk does not match the expected container layout.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gshape

namespace gshape {

// The masked boundary velocity vanished identically; the shape cannot move.
class StalledError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gshape
