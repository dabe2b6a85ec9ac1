#pragma once

#include <stdexcept>
#include <string>

namespace thematic {

// Root of every error raised by the library. Each named failure mode gets its
// own type so callers can catch exactly what they handle.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  EmptyInput() : Error("input is empty after normalization") {}
};

}  // namespace thematic
