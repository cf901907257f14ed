#pragma once

#include <stdexcept>
#include <string>

namespace trajirl {

/// Base of every error raised by the library. Anything that is not an
/// IoError is a validation failure (bad input, bad configuration).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

#define TRAJIRL_DEFINE_ERROR(Name)   \
  class Name : public Error {        \
   public:                           \
    using Error::Error;              \
  }

TRAJIRL_DEFINE_ERROR(InvalidArgument);
TRAJIRL_DEFINE_ERROR(InvalidConfig);
TRAJIRL_DEFINE_ERROR(OutOfBounds);
TRAJIRL_DEFINE_ERROR(HorizonExceeded);
TRAJIRL_DEFINE_ERROR(NonAdjacentJump);
TRAJIRL_DEFINE_ERROR(DimensionMismatch);
TRAJIRL_DEFINE_ERROR(NonFinite);
TRAJIRL_DEFINE_ERROR(GapUnreachable);
TRAJIRL_DEFINE_ERROR(EmptyInput);
TRAJIRL_DEFINE_ERROR(LengthMismatch);
TRAJIRL_DEFINE_ERROR(TooShort);
TRAJIRL_DEFINE_ERROR(TooLarge);
TRAJIRL_DEFINE_ERROR(DemoInfeasible);

#undef TRAJIRL_DEFINE_ERROR

/// Malformed input file; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace trajirl
