#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bittrunc {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied value is outside the accepted domain (bad k, bad index set, bad address).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An input file or buffer does not match its declared format.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A line-oriented text input failed to parse. `line()` is 1-based.
class ParseError : public FormatError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : FormatError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// An unknown (X) memory value reached a consumer that needs a defined bit.
class UnknownValueError : public Error {
 public:
  using Error::Error;
};

}  // namespace bittrunc
