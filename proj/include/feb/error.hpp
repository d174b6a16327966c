#pragma once

#include <stdexcept>
#include <string>

namespace feb {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid input: undeclared names, malformed configs, bad parameters.
struct InputError : Error {
  using Error::Error;
};

/// Syntax error in a text format, with 1-based line number.
struct ParseError : InputError {
  ParseError(const std::string& msg, std::size_t line)
      : InputError("line " + std::to_string(line) + ": " + msg), line(line) {}
  std::size_t line;
};

/// Learning failed in a non-recoverable way (e.g. no first weak hypothesis).
struct LearnError : Error {
  using Error::Error;
};

}  // namespace feb
