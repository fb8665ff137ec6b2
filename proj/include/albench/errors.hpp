#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace albench {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed token in a sparse dataset; line and column are 1-based.
struct ParseError : Error {
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line(line),
        column(column) {}
  std::size_t line;
  std::size_t column;
};

struct NotBinaryError : Error {
  using Error::Error;
};

// Raised when a split or an initial pool lacks one class; the engine
// resamples the whole trial.
struct ColdStart : Error {
  using Error::Error;
};

struct NumericError : Error {
  NumericError(const std::string& what, double achieved = 0.0) : Error(what), achieved(achieved) {}
  double achieved;
};

struct UnknownStrategy : Error {
  using Error::Error;
};

}  // namespace albench
