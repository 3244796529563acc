#pragma once

#include <stdexcept>
#include <string>

namespace legalie {

// Domain failure: bad input data, inconsistent files, unmet preconditions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Command-line misuse (maps to exit code 2).
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace legalie
