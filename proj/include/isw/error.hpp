#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace isw {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied something that violates a precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Histogram, basis, or embedding built for different domains/bases.
class BasisMismatch : public Error {
 public:
  using Error::Error;
};

// Malformed input file. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

// Numerical failure (disconnected graph, solver breakdown, ...).
class ComputationError : public Error {
 public:
  using Error::Error;
};

}  // namespace isw
