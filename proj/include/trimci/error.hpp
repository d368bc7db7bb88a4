#pragma once

#include <stdexcept>
#include <string>

namespace trimci {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration or argument values.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(long line, const std::string& msg)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

/// Numerical solver failure (non-convergence, near-degenerate denominator, ...).
class SolverError : public Error {
 public:
  explicit SolverError(const std::string& msg) : Error(msg) {}
};

/// A configured size/memory cap was exceeded.
class CapError : public Error {
 public:
  explicit CapError(const std::string& msg) : Error(msg) {}
};

/// Filesystem / stream failure.
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace trimci
