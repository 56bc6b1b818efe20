#pragma once

#include <stdexcept>
#include <string>

namespace convbound {

// Root of the library's error hierarchy. Anything escaping a convbound call
// that is not an Error is an internal bug, not bad input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid data: bad histogram values, distributions that do not normalize,
// out-of-range statistics inputs.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed input text. Carries the 1-based line number when known.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& message, std::size_t line)
      : ValidationError(message + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  explicit ParseError(const std::string& message)
      : ValidationError(message), line_(0) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Invalid configuration values (thresholds, GA settings, blend weights).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A statistic is undefined on the given input, e.g. Pearson correlation of a
// point mass. Raised instead of returning a silent 0.
class DegenerateDistributionError : public Error {
 public:
  using Error::Error;
};

}  // namespace convbound
