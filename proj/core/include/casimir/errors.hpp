#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace casimir {

/// Invalid configuration: incompatible ranges, bad run-config keys, mismatched
/// model/dataset combinations. Maps to CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Message carries the path and 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, long line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

/// Numerical failure (non-convergence, diverged training). Carries the partial
/// result when one exists. Maps to CLI exit code 2.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what,
                        double partial = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(what), partial_(partial) {}
  double partial_value() const { return partial_; }

 private:
  double partial_;
};

}  // namespace casimir
