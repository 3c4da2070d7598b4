#pragma once

#include <stdexcept>
#include <string>

namespace gscfw {

// Argument outside the mathematical domain of a kernel (e.g. omega at t >= 1).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An oracle returned something inconsistent with its contract
// (negative FW gap beyond rounding, asymmetric gradient, ...).
class OracleViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Backtracking exceeded its doubling budget.
class BacktrackFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace gscfw
