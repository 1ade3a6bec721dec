#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace l0acc {

/// Malformed input text. Carries the 1-based line number of the offending line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Invalid user-facing configuration (bad fraction, task/loss mismatch, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Caller broke a documented precondition (index out of range, size mismatch).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Objective or derivative became non-finite.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace l0acc
