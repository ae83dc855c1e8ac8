#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lrbm {

// Malformed input text. `line` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Arity, type-tag or signature violations.
class TypeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed input that cannot be used (unknown constants, empty classes, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid hyperparameters or option combinations.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lrbm
