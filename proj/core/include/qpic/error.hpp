#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qpic {

/// Base of all library exceptions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: out-of-range parameters, malformed files, unknown keys.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the validity range of a model.
class RangeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Syntax error in a text input, located by line and column (1-based).
class ParseError : public ValidationError {
 public:
  ParseError(std::string source, std::size_t line, std::size_t column,
             const std::string& message)
      : ValidationError(source + ":" + std::to_string(line) + ":" +
                        std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A numerical procedure failed: no root in bracket, non-finite values,
/// truncated integration support.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace qpic
