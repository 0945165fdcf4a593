#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hvm {

/// Base for every error a user can cause (bad input, bad program, budget).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public DomainError {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : DomainError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column),
        message_(what) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  /// The diagnostic without its position prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

/// A next state escapes the [prevlim(s), nextlim(s)) window of its current state.
class AccessibilityError : public DomainError {
 public:
  using DomainError::DomainError;
};

class MachineFault : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace hvm
