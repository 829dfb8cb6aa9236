#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace btrv {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Text input that does not match a grammar. Carries a 1-based position.
class ParseError : public Error {
 public:
  ParseError(std::string message, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        message_(std::move(message)),
        line_(line),
        column_(column) {}

  const std::string& message() const { return message_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

/// A model that violates a structural invariant (unknown location, bad channel, ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Expression evaluation failure: type mismatch, out-of-domain assignment.
class EvalError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an operation's precondition, e.g. stepping a disabled transition.
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace btrv
