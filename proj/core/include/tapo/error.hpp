#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tapo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed DSL input. Line and column are 1-based; 0 means unknown.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t line, std::size_t column)
      : Error(format(message, line, column)), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string format(const std::string& message, std::size_t line, std::size_t column) {
    if (line == 0) return message;
    return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
  }

  std::size_t line_;
  std::size_t column_;
};

// An identifier that is not declared in the governing signature.
class UnknownNameError : public Error {
 public:
  UnknownNameError(const std::string& kind, const std::string& name)
      : Error("unknown " + kind + " '" + name + "'"), name_(name) {}

  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class ContextError : public Error {
 public:
  using Error::Error;
};

// Inconsistent or incomplete declarations (duplicates, dangling references,
// missing restriction maps).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class GuardError : public Error {
 public:
  using Error::Error;
};

class OracleError : public Error {
 public:
  using Error::Error;
};

// The premise of a consult step is not derivable.
class HesitationError : public Error {
 public:
  using Error::Error;
};

}  // namespace tapo
