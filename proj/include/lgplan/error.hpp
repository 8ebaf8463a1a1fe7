#pragma once

#include <stdexcept>
#include <string>

namespace lgplan {

/// Base for every error the library raises. `code()` is a stable
/// machine-readable tag (surfaced in the CLI's stderr JSON).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

/// Input text with a position (1-based line and column).
class ParseError : public Error {
 public:
  ParseError(std::string code, const std::string& message, int line, int column)
      : Error(std::move(code), "line " + std::to_string(line) + ", column " +
                                   std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace lgplan
