// Error types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace delib {

// Instance text that cannot be parsed, or an instance violating a structural
// invariant. line/column are 1-based; 0 means "not tied to a source location".
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& message, int line = 0, int column = 0)
      : std::runtime_error(format(message, line, column)),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(const std::string& message, int line, int column) {
    if (line <= 0) return message;
    return "line " + std::to_string(line) + ", col " + std::to_string(column) +
           ": " + message;
  }

  int line_;
  int column_;
};

// An unbounded-horizon instance admits no finite step bound: some method can
// deliberate at zero cost, so adding steps never stops paying off.
class UnboundedHorizonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Brute-force enumeration would exceed its size guard.
class GuardExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace delib
