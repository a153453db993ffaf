#pragma once

#include <stdexcept>
#include <string>

namespace catmip {

// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Raised by the formula parser; carries the 1-based source position.
struct ParseError : Error {
  ParseError(const std::string& what, int line_, int col_)
      : Error(what + " (line " + std::to_string(line_) + ", column " +
              std::to_string(col_) + ")"),
        line(line_),
        col(col_) {}
  int line;
  int col;
};

// A construct the toolchain deliberately does not handle
// (e.g. negation normal form of a negated until).
struct UnsupportedConstruct : Error {
  explicit UnsupportedConstruct(const std::string& what) : Error(what) {}
};

// An enumeration or search exceeded its caller-supplied budget.
struct BudgetExceeded : Error {
  explicit BudgetExceeded(const std::string& what) : Error(what) {}
};

}  // namespace catmip
