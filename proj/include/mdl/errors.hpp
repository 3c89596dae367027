#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mdl {

// Malformed user input: formula text, JSON files, team literals.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : InputError {
  ParseError(std::size_t off, std::vector<std::string> exp, const std::string& msg)
      : InputError(msg), offset(off), expected(std::move(exp)) {}
  std::size_t offset;
  std::vector<std::string> expected;
};

// Formula outside the language an operation accepts.
struct FragmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A size guard tripped (powerset cap, normal form cap, 64-world bitmask limit).
struct LimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mdl
