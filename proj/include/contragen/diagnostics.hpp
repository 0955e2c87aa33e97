#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace contragen {

struct SourcePos {
  int line = 0;
  int col = 0;
};

inline std::string to_string(SourcePos p) {
  return std::to_string(p.line) + ":" + std::to_string(p.col);
}

/// Raised for syntax errors, duplicate names and unresolved types in
/// subject sources and test files.
class ParseError : public std::runtime_error {
 public:
  ParseError(SourcePos pos, const std::string& msg)
      : std::runtime_error(to_string(pos) + ": " + msg), pos_(pos) {}
  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

/// Internal invariant violation of the artifact itself. Always armed,
/// regardless of NDEBUG: tests exercise these paths.
class AssertionError : public std::logic_error {
 public:
  explicit AssertionError(const std::string& msg) : std::logic_error(msg) {}
};

#define CG_CHECK(cond, msg)                                \
  do {                                                     \
    if (!(cond)) throw ::contragen::AssertionError(msg);   \
  } while (0)

}  // namespace contragen
