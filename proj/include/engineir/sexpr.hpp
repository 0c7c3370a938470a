#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace engineir::sexpr {

/// A parsed s-expression with source positions. Atoms keep their raw text;
/// callers decide whether an atom is a name, an integer or a variable.
struct Node {
  bool is_list = false;
  std::string atom;
  std::vector<Node> items;
  int line = 1;
  int col = 1;

  bool is_atom() const { return !is_list; }
  bool is_atom(std::string_view text) const { return !is_list && atom == text; }
  std::optional<std::int64_t> as_int() const;
};

/// Parses exactly one s-expression from `text`. `;` starts a comment that
/// runs to the end of the line. Throws SyntaxError on malformed input or
/// trailing tokens.
Node parse(std::string_view text);

/// `[a-zA-Z_][a-zA-Z0-9_]*`
bool is_name(std::string_view text);

[[noreturn]] void fail(const Node &at, const std::string &message);

}  // namespace engineir::sexpr
