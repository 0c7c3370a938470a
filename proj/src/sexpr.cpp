#include "engineir/sexpr.hpp"

#include <cctype>
#include <charconv>

#include "engineir/errors.hpp"

namespace engineir::sexpr {

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  Node read_top() {
    skip_space();
    if (pos_ >= text_.size()) throw SyntaxError(line_, col_, "expected '(' or atom, found end of input");
    Node node = read();
    skip_space();
    if (pos_ < text_.size())
      throw SyntaxError(line_, col_, "expected end of input after top-level expression");
    return node;
  }

 private:
  Node read() {
    skip_space();
    Node node;
    node.line = line_;
    node.col = col_;
    if (pos_ >= text_.size()) throw SyntaxError(line_, col_, "expected '(' or atom, found end of input");
    char c = text_[pos_];
    if (c == ')') throw SyntaxError(line_, col_, "unexpected ')'");
    if (c == '(') {
      advance();
      node.is_list = true;
      for (;;) {
        skip_space();
        if (pos_ >= text_.size()) throw SyntaxError(line_, col_, "expected ')', found end of input");
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        node.items.push_back(read());
      }
      return node;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && !is_delim(text_[pos_])) advance();
    node.atom = std::string(text_.substr(start, pos_ - start));
    return node;
  }

  static bool is_delim(char c) {
    return c == '(' || c == ')' || c == ';' || std::isspace(static_cast<unsigned char>(c));
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::optional<std::int64_t> Node::as_int() const {
  if (is_list || atom.empty()) return std::nullopt;
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(atom.data(), atom.data() + atom.size(), value);
  if (ec != std::errc() || ptr != atom.data() + atom.size()) return std::nullopt;
  return value;
}

Node parse(std::string_view text) { return Reader(text).read_top(); }

bool is_name(std::string_view text) {
  if (text.empty()) return false;
  auto head = static_cast<unsigned char>(text[0]);
  if (!(std::isalpha(head) || head == '_')) return false;
  for (char c : text.substr(1)) {
    auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || u == '_')) return false;
  }
  return true;
}

void fail(const Node &at, const std::string &message) {
  throw SyntaxError(at.line, at.col, message);
}

}  // namespace engineir::sexpr
