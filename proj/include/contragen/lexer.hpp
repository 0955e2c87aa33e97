#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include "contragen/diagnostics.hpp"

namespace contragen {

enum class Tok {
  End, Ident, Int, DocComment,
  LBrace, RBrace, LParen, RParen, Semi, Comma, Dot,
  Plus, Minus, Star, Slash,
  Lt, Le, Gt, Ge, EqEq, Ne, Assign,
  Not, AndAnd, OrOr
};

struct Token {
  Tok kind = Tok::End;
  SourcePos pos;
  std::string text;   // ident text, or doc comment body
  int64_t int_val = 0;
};

/// Tokenizes subject sources and test files. Doc comments (/** ... */)
/// are produced as tokens; // and /* ... */ comments are skipped.
class Lexer {
 public:
  explicit Lexer(std::string source) : src_(std::move(source)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments(out);
      Token t;
      t.pos = pos();
      if (at_end()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = peek();
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Tok::Ident;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
          t.text += get();
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        t.kind = Tok::Int;
        std::string digits;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek())))
          digits += get();
        try {
          t.int_val = std::stoll(digits);
        } catch (const std::out_of_range&) {
          throw ParseError(t.pos, "integer literal out of range: " + digits);
        }
      } else {
        t.kind = punct(t.pos);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  bool at_end() const { return i_ >= src_.size(); }
  char peek(size_t ahead = 0) const {
    return i_ + ahead < src_.size() ? src_[i_ + ahead] : '\0';
  }
  char get() {
    char c = src_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  SourcePos pos() const { return {line_, col_}; }

  void skip_space_and_comments(std::vector<Token>& out) {
    for (;;) {
      while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) get();
      if (peek() == '/' && peek(1) == '/') {
        while (!at_end() && peek() != '\n') get();
        continue;
      }
      if (peek() == '/' && peek(1) == '*') {
        bool is_doc = peek(2) == '*' && peek(3) != '/';
        Token t;
        t.pos = pos();
        get();
        get();
        if (is_doc) get();  // consume second '*'
        std::string body;
        for (;;) {
          if (at_end()) throw ParseError(t.pos, "unterminated comment");
          if (peek() == '*' && peek(1) == '/') {
            get();
            get();
            break;
          }
          body += get();
        }
        if (is_doc) {
          t.kind = Tok::DocComment;
          t.text = std::move(body);
          out.push_back(std::move(t));
        }
        continue;
      }
      return;
    }
  }

  Tok punct(SourcePos at) {
    char c = get();
    switch (c) {
      case '{': return Tok::LBrace;
      case '}': return Tok::RBrace;
      case '(': return Tok::LParen;
      case ')': return Tok::RParen;
      case ';': return Tok::Semi;
      case ',': return Tok::Comma;
      case '.': return Tok::Dot;
      case '+': return Tok::Plus;
      case '-': return Tok::Minus;
      case '*': return Tok::Star;
      case '/': return Tok::Slash;
      case '<':
        if (peek() == '=') { get(); return Tok::Le; }
        return Tok::Lt;
      case '>':
        if (peek() == '=') { get(); return Tok::Ge; }
        return Tok::Gt;
      case '=':
        if (peek() == '=') { get(); return Tok::EqEq; }
        return Tok::Assign;
      case '!':
        if (peek() == '=') { get(); return Tok::Ne; }
        return Tok::Not;
      case '&':
        if (peek() == '&') { get(); return Tok::AndAnd; }
        break;
      case '|':
        if (peek() == '|') { get(); return Tok::OrOr; }
        break;
      default:
        break;
    }
    throw ParseError(at, std::string("unexpected character '") + c + "'");
  }

  std::string src_;
  size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace contragen
