#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "vrpweave/error.hpp"

namespace vrp {

enum class TokenKind { Word, String, Symbol, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;  // unescaped for strings
  SourceLocation loc;

  bool is_symbol(std::string_view s) const { return kind == TokenKind::Symbol && text == s; }
};

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '.';
}

}  // namespace detail

/// Shared tokenizer for model documents and aspect files.
///
/// Words are runs of `[A-Za-z0-9_.]` so dotted ids ("1.2.2") and member
/// accesses ("vpt1.occupe") arrive as one token; the parsers split them.
/// `#` starts a comment running to end of line.
inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t line = 1;
  std::size_t col = 1;
  std::size_t i = 0;

  auto advance = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };

  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance();
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      advance();
      continue;
    }
    SourceLocation loc{line, col};
    if (c == '"') {
      advance();
      std::string value;
      bool closed = false;
      while (i < text.size()) {
        char d = text[i];
        if (d == '"') {
          advance();
          closed = true;
          break;
        }
        if (d == '\n') break;
        if (d == '\\' && i + 1 < text.size()) {
          char e = text[i + 1];
          if (e == '"' || e == '\\') {
            value += e;
            advance(2);
            continue;
          }
          if (e == 'n') {
            value += '\n';
            advance(2);
            continue;
          }
        }
        value += d;
        advance();
      }
      if (!closed) throw Error(ErrorCode::Syntax, "unterminated string", loc);
      tokens.push_back({TokenKind::String, std::move(value), loc});
      continue;
    }
    if (detail::is_word_char(c)) {
      std::size_t start = i;
      while (i < text.size() && detail::is_word_char(text[i])) advance();
      tokens.push_back({TokenKind::Word, std::string(text.substr(start, i - start)), loc});
      continue;
    }
    auto two = text.substr(i, 2);
    if (two == "&&" || two == "||" || two == "->") {
      tokens.push_back({TokenKind::Symbol, std::string(two), loc});
      advance(2);
      continue;
    }
    if (std::string_view("{}(),;:=!*").find(c) != std::string_view::npos) {
      tokens.push_back({TokenKind::Symbol, std::string(1, c), loc});
      advance();
      continue;
    }
    throw Error(ErrorCode::Syntax, std::string("unexpected character '") + c + "'", loc);
  }
  tokens.push_back({TokenKind::End, "", {line, col}});
  return tokens;
}

/// Cursor over a token vector with the expectation helpers both parsers use.
class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t idx = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[idx];
  }
  const Token& next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == TokenKind::End; }

  bool peek_keyword(std::string_view kw, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Word && detail::lower(t.text) == kw;
  }
  bool accept_keyword(std::string_view kw) {
    if (!peek_keyword(kw)) return false;
    next();
    return true;
  }
  bool accept_symbol(std::string_view s) {
    if (!peek().is_symbol(s)) return false;
    next();
    return true;
  }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    std::string found = t.kind == TokenKind::End ? "end of input"
                        : t.kind == TokenKind::String ? "\"" + t.text + "\""
                                                      : "'" + t.text + "'";
    throw Error(ErrorCode::Syntax, "expected " + what + ", found " + found, t.loc);
  }

  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) fail("'" + std::string(kw) + "'");
  }
  void expect_symbol(std::string_view s) {
    if (!accept_symbol(s)) fail("'" + std::string(s) + "'");
  }
  const Token& expect_string(const std::string& what = "string") {
    if (peek().kind != TokenKind::String) fail(what);
    return next();
  }
  const Token& expect_word(const std::string& what = "identifier") {
    if (peek().kind != TokenKind::Word) fail(what);
    return next();
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace vrp
