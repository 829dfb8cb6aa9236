#include "btrv/core/lexer.hpp"

#include <array>
#include <cctype>
#include <limits>

#include "btrv/core/errors.hpp"

namespace btrv {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Longest punctuation first.
constexpr std::array<std::string_view, 14> kMultiPunct = {
    "-->", "<=", ">=", "!=", "==", "=>", ":=", "->", "--", "&&", "||", "..", "\xE2\x89\xA4", "\xE2\x89\xA5"};

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  std::size_t line = 1;
  std::size_t col = 1;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
        ++col;
      }
    }
  };

  while (i < text.size()) {
    char c = text[i];
    if (c == '\n' || c == ' ' || c == '\t' || c == '\r') {
      advance(1);
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < text.size() && text[i + 1] == '/')) {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = col;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      tok.kind = Token::Kind::Ident;
      tok.text = std::string(text.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(tok));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      std::uint64_t v = 0;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
        std::uint64_t d = static_cast<std::uint64_t>(text[j] - '0');
        if (v > (static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()) - d) / 10)
          throw ParseError("integer literal out of range", line, col);
        v = v * 10 + d;
        ++j;
      }
      if (j < text.size() && ident_start(text[j])) throw ParseError("malformed number", line, col);
      tok.kind = Token::Kind::Int;
      tok.ival = static_cast<std::int64_t>(v);
      tok.text = std::string(text.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(tok));
      continue;
    }
    if (c == '<' && i + 1 < text.size() && ident_start(text[i + 1])) {
      std::size_t j = i + 1;
      while (j < text.size() && ident_char(text[j])) ++j;
      if (j < text.size() && text[j] == '>') {
        tok.kind = Token::Kind::Symbol;
        tok.text = std::string(text.substr(i + 1, j - i - 1));
        advance(j + 1 - i);
        out.push_back(std::move(tok));
        continue;
      }
    }
    bool matched = false;
    for (auto p : kMultiPunct) {
      if (text.substr(i, p.size()) == p) {
        tok.kind = Token::Kind::Punct;
        if (p == "\xE2\x89\xA4")
          tok.text = "<=";
        else if (p == "\xE2\x89\xA5")
          tok.text = ">=";
        else
          tok.text = std::string(p);
        advance(p.size());
        matched = true;
        break;
      }
    }
    if (!matched && text.substr(i, 3) == "\xE2\x89\xA0") {
      tok.kind = Token::Kind::Punct;
      tok.text = "!=";
      advance(3);
      matched = true;
    }
    if (matched) {
      out.push_back(std::move(tok));
      continue;
    }
    static constexpr std::string_view kSingle = "()[]{},;:!?=<>+-*/%.@|&";
    if (kSingle.find(c) != std::string_view::npos) {
      tok.kind = Token::Kind::Punct;
      tok.text = std::string(1, c);
      advance(1);
      out.push_back(std::move(tok));
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }
  Token end;
  end.kind = Token::Kind::End;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

std::string describe(const Token& token) {
  switch (token.kind) {
    case Token::Kind::End: return "end of input";
    case Token::Kind::Symbol: return "'<" + token.text + ">'";
    default: return "'" + token.text + "'";
  }
}

TokenCursor::TokenCursor(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_.back().kind != Token::Kind::End) tokens_.push_back(Token{});
}

const Token& TokenCursor::peek(std::size_t ahead) const {
  std::size_t k = pos_ + ahead;
  return k < tokens_.size() ? tokens_[k] : tokens_.back();
}

const Token& TokenCursor::next() {
  const Token& t = peek();
  if (pos_ < tokens_.size() - 1) ++pos_;
  return t;
}

bool TokenCursor::is_punct(std::string_view p, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == Token::Kind::Punct && t.text == p;
}

bool TokenCursor::is_keyword(std::string_view word, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == Token::Kind::Ident && t.text == word;
}

bool TokenCursor::accept_punct(std::string_view p) {
  if (!is_punct(p)) return false;
  next();
  return true;
}

bool TokenCursor::accept_keyword(std::string_view word) {
  if (!is_keyword(word)) return false;
  next();
  return true;
}

void TokenCursor::expect_punct(std::string_view p) {
  if (!accept_punct(p)) fail("expected '" + std::string(p) + "' but found " + describe(peek()));
}

void TokenCursor::expect_keyword(std::string_view word) {
  if (!accept_keyword(word)) fail("expected '" + std::string(word) + "' but found " + describe(peek()));
}

std::string TokenCursor::expect_ident(std::string_view what) {
  if (peek().kind != Token::Kind::Ident) fail("expected " + std::string(what) + " but found " + describe(peek()));
  return next().text;
}

std::int64_t TokenCursor::expect_int(std::string_view what) {
  bool negative = false;
  if (is_punct("-") && peek(1).kind == Token::Kind::Int) {
    next();
    negative = true;
  }
  if (peek().kind != Token::Kind::Int) fail("expected " + std::string(what) + " but found " + describe(peek()));
  std::int64_t v = next().ival;
  return negative ? -v : v;
}

void TokenCursor::fail(const std::string& message) const { fail_at(peek(), message); }

void TokenCursor::fail_at(const Token& token, const std::string& message) const {
  throw ParseError(message, token.line, token.column);
}

}  // namespace btrv
