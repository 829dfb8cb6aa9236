#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace btrv {

struct Token {
  enum class Kind { Ident, Int, Symbol, Punct, End };

  Kind kind = Kind::End;
  std::string text;  // identifier, symbol name (without brackets) or punctuation
  std::int64_t ival = 0;
  std::size_t line = 1;
  std::size_t column = 1;
};

/// Splits text into tokens shared by every textual format in the project.
///
/// `#` and `//` start comments running to the end of the line. `<name>` with
/// no inner whitespace is a symbol literal; any other `<` is a relational
/// operator. The UTF-8 forms of <=, >= and != are normalized to ASCII.
std::vector<Token> tokenize(std::string_view text);

/// Cursor over a token vector with the error-reporting helpers parsers share.
class TokenCursor {
 public:
  explicit TokenCursor(std::vector<Token> tokens);

  const Token& peek(std::size_t ahead = 0) const;
  const Token& next();
  bool at_end() const { return peek().kind == Token::Kind::End; }

  bool is_punct(std::string_view p, std::size_t ahead = 0) const;
  bool is_keyword(std::string_view word, std::size_t ahead = 0) const;
  bool accept_punct(std::string_view p);
  bool accept_keyword(std::string_view word);
  void expect_punct(std::string_view p);
  void expect_keyword(std::string_view word);
  std::string expect_ident(std::string_view what);
  std::int64_t expect_int(std::string_view what);

  [[noreturn]] void fail(const std::string& message) const;
  [[noreturn]] void fail_at(const Token& token, const std::string& message) const;

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

std::string describe(const Token& token);

}  // namespace btrv
