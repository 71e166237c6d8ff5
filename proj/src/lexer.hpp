#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "preguss/error.hpp"

namespace preguss::detail {

enum class Tok {
  End,
  Ident,
  Number,
  KwInt,
  KwVoid,
  KwIf,
  KwElse,
  KwWhile,
  KwReturn,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Semi,
  Assign,
  Plus,
  Minus,
  Star,
  Slash,
  Percent,
  Lt,
  Le,
  Gt,
  Ge,
  EqEq,
  NotEq,
  AndAnd,
  OrOr,
  Bang,
};

const char* spelling(Tok t);

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::uint64_t number = 0;
  Location loc;
};

/// Throws SyntaxError for an unknown character or an unterminated comment.
std::vector<Token> lex(std::string_view source, const std::string& file);

}  // namespace preguss::detail
