#include "lexer.hpp"

#include <cctype>
#include <map>

namespace preguss::detail {

const char* spelling(Tok t) {
  switch (t) {
    case Tok::End: return "end-of-file";
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::KwInt: return "'int'";
    case Tok::KwVoid: return "'void'";
    case Tok::KwIf: return "'if'";
    case Tok::KwElse: return "'else'";
    case Tok::KwWhile: return "'while'";
    case Tok::KwReturn: return "'return'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Assign: return "'='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Percent: return "'%'";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::EqEq: return "'=='";
    case Tok::NotEq: return "'!='";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::Bang: return "'!'";
  }
  return "?";
}

namespace {

class Lexer {
 public:
  Lexer(std::string_view src, const std::string& file) : src_(src), file_(file) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      Token t;
      t.loc = here();
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          advance();
        t.text = std::string(src_.substr(start, pos_ - start));
        static const std::map<std::string, Tok> keywords = {{"int", Tok::KwInt},     {"void", Tok::KwVoid},
                                                            {"if", Tok::KwIf},       {"else", Tok::KwElse},
                                                            {"while", Tok::KwWhile}, {"return", Tok::KwReturn}};
        auto it = keywords.find(t.text);
        t.kind = it == keywords.end() ? Tok::Ident : it->second;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = pos_;
        std::uint64_t v = 0;
        bool overflow = false;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          std::uint64_t d = static_cast<std::uint64_t>(src_[pos_] - '0');
          if (v > (UINT64_MAX - d) / 10) overflow = true;
          v = v * 10 + d;
          advance();
        }
        t.kind = Tok::Number;
        t.text = std::string(src_.substr(start, pos_ - start));
        if (overflow || v > (std::uint64_t{1} << 62))
          throw SyntaxError(t.loc, "integer literal '" + t.text + "' (too large)", {});
        t.number = v;
      } else {
        t.kind = punct();
        t.text = spelling(t.kind);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  Location here() const { return Location{file_, line_, col_}; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  bool at(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  void skip_trivia() {
    bool line_start = col_ == 1;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        advance();
        line_start = true;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#' && line_start) {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (at("//")) {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (at("/*")) {
        Location open = here();
        advance();
        advance();
        while (pos_ < src_.size() && !at("*/")) advance();
        if (pos_ >= src_.size()) throw SyntaxError(open, "unterminated comment", {"'*/'"});
        advance();
        advance();
        line_start = false;
      } else {
        return;
      }
    }
  }

  Tok punct() {
    Location loc = here();
    auto two = [&](std::string_view s, Tok t) -> bool {
      if (!at(s)) return false;
      advance();
      advance();
      result_ = t;
      return true;
    };
    if (two("<=", Tok::Le) || two(">=", Tok::Ge) || two("==", Tok::EqEq) || two("!=", Tok::NotEq) ||
        two("&&", Tok::AndAnd) || two("||", Tok::OrOr))
      return result_;
    char c = src_[pos_];
    Tok t;
    switch (c) {
      case '(': t = Tok::LParen; break;
      case ')': t = Tok::RParen; break;
      case '{': t = Tok::LBrace; break;
      case '}': t = Tok::RBrace; break;
      case ',': t = Tok::Comma; break;
      case ';': t = Tok::Semi; break;
      case '=': t = Tok::Assign; break;
      case '+': t = Tok::Plus; break;
      case '-': t = Tok::Minus; break;
      case '*': t = Tok::Star; break;
      case '/': t = Tok::Slash; break;
      case '%': t = Tok::Percent; break;
      case '<': t = Tok::Lt; break;
      case '>': t = Tok::Gt; break;
      case '!': t = Tok::Bang; break;
      default:
        throw SyntaxError(loc, std::string("character '") + c + "'", {});
    }
    advance();
    return t;
  }

  std::string_view src_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Tok result_ = Tok::End;
};

}  // namespace

std::vector<Token> lex(std::string_view source, const std::string& file) { return Lexer(source, file).run(); }

}  // namespace preguss::detail
