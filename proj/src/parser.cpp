#include <functional>

#include "lexer.hpp"
#include "preguss/frontend.hpp"

namespace preguss {

using detail::Tok;
using detail::Token;

namespace {

using MExpr = std::shared_ptr<Expr>;
using MStmt = std::shared_ptr<Stmt>;

class Parser {
 public:
  Parser(std::vector<Token> toks, std::string file) : toks_(std::move(toks)), file_(std::move(file)) {}

  Program run() {
    Program p;
    p.file = file_;
    while (peek().kind != Tok::End) top_level(p);
    return p;
  }

 private:
  const Token& peek(std::size_t k = 0) const {
    std::size_t i = std::min(pos_ + k, toks_.size() - 1);
    return toks_[i];
  }

  bool accept(Tok t) {
    if (peek().kind != t) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::Ident || t.kind == Tok::Number ? "'" + t.text + "'" : detail::spelling(t.kind);
    throw SyntaxError(t.loc, found, std::move(expected));
  }

  const Token& expect(Tok t) {
    if (peek().kind != t) fail({detail::spelling(t)});
    return toks_[pos_++];
  }

  void top_level(Program& p) {
    const Token& type_tok = peek();
    ValueType type;
    if (accept(Tok::KwInt)) {
      type = ValueType::Int;
    } else if (accept(Tok::KwVoid)) {
      type = ValueType::Void;
    } else {
      fail({"'int'", "'void'"});
    }
    const Token& name = expect(Tok::Ident);
    if (type == ValueType::Int && accept(Tok::Assign)) {
      GlobalConst g;
      g.name = name.text;
      g.loc = type_tok.loc;
      g.init = expression();
      expect(Tok::Semi);
      p.globals.push_back(std::move(g));
      return;
    }
    if (peek().kind != Tok::LParen) fail(type == ValueType::Int ? std::vector<std::string>{"'('", "'='"}
                                                               : std::vector<std::string>{"'('"});
    ++pos_;
    FunctionDef fn;
    fn.name = name.text;
    fn.loc = type_tok.loc;
    fn.return_type = type;
    if (peek().kind == Tok::KwVoid && peek(1).kind == Tok::RParen) {
      ++pos_;
    } else if (peek().kind != Tok::RParen) {
      for (;;) {
        if (peek().kind != Tok::KwInt) fail({"'int'", "'void'", "')'"});
        ++pos_;
        const Token& pn = expect(Tok::Ident);
        fn.params.push_back(Param{pn.text, pn.loc});
        if (accept(Tok::Comma)) continue;
        if (peek().kind != Tok::RParen) fail({"','", "')'"});
        break;
      }
    }
    expect(Tok::RParen);
    if (peek().kind != Tok::LBrace) fail({"'{'"});
    fn.body = block();
    p.functions.push_back(std::move(fn));
  }

  MStmt make(Stmt::Kind k, Location loc) {
    auto s = std::make_shared<Stmt>();
    s->kind = k;
    s->loc = std::move(loc);
    return s;
  }

  MStmt block() {
    auto b = make(Stmt::Kind::Block, expect(Tok::LBrace).loc);
    while (peek().kind != Tok::RBrace) {
      if (peek().kind == Tok::End) fail({"'}'"});
      b->stmts.push_back(statement());
    }
    ++pos_;
    return b;
  }

  MStmt statement() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::LBrace:
        return block();
      case Tok::KwInt: {
        auto s = make(Stmt::Kind::Decl, t.loc);
        ++pos_;
        s->name = expect(Tok::Ident).text;
        expect(Tok::Assign);
        s->expr = expression();
        expect(Tok::Semi);
        return s;
      }
      case Tok::KwIf: {
        auto s = make(Stmt::Kind::If, t.loc);
        ++pos_;
        expect(Tok::LParen);
        s->expr = expression();
        expect(Tok::RParen);
        s->then_branch = statement();
        if (accept(Tok::KwElse)) s->else_branch = statement();
        return s;
      }
      case Tok::KwWhile: {
        auto s = make(Stmt::Kind::While, t.loc);
        ++pos_;
        expect(Tok::LParen);
        s->expr = expression();
        expect(Tok::RParen);
        s->body = statement();
        return s;
      }
      case Tok::KwReturn: {
        auto s = make(Stmt::Kind::Return, t.loc);
        ++pos_;
        if (!accept(Tok::Semi)) {
          s->expr = expression();
          expect(Tok::Semi);
        }
        return s;
      }
      case Tok::Ident:
        if (peek(1).kind == Tok::Assign) {
          auto s = make(Stmt::Kind::Assign, t.loc);
          s->name = t.text;
          pos_ += 2;
          s->expr = expression();
          expect(Tok::Semi);
          return s;
        }
        [[fallthrough]];
      default: {
        if (!starts_expression(t.kind))
          fail({"'{'", "'int'", "'if'", "'while'", "'return'", "identifier", "number", "'('", "'-'", "'!'", "'}'"});
        auto s = make(Stmt::Kind::ExprStmt, t.loc);
        s->expr = expression();
        expect(Tok::Semi);
        return s;
      }
    }
  }

  static bool starts_expression(Tok k) {
    return k == Tok::Ident || k == Tok::Number || k == Tok::LParen || k == Tok::Minus || k == Tok::Bang;
  }

  MExpr binary(BinaryOp op, MExpr l, MExpr r, Location loc) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Binary;
    e->binary_op = op;
    e->loc = std::move(loc);
    e->operands = {std::move(l), std::move(r)};
    return e;
  }

  // Precedence climbing over the C operator levels used by MiniC.
  MExpr expression() { return level(0); }

  MExpr level(int lvl) {
    static const std::vector<std::vector<std::pair<Tok, BinaryOp>>> levels = {
        {{Tok::OrOr, BinaryOp::Or}},
        {{Tok::AndAnd, BinaryOp::And}},
        {{Tok::EqEq, BinaryOp::Eq}, {Tok::NotEq, BinaryOp::Ne}},
        {{Tok::Lt, BinaryOp::Lt}, {Tok::Le, BinaryOp::Le}, {Tok::Gt, BinaryOp::Gt}, {Tok::Ge, BinaryOp::Ge}},
        {{Tok::Plus, BinaryOp::Add}, {Tok::Minus, BinaryOp::Sub}},
        {{Tok::Star, BinaryOp::Mul}, {Tok::Slash, BinaryOp::Div}, {Tok::Percent, BinaryOp::Mod}},
    };
    if (lvl == static_cast<int>(levels.size())) return unary();
    MExpr lhs = level(lvl + 1);
    for (;;) {
      bool matched = false;
      for (auto [tok, op] : levels[lvl]) {
        if (peek().kind == tok) {
          Location loc = peek().loc;
          ++pos_;
          lhs = binary(op, lhs, level(lvl + 1), loc);
          matched = true;
          break;
        }
      }
      if (!matched) return lhs;
    }
  }

  MExpr unary() {
    const Token& t = peek();
    if (t.kind == Tok::Minus && peek(1).kind == Tok::Number) {
      ++pos_;
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::IntLit;
      e->loc = t.loc;
      e->value = -static_cast<std::int64_t>(peek().number);
      ++pos_;
      return e;
    }
    if (t.kind == Tok::Minus || t.kind == Tok::Bang) {
      ++pos_;
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Unary;
      e->unary_op = t.kind == Tok::Minus ? UnaryOp::Neg : UnaryOp::Not;
      e->loc = t.loc;
      e->operands = {unary()};
      return e;
    }
    return primary();
  }

  MExpr primary() {
    const Token& t = peek();
    auto e = std::make_shared<Expr>();
    e->loc = t.loc;
    switch (t.kind) {
      case Tok::Number:
        ++pos_;
        e->kind = Expr::Kind::IntLit;
        e->value = static_cast<std::int64_t>(t.number);
        return e;
      case Tok::Ident:
        ++pos_;
        e->name = t.text;
        if (accept(Tok::LParen)) {
          e->kind = Expr::Kind::Call;
          if (!accept(Tok::RParen)) {
            for (;;) {
              e->operands.push_back(expression());
              if (accept(Tok::Comma)) continue;
              if (peek().kind != Tok::RParen) fail({"','", "')'"});
              ++pos_;
              break;
            }
          }
        } else if (t.text == "INT_MIN" || t.text == "INT_MAX") {
          e->kind = Expr::Kind::NamedConst;
        } else {
          e->kind = Expr::Kind::Var;
        }
        return e;
      case Tok::LParen: {
        ++pos_;
        MExpr inner = expression();
        expect(Tok::RParen);
        return inner;
      }
      default:
        fail({"identifier", "number", "'('", "'-'", "'!'"});
    }
  }

  std::vector<Token> toks_;
  std::string file_;
  std::size_t pos_ = 0;
};

// Pre-order numbering: globals first, then functions; a function before its body.
class Numbering {
 public:
  void expr(const ExprPtr& e) {
    const_cast<Expr&>(*e).id = next_++;
    for (const auto& op : e->operands) expr(op);
  }

  void stmt(const StmtPtr& s) {
    auto& m = const_cast<Stmt&>(*s);
    m.id = next_++;
    if (m.expr) expr(m.expr);
    if (m.then_branch) stmt(m.then_branch);
    if (m.else_branch) stmt(m.else_branch);
    if (m.body) stmt(m.body);
    for (const auto& c : m.stmts) stmt(c);
  }

  void program(Program& p) {
    for (auto& g : p.globals) {
      g.id = next_++;
      expr(g.init);
    }
    for (auto& f : p.functions) {
      f.id = next_++;
      stmt(f.body);
    }
  }

 private:
  NodeId next_ = 0;
};

}  // namespace

Program parse(std::string_view source, std::string file) {
  Program p = Parser(detail::lex(source, file), file).run();
  // Nodes are freshly allocated and not yet shared, so the numbering pass may
  // still write the id field.
  Numbering().program(p);
  return p;
}

}  // namespace preguss
