#include <cctype>
#include <memory>

#include "preguss/specs.hpp"

namespace preguss {

namespace {

enum class T { Ident, Backslash, Number, Op, End };

struct Tok {
  T kind;
  std::string text;
  std::int64_t number = 0;
  std::size_t pos = 0;
};

std::vector<Tok> lex_spec(const std::string& s) {
  static const char* ops[] = {"==>", "<==>", "==", "!=", "<=", ">=", "&&", "||", "<", ">", "!", "+", "-",
                              "*",   "/",    "%",  "(",  ")",  "?",  ":",  ";",  ",", "[", "]", "{", "}"};
  std::vector<Tok> out;
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = s[i];
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isalpha(c) || c == '_' || c == '\\') {
      ++i;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({c == '\\' ? T::Backslash : T::Ident, s.substr(start, i - start), 0, start});
      continue;
    }
    if (std::isdigit(c)) {
      std::int64_t v = 0;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        if (v > (std::int64_t{1} << 62) / 10) throw SpecSyntaxError(start, "integer literal too large");
        v = v * 10 + (s[i] - '0');
        ++i;
      }
      if (i < s.size() && (std::isalpha(static_cast<unsigned char>(s[i])) || s[i] == '_'))
        throw SpecSyntaxError(i, "malformed number");
      out.push_back({T::Number, s.substr(start, i - start), v, start});
      continue;
    }
    bool matched = false;
    for (const char* op : ops) {
      std::string o(op);
      if (s.compare(i, o.size(), o) == 0) {
        out.push_back({T::Op, o, 0, i});
        i += o.size();
        matched = true;
        break;
      }
    }
    if (!matched) throw SpecSyntaxError(i, std::string("unexpected character '") + s[i] + "'");
  }
  out.push_back({T::End, "<end>", 0, s.size()});
  return out;
}

// Untyped expression tree; typed into Term/Pred after parsing.
struct Node;
using NodePtr = std::shared_ptr<Node>;
struct Node {
  enum class K { Num, Ident, Result, Old, True, False, Neg, Not, Bin, Cmp, Ite } k;
  std::string text;  // Ident/Old name; Bin/Cmp operator
  std::int64_t value = 0;
  std::vector<NodePtr> kids;
  std::size_t pos = 0;
};

NodePtr node(Node::K k, std::size_t pos, std::vector<NodePtr> kids = {}, std::string text = {}) {
  auto n = std::make_shared<Node>();
  n->k = k;
  n->pos = pos;
  n->kids = std::move(kids);
  n->text = std::move(text);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex_spec(text)) {}

  const Tok& peek(std::size_t k = 0) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }
  bool at_op(const char* op) const { return peek().kind == T::Op && peek().text == op; }
  bool at_ident(const char* w) const { return peek().kind == T::Ident && peek().text == w; }
  const Tok& next() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }

  [[noreturn]] void fail(const std::string& expected) const {
    throw SpecSyntaxError(peek().pos, "expected " + expected + ", found '" + peek().text + "'");
  }

  void expect_op(const char* op) {
    if (!at_op(op)) fail(std::string("'") + op + "'");
    next();
  }

  NodePtr expr() { return ternary(); }

  NodePtr ternary() {
    NodePtr c = implication();
    if (at_op("?")) {
      std::size_t pos = next().pos;
      NodePtr a = ternary();
      expect_op(":");
      NodePtr b = ternary();
      return node(Node::K::Ite, pos, {c, a, b});
    }
    return c;
  }

  NodePtr implication() {
    NodePtr a = disjunction();
    if (at_op("<==>")) throw UnknownConstructError(peek().pos, "<==>");
    if (at_op("==>")) {
      std::size_t pos = next().pos;
      NodePtr b = implication();
      return node(Node::K::Bin, pos, {a, b}, "==>");
    }
    return a;
  }

  NodePtr disjunction() {
    NodePtr a = conjunction();
    while (at_op("||")) {
      std::size_t pos = next().pos;
      a = node(Node::K::Bin, pos, {a, conjunction()}, "||");
    }
    return a;
  }

  NodePtr conjunction() {
    NodePtr a = comparison();
    while (at_op("&&")) {
      std::size_t pos = next().pos;
      a = node(Node::K::Bin, pos, {a, comparison()}, "&&");
    }
    return a;
  }

  static bool is_cmp(const Tok& t) {
    return t.kind == T::Op && (t.text == "==" || t.text == "!=" || t.text == "<" || t.text == "<=" ||
                               t.text == ">" || t.text == ">=");
  }

  // Chained comparisons (a <= b < c) mean the conjunction of adjacent pairs.
  NodePtr comparison() {
    NodePtr first = additive();
    if (!is_cmp(peek())) return first;
    std::vector<NodePtr> parts;
    NodePtr left = first;
    while (is_cmp(peek())) {
      const Tok& op = next();
      NodePtr right = additive();
      parts.push_back(node(Node::K::Cmp, op.pos, {left, right}, op.text));
      left = right;
    }
    NodePtr r = parts.front();
    for (std::size_t k = 1; k < parts.size(); ++k) r = node(Node::K::Bin, parts[k]->pos, {r, parts[k]}, "&&");
    return r;
  }

  NodePtr additive() {
    NodePtr a = multiplicative();
    while (at_op("+") || at_op("-")) {
      const Tok& op = next();
      a = node(Node::K::Bin, op.pos, {a, multiplicative()}, op.text);
    }
    return a;
  }

  NodePtr multiplicative() {
    NodePtr a = unary();
    while (at_op("*") || at_op("/") || at_op("%")) {
      const Tok& op = next();
      a = node(Node::K::Bin, op.pos, {a, unary()}, op.text);
    }
    return a;
  }

  NodePtr unary() {
    if (at_op("-")) {
      std::size_t pos = next().pos;
      return node(Node::K::Neg, pos, {unary()});
    }
    if (at_op("!")) {
      std::size_t pos = next().pos;
      return node(Node::K::Not, pos, {unary()});
    }
    if (at_op("+")) {
      next();
      return unary();
    }
    return primary();
  }

  NodePtr primary() {
    const Tok& t = peek();
    if (t.kind == T::Number) {
      next();
      auto n = node(Node::K::Num, t.pos);
      n->value = t.number;
      return n;
    }
    if (t.kind == T::Op && t.text == "(") {
      next();
      NodePtr e = expr();
      expect_op(")");
      return e;
    }
    if (t.kind == T::Backslash) {
      next();
      if (t.text == "\\result") return node(Node::K::Result, t.pos);
      if (t.text == "\\true") return node(Node::K::True, t.pos);
      if (t.text == "\\false") return node(Node::K::False, t.pos);
      if (t.text == "\\old") {
        expect_op("(");
        if (peek().kind != T::Ident) fail("a variable inside \\old");
        std::string name = next().text;
        expect_op(")");
        return node(Node::K::Old, t.pos, {}, name);
      }
      throw UnknownConstructError(t.pos, t.text);
    }
    if (t.kind == T::Ident) {
      next();
      if (at_op("(") || at_op("["))
        throw UnknownConstructError(t.pos, t.text + peek().text);
      if (t.text == "true") return node(Node::K::True, t.pos);
      if (t.text == "false") return node(Node::K::False, t.pos);
      return node(Node::K::Ident, t.pos, {}, t.text);
    }
    if (t.kind == T::Op && t.text == "{") throw UnknownConstructError(t.pos, "{");
    fail("a term or predicate");
  }

  bool done() const { return peek().kind == T::End; }

  std::vector<Tok> toks_;
  std::size_t i_ = 0;
};

bool is_pred_node(const Node& n) {
  switch (n.k) {
    case Node::K::True:
    case Node::K::False:
    case Node::K::Not:
    case Node::K::Cmp:
      return true;
    case Node::K::Bin:
      return n.text == "&&" || n.text == "||" || n.text == "==>";
    case Node::K::Ite:
      return is_pred_node(*n.kids[1]);
    default:
      return false;
  }
}

PredPtr to_pred(const Node& n);

TermPtr to_term(const Node& n) {
  switch (n.k) {
    case Node::K::Num: return term::constant(n.value);
    case Node::K::Ident:
      if (n.text == "INT_MIN") return term::int_min();
      if (n.text == "INT_MAX") return term::int_max();
      return term::var(n.text);
    case Node::K::Result: return term::result();
    case Node::K::Old: return term::old(n.text);
    case Node::K::Neg: return term::neg(to_term(*n.kids[0]));
    case Node::K::Ite: return term::ite(to_pred(*n.kids[0]), to_term(*n.kids[1]), to_term(*n.kids[2]));
    case Node::K::Bin: {
      if (n.text == "+") return term::add(to_term(*n.kids[0]), to_term(*n.kids[1]));
      if (n.text == "-") return term::sub(to_term(*n.kids[0]), to_term(*n.kids[1]));
      if (n.text == "*") return term::mul(to_term(*n.kids[0]), to_term(*n.kids[1]));
      if (n.text == "/") return term::div(to_term(*n.kids[0]), to_term(*n.kids[1]));
      if (n.text == "%") return term::mod(to_term(*n.kids[0]), to_term(*n.kids[1]));
      break;
    }
    default:
      break;
  }
  throw SpecSyntaxError(n.pos, "expected an integer term but found a predicate");
}

CmpOp cmp_op(const std::string& s) {
  if (s == "==") return CmpOp::Eq;
  if (s == "!=") return CmpOp::Ne;
  if (s == "<") return CmpOp::Lt;
  if (s == "<=") return CmpOp::Le;
  if (s == ">") return CmpOp::Gt;
  return CmpOp::Ge;
}

PredPtr to_pred(const Node& n) {
  switch (n.k) {
    case Node::K::True: return pred::truth();
    case Node::K::False: return pred::falsity();
    case Node::K::Not: return pred::negate(to_pred(*n.kids[0]));
    case Node::K::Cmp: return pred::cmp(cmp_op(n.text), to_term(*n.kids[0]), to_term(*n.kids[1]));
    case Node::K::Ite: {
      PredPtr c = to_pred(*n.kids[0]);
      return pred::conj(pred::implies(c, to_pred(*n.kids[1])), pred::implies(pred::negate(c), to_pred(*n.kids[2])));
    }
    case Node::K::Bin:
      if (n.text == "&&") return pred::conj(to_pred(*n.kids[0]), to_pred(*n.kids[1]));
      if (n.text == "||") return pred::disj(to_pred(*n.kids[0]), to_pred(*n.kids[1]));
      if (n.text == "==>") return pred::implies(to_pred(*n.kids[0]), to_pred(*n.kids[1]));
      break;
    default:
      break;
  }
  throw SpecSyntaxError(n.pos, "expected a predicate but found an integer term");
}

}  // namespace

PredPtr parse_predicate(const std::string& text) {
  Parser p(text);
  NodePtr n = p.expr();
  if (!p.done()) p.fail("end of predicate");
  if (!is_pred_node(*n)) throw SpecSyntaxError(n->pos, "expected a predicate but found an integer term");
  return to_pred(*n);
}

Clause parse_clause(const std::string& text) {
  Parser p(text);
  Clause c;
  if (p.at_ident("requires")) {
    c.kind = ClauseKind::Requires;
  } else if (p.at_ident("ensures")) {
    c.kind = ClauseKind::Ensures;
  } else if (p.at_ident("assert")) {
    c.kind = ClauseKind::Assert;
  } else if (p.at_ident("loop")) {
    p.next();
    if (p.at_ident("invariant")) {
      c.kind = ClauseKind::LoopInvariant;
    } else if (p.at_ident("assigns")) {
      c.kind = ClauseKind::LoopAssigns;
    } else if (p.peek().kind == T::Ident && (p.peek().text == "variant" || p.peek().text == "allocates")) {
      throw UnknownConstructError(p.peek().pos, "loop " + p.peek().text);
    } else {
      p.fail("'invariant' or 'assigns'");
    }
  } else if (p.peek().kind == T::Ident &&
             (p.peek().text == "assigns" || p.peek().text == "behavior" || p.peek().text == "decreases" ||
              p.peek().text == "terminates" || p.peek().text == "predicate" || p.peek().text == "logic" ||
              p.peek().text == "axiomatic" || p.peek().text == "ghost" || p.peek().text == "allocates" ||
              p.peek().text == "frees" || p.peek().text == "assumes" || p.peek().text == "check")) {
    throw UnknownConstructError(p.peek().pos, p.peek().text);
  } else {
    p.fail("a clause keyword (requires, ensures, assert, loop invariant, loop assigns)");
  }
  p.next();

  if (c.kind == ClauseKind::LoopAssigns) {
    if (p.peek().kind == T::Backslash && p.peek().text == "\\nothing") {
      p.next();
    } else {
      while (true) {
        if (p.peek().kind != T::Ident) p.fail("a variable name");
        c.vars.push_back(p.next().text);
        if (!p.at_op(",")) break;
        p.next();
      }
    }
  } else {
    if (c.kind == ClauseKind::Assert && p.peek().kind == T::Ident && p.peek(1).kind == T::Op &&
        p.peek(1).text == ":") {
      c.label = p.next().text;
      p.next();
    }
    NodePtr n = p.expr();
    if (!is_pred_node(*n)) throw SpecSyntaxError(n->pos, "expected a predicate but found an integer term");
    c.body = to_pred(*n);
  }
  p.expect_op(";");
  if (!p.done()) p.fail("end of clause");

  if (c.kind != ClauseKind::Ensures) {
    std::set<std::string> fv = free_vars(c.body);
    for (const auto& v : fv)
      if (v.front() == '\\') throw SpecSyntaxError(0, v + " is only allowed in ensures clauses");
  }
  return c;
}

}  // namespace preguss
