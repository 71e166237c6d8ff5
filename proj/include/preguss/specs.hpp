#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "preguss/ast.hpp"
#include "preguss/int_width.hpp"
#include "preguss/interval.hpp"

namespace preguss {

// ACSL-subset specification language: quantifier-free integer predicates.
//
// Terms are mathematical (unbounded) integers. Division truncates toward zero
// like C, and is made total with x / 0 == 0 and x % 0 == x so evaluation never
// fails; every program division is guarded before it reaches a predicate.
//
// Free-variable keys: a program variable `x` is "x", `\result` is "\result"
// and `\old(x)` is "\old(x)". Substitutions and valuations use these keys.

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

const char* to_string(CmpOp op);
CmpOp negate(CmpOp op);
CmpOp mirror(CmpOp op);  // a op b  <=>  b mirror(op) a

struct Term;
struct Pred;
using TermPtr = std::shared_ptr<const Term>;
using PredPtr = std::shared_ptr<const Pred>;

struct Term {
  enum class Kind { Const, IntMin, IntMax, Var, Result, Old, Neg, Add, Sub, Mul, Div, Mod, Ite };

  Kind kind = Kind::Const;
  std::int64_t value = 0;  // Const
  std::string name;        // Var, Old
  TermPtr a, b;            // operands; Ite: then/else
  PredPtr cond;            // Ite
};

struct Pred {
  enum class Kind { True, False, Cmp, And, Or, Not, Implies };

  Kind kind = Kind::True;
  CmpOp op = CmpOp::Eq;
  TermPtr lhs, rhs;           // Cmp
  std::vector<PredPtr> args;  // And/Or: n-ary, Not: 1, Implies: 2
};

bool operator==(const Term& a, const Term& b);
bool operator==(const Pred& a, const Pred& b);
bool equal(const TermPtr& a, const TermPtr& b);
bool equal(const PredPtr& a, const PredPtr& b);

// Smart constructors. They fold closed literal arithmetic, flatten nested
// conjunctions/disjunctions and drop neutral elements; they never need the
// configured width (INT_MIN/INT_MAX stay symbolic).
namespace term {
TermPtr constant(std::int64_t v);
TermPtr int_min();
TermPtr int_max();
TermPtr var(std::string name);
TermPtr result();
TermPtr old(std::string name);
TermPtr neg(TermPtr a);
TermPtr add(TermPtr a, TermPtr b);
TermPtr sub(TermPtr a, TermPtr b);
TermPtr mul(TermPtr a, TermPtr b);
TermPtr div(TermPtr a, TermPtr b);
TermPtr mod(TermPtr a, TermPtr b);
TermPtr ite(PredPtr c, TermPtr a, TermPtr b);
}  // namespace term

namespace pred {
PredPtr truth();
PredPtr falsity();
PredPtr boolean(bool v);
PredPtr cmp(CmpOp op, TermPtr a, TermPtr b);
PredPtr conj(std::vector<PredPtr> ps);
PredPtr conj(PredPtr a, PredPtr b);
PredPtr disj(std::vector<PredPtr> ps);
PredPtr disj(PredPtr a, PredPtr b);
PredPtr negate(PredPtr p);
PredPtr implies(PredPtr p, PredPtr q);
}  // namespace pred

bool is_true(const PredPtr& p);
bool is_false(const PredPtr& p);

/// Key of a leaf term (Var, Result, Old); empty for other kinds.
std::string leaf_key(const Term& t);

std::set<std::string> free_vars(const TermPtr& t);
std::set<std::string> free_vars(const PredPtr& p);
void collect_free_vars(const TermPtr& t, std::set<std::string>& out);
void collect_free_vars(const PredPtr& p, std::set<std::string>& out);

/// True if the predicate multiplies two non-constant terms or divides by one.
bool is_nonlinear(const PredPtr& p);

using Bindings = std::map<std::string, TermPtr>;

/// Simultaneous substitution. Predicates have no binders, so it is trivially
/// capture-avoiding.
TermPtr substitute(const TermPtr& t, const Bindings& b);
PredPtr substitute(const PredPtr& p, const Bindings& b);

/// Replace INT_MIN/INT_MAX by literals and fold the result.
PredPtr instantiate_width(const PredPtr& p, IntWidth w);
TermPtr instantiate_width(const TermPtr& t, IntWidth w);

// Concrete evaluation over mathematical integers.
using Valuation = std::map<std::string, std::int64_t>;

class EvalError : public Error {
 public:
  using Error::Error;
};

/// Throws EvalError on an unbound variable or on int64 overflow.
std::int64_t evaluate(const TermPtr& t, const Valuation& v, IntWidth w);
bool evaluate(const PredPtr& p, const Valuation& v, IntWidth w);

// Three-valued evaluation over a box of intervals.
enum class Tri { False, True, Unknown };
using Box = std::map<std::string, Interval>;

Interval evaluate_interval(const TermPtr& t, const Box& box, IntWidth w);
Tri evaluate_tri(const PredPtr& p, const Box& box, IntWidth w);

// Rendering (canonical, bit-exact spacing) of terms and predicates.
std::string render(const TermPtr& t);
std::string render(const PredPtr& p);

enum class ClauseKind { Requires, Ensures, Assert, LoopInvariant, LoopAssigns };

const char* to_string(ClauseKind k);

struct Clause {
  ClauseKind kind = ClauseKind::Requires;
  PredPtr body = pred::truth();    // unused for LoopAssigns
  std::vector<std::string> vars;   // LoopAssigns
  std::string label;               // optional `assert label: P;`
  NodeId anchor = -1;              // function, loop or statement node

  bool is_contract_clause() const { return kind == ClauseKind::Requires || kind == ClauseKind::Ensures; }
  bool is_loop_clause() const { return kind == ClauseKind::LoopInvariant || kind == ClauseKind::LoopAssigns; }
};

bool operator==(const Clause& a, const Clause& b);

/// Parses one clause, e.g. "requires INT_MIN < x;". The anchor is left at -1.
/// Throws SpecSyntaxError or UnknownConstructError.
Clause parse_clause(const std::string& text);
/// Parses a standalone predicate (no keyword, no terminator).
PredPtr parse_predicate(const std::string& text);
std::string render_clause(const Clause& c);

struct Contract {
  std::string function;
  std::vector<PredPtr> requires_;
  std::vector<PredPtr> ensures;

  PredPtr requires_conj() const { return pred::conj(requires_); }
  PredPtr ensures_conj() const { return pred::conj(ensures); }
  bool empty() const { return requires_.empty() && ensures.empty(); }
};

/// Every function contract plus accepted loop/statement annotations, keyed by
/// anchor node. An absent contract means requires \true, ensures \true.
struct ContractEnv {
  std::map<std::string, Contract> contracts;
  std::map<NodeId, std::vector<PredPtr>> loop_invariants;
  std::map<NodeId, std::vector<std::string>> loop_assigns;
  std::map<NodeId, std::vector<PredPtr>> asserts;

  const Contract* find(const std::string& fn) const;
  Contract get(const std::string& fn) const;
};

}  // namespace preguss
