#include "preguss/specs.hpp"

#include <sstream>

namespace preguss {

const char* to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

CmpOp negate(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return CmpOp::Ne;
    case CmpOp::Ne: return CmpOp::Eq;
    case CmpOp::Lt: return CmpOp::Ge;
    case CmpOp::Le: return CmpOp::Gt;
    case CmpOp::Gt: return CmpOp::Le;
    case CmpOp::Ge: return CmpOp::Lt;
  }
  return op;
}

CmpOp mirror(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return CmpOp::Gt;
    case CmpOp::Le: return CmpOp::Ge;
    case CmpOp::Gt: return CmpOp::Lt;
    case CmpOp::Ge: return CmpOp::Le;
    default: return op;
  }
}

bool equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

bool equal(const PredPtr& a, const PredPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

bool operator==(const Term& a, const Term& b) {
  return a.kind == b.kind && a.value == b.value && a.name == b.name && equal(a.a, b.a) && equal(a.b, b.b) &&
         equal(a.cond, b.cond);
}

bool operator==(const Pred& a, const Pred& b) {
  if (a.kind != b.kind || a.op != b.op || a.args.size() != b.args.size()) return false;
  if (!equal(a.lhs, b.lhs) || !equal(a.rhs, b.rhs)) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!equal(a.args[i], b.args[i])) return false;
  return true;
}

namespace {

std::shared_ptr<Term> make(Term::Kind k, TermPtr a = nullptr, TermPtr b = nullptr) {
  auto t = std::make_shared<Term>();
  t->kind = k;
  t->a = std::move(a);
  t->b = std::move(b);
  return t;
}

bool is_const(const TermPtr& t, std::int64_t* v = nullptr) {
  if (t->kind != Term::Kind::Const) return false;
  if (v) *v = t->value;
  return true;
}

std::shared_ptr<Pred> make_pred(Pred::Kind k) {
  auto p = std::make_shared<Pred>();
  p->kind = k;
  return p;
}

}  // namespace

namespace term {

TermPtr constant(std::int64_t v) {
  auto t = std::make_shared<Term>();
  t->value = v;
  return t;
}

TermPtr int_min() { return make(Term::Kind::IntMin); }
TermPtr int_max() { return make(Term::Kind::IntMax); }

TermPtr var(std::string name) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Var;
  t->name = std::move(name);
  return t;
}

TermPtr result() { return make(Term::Kind::Result); }

TermPtr old(std::string name) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Old;
  t->name = std::move(name);
  return t;
}

TermPtr neg(TermPtr a) {
  std::int64_t v;
  if (is_const(a, &v) && v != INT64_MIN) return constant(-v);
  if (a->kind == Term::Kind::Neg) return a->a;
  return make(Term::Kind::Neg, std::move(a));
}

TermPtr add(TermPtr a, TermPtr b) {
  std::int64_t x, y, r;
  bool ca = is_const(a, &x), cb = is_const(b, &y);
  if (ca && cb && !__builtin_add_overflow(x, y, &r)) return constant(r);
  if (ca && x == 0) return b;
  if (cb && y == 0) return a;
  return make(Term::Kind::Add, std::move(a), std::move(b));
}

TermPtr sub(TermPtr a, TermPtr b) {
  std::int64_t x, y, r;
  bool ca = is_const(a, &x), cb = is_const(b, &y);
  if (ca && cb && !__builtin_sub_overflow(x, y, &r)) return constant(r);
  if (cb && y == 0) return a;
  return make(Term::Kind::Sub, std::move(a), std::move(b));
}

TermPtr mul(TermPtr a, TermPtr b) {
  std::int64_t x, y, r;
  bool ca = is_const(a, &x), cb = is_const(b, &y);
  if (ca && cb && !__builtin_mul_overflow(x, y, &r)) return constant(r);
  if ((ca && x == 0) || (cb && y == 0)) return constant(0);
  if (ca && x == 1) return b;
  if (cb && y == 1) return a;
  return make(Term::Kind::Mul, std::move(a), std::move(b));
}

TermPtr div(TermPtr a, TermPtr b) {
  std::int64_t x, y;
  bool ca = is_const(a, &x), cb = is_const(b, &y);
  if (cb && y == 0) return constant(0);
  if (ca && cb && !(x == INT64_MIN && y == -1)) return constant(x / y);
  if (cb && y == 1) return a;
  return make(Term::Kind::Div, std::move(a), std::move(b));
}

TermPtr mod(TermPtr a, TermPtr b) {
  std::int64_t x, y;
  bool ca = is_const(a, &x), cb = is_const(b, &y);
  if (cb && y == 0) return a;
  if (ca && cb) return constant(y == -1 ? 0 : x % y);
  if (cb && (y == 1 || y == -1)) return constant(0);
  return make(Term::Kind::Mod, std::move(a), std::move(b));
}

TermPtr ite(PredPtr c, TermPtr a, TermPtr b) {
  if (is_true(c)) return a;
  if (is_false(c)) return b;
  if (equal(a, b)) return a;
  auto t = make(Term::Kind::Ite, std::move(a), std::move(b));
  t->cond = std::move(c);
  return t;
}

}  // namespace term

namespace pred {

PredPtr truth() {
  static const PredPtr t = make_pred(Pred::Kind::True);
  return t;
}

PredPtr falsity() {
  static const PredPtr f = make_pred(Pred::Kind::False);
  return f;
}

PredPtr boolean(bool v) { return v ? truth() : falsity(); }

PredPtr cmp(CmpOp op, TermPtr a, TermPtr b) {
  std::int64_t x, y;
  if (is_const(a, &x) && is_const(b, &y)) {
    switch (op) {
      case CmpOp::Eq: return boolean(x == y);
      case CmpOp::Ne: return boolean(x != y);
      case CmpOp::Lt: return boolean(x < y);
      case CmpOp::Le: return boolean(x <= y);
      case CmpOp::Gt: return boolean(x > y);
      case CmpOp::Ge: return boolean(x >= y);
    }
  }
  if (equal(a, b)) return boolean(op == CmpOp::Eq || op == CmpOp::Le || op == CmpOp::Ge);
  auto p = make_pred(Pred::Kind::Cmp);
  p->op = op;
  p->lhs = std::move(a);
  p->rhs = std::move(b);
  return p;
}

namespace {

PredPtr nary(Pred::Kind k, std::vector<PredPtr> ps) {
  // k is And or Or.
  bool is_and = k == Pred::Kind::And;
  std::vector<PredPtr> flat;
  for (auto& p : ps) {
    if (is_and ? is_true(p) : is_false(p)) continue;
    if (is_and ? is_false(p) : is_true(p)) return boolean(!is_and);
    if (p->kind == k) {
      for (const auto& q : p->args) flat.push_back(q);
    } else {
      flat.push_back(std::move(p));
    }
  }
  std::vector<PredPtr> out;
  for (auto& p : flat) {
    bool dup = false;
    for (const auto& q : out)
      if (equal(p, q)) dup = true;
    if (!dup) out.push_back(std::move(p));
  }
  if (out.empty()) return boolean(is_and);
  if (out.size() == 1) return out.front();
  auto r = make_pred(k);
  r->args = std::move(out);
  return r;
}

}  // namespace

PredPtr conj(std::vector<PredPtr> ps) { return nary(Pred::Kind::And, std::move(ps)); }
PredPtr conj(PredPtr a, PredPtr b) { return conj(std::vector<PredPtr>{std::move(a), std::move(b)}); }
PredPtr disj(std::vector<PredPtr> ps) { return nary(Pred::Kind::Or, std::move(ps)); }
PredPtr disj(PredPtr a, PredPtr b) { return disj(std::vector<PredPtr>{std::move(a), std::move(b)}); }

PredPtr negate(PredPtr p) {
  switch (p->kind) {
    case Pred::Kind::True: return falsity();
    case Pred::Kind::False: return truth();
    case Pred::Kind::Cmp: return cmp(preguss::negate(p->op), p->lhs, p->rhs);
    case Pred::Kind::Not: return p->args.front();
    default: {
      auto r = make_pred(Pred::Kind::Not);
      r->args = {std::move(p)};
      return r;
    }
  }
}

PredPtr implies(PredPtr p, PredPtr q) {
  if (is_true(p)) return q;
  if (is_false(p) || is_true(q)) return truth();
  if (is_false(q)) return negate(p);
  if (equal(p, q)) return truth();
  auto r = make_pred(Pred::Kind::Implies);
  r->args = {std::move(p), std::move(q)};
  return r;
}

}  // namespace pred

bool is_true(const PredPtr& p) { return p->kind == Pred::Kind::True; }
bool is_false(const PredPtr& p) { return p->kind == Pred::Kind::False; }

std::string leaf_key(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Var: return t.name;
    case Term::Kind::Result: return "\\result";
    case Term::Kind::Old: return "\\old(" + t.name + ")";
    default: return {};
  }
}

void collect_free_vars(const TermPtr& t, std::set<std::string>& out) {
  std::string k = leaf_key(*t);
  if (!k.empty()) {
    out.insert(k);
    return;
  }
  if (t->a) collect_free_vars(t->a, out);
  if (t->b) collect_free_vars(t->b, out);
  if (t->cond) collect_free_vars(t->cond, out);
}

void collect_free_vars(const PredPtr& p, std::set<std::string>& out) {
  if (p->lhs) collect_free_vars(p->lhs, out);
  if (p->rhs) collect_free_vars(p->rhs, out);
  for (const auto& a : p->args) collect_free_vars(a, out);
}

std::set<std::string> free_vars(const TermPtr& t) {
  std::set<std::string> s;
  collect_free_vars(t, s);
  return s;
}

std::set<std::string> free_vars(const PredPtr& p) {
  std::set<std::string> s;
  collect_free_vars(p, s);
  return s;
}

namespace {

bool closed(const TermPtr& t) {
  return t->kind == Term::Kind::Const || t->kind == Term::Kind::IntMin || t->kind == Term::Kind::IntMax;
}

bool nonlinear(const TermPtr& t);

bool nonlinear_pred(const PredPtr& p) {
  if (p->lhs && nonlinear(p->lhs)) return true;
  if (p->rhs && nonlinear(p->rhs)) return true;
  for (const auto& a : p->args)
    if (nonlinear_pred(a)) return true;
  return false;
}

bool nonlinear(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Mul:
      if (!closed(t->a) && !closed(t->b)) return true;
      break;
    case Term::Kind::Div:
    case Term::Kind::Mod:
      if (!closed(t->b)) return true;
      break;
    default:
      break;
  }
  if (t->a && nonlinear(t->a)) return true;
  if (t->b && nonlinear(t->b)) return true;
  if (t->cond && nonlinear_pred(t->cond)) return true;
  return false;
}

}  // namespace

bool is_nonlinear(const PredPtr& p) { return nonlinear_pred(p); }

TermPtr substitute(const TermPtr& t, const Bindings& b) {
  if (b.empty()) return t;
  std::string k = leaf_key(*t);
  if (!k.empty()) {
    auto it = b.find(k);
    return it == b.end() ? t : it->second;
  }
  switch (t->kind) {
    case Term::Kind::Neg: return term::neg(substitute(t->a, b));
    case Term::Kind::Add: return term::add(substitute(t->a, b), substitute(t->b, b));
    case Term::Kind::Sub: return term::sub(substitute(t->a, b), substitute(t->b, b));
    case Term::Kind::Mul: return term::mul(substitute(t->a, b), substitute(t->b, b));
    case Term::Kind::Div: return term::div(substitute(t->a, b), substitute(t->b, b));
    case Term::Kind::Mod: return term::mod(substitute(t->a, b), substitute(t->b, b));
    case Term::Kind::Ite: return term::ite(substitute(t->cond, b), substitute(t->a, b), substitute(t->b, b));
    default: return t;
  }
}

PredPtr substitute(const PredPtr& p, const Bindings& b) {
  if (b.empty()) return p;
  switch (p->kind) {
    case Pred::Kind::True:
    case Pred::Kind::False:
      return p;
    case Pred::Kind::Cmp:
      return pred::cmp(p->op, substitute(p->lhs, b), substitute(p->rhs, b));
    case Pred::Kind::And:
    case Pred::Kind::Or: {
      std::vector<PredPtr> xs;
      for (const auto& a : p->args) xs.push_back(substitute(a, b));
      return p->kind == Pred::Kind::And ? pred::conj(std::move(xs)) : pred::disj(std::move(xs));
    }
    case Pred::Kind::Not:
      return pred::negate(substitute(p->args[0], b));
    case Pred::Kind::Implies:
      return pred::implies(substitute(p->args[0], b), substitute(p->args[1], b));
  }
  return p;
}

TermPtr instantiate_width(const TermPtr& t, IntWidth w) {
  switch (t->kind) {
    case Term::Kind::IntMin: return term::constant(w.min());
    case Term::Kind::IntMax: return term::constant(w.max());
    case Term::Kind::Neg: return term::neg(instantiate_width(t->a, w));
    case Term::Kind::Add: return term::add(instantiate_width(t->a, w), instantiate_width(t->b, w));
    case Term::Kind::Sub: return term::sub(instantiate_width(t->a, w), instantiate_width(t->b, w));
    case Term::Kind::Mul: return term::mul(instantiate_width(t->a, w), instantiate_width(t->b, w));
    case Term::Kind::Div: return term::div(instantiate_width(t->a, w), instantiate_width(t->b, w));
    case Term::Kind::Mod: return term::mod(instantiate_width(t->a, w), instantiate_width(t->b, w));
    case Term::Kind::Ite:
      return term::ite(instantiate_width(t->cond, w), instantiate_width(t->a, w), instantiate_width(t->b, w));
    default: return t;
  }
}

PredPtr instantiate_width(const PredPtr& p, IntWidth w) {
  switch (p->kind) {
    case Pred::Kind::True:
    case Pred::Kind::False:
      return p;
    case Pred::Kind::Cmp:
      return pred::cmp(p->op, instantiate_width(p->lhs, w), instantiate_width(p->rhs, w));
    case Pred::Kind::And:
    case Pred::Kind::Or: {
      std::vector<PredPtr> xs;
      for (const auto& a : p->args) xs.push_back(instantiate_width(a, w));
      return p->kind == Pred::Kind::And ? pred::conj(std::move(xs)) : pred::disj(std::move(xs));
    }
    case Pred::Kind::Not:
      return pred::negate(instantiate_width(p->args[0], w));
    case Pred::Kind::Implies:
      return pred::implies(instantiate_width(p->args[0], w), instantiate_width(p->args[1], w));
  }
  return p;
}

// ---- concrete evaluation ----

namespace {

std::int64_t overflow(const char* op) { throw EvalError(std::string("integer overflow in ") + op); }

bool cmp_values(CmpOp op, std::int64_t x, std::int64_t y) {
  switch (op) {
    case CmpOp::Eq: return x == y;
    case CmpOp::Ne: return x != y;
    case CmpOp::Lt: return x < y;
    case CmpOp::Le: return x <= y;
    case CmpOp::Gt: return x > y;
    case CmpOp::Ge: return x >= y;
  }
  return false;
}

}  // namespace

std::int64_t evaluate(const TermPtr& t, const Valuation& v, IntWidth w) {
  std::int64_t r;
  switch (t->kind) {
    case Term::Kind::Const: return t->value;
    case Term::Kind::IntMin: return w.min();
    case Term::Kind::IntMax: return w.max();
    case Term::Kind::Var:
    case Term::Kind::Result:
    case Term::Kind::Old: {
      auto it = v.find(leaf_key(*t));
      if (it == v.end()) throw EvalError("unbound variable " + leaf_key(*t));
      return it->second;
    }
    case Term::Kind::Neg: {
      std::int64_t a = evaluate(t->a, v, w);
      if (a == INT64_MIN) return overflow("negation");
      return -a;
    }
    case Term::Kind::Add:
      if (__builtin_add_overflow(evaluate(t->a, v, w), evaluate(t->b, v, w), &r)) return overflow("+");
      return r;
    case Term::Kind::Sub:
      if (__builtin_sub_overflow(evaluate(t->a, v, w), evaluate(t->b, v, w), &r)) return overflow("-");
      return r;
    case Term::Kind::Mul:
      if (__builtin_mul_overflow(evaluate(t->a, v, w), evaluate(t->b, v, w), &r)) return overflow("*");
      return r;
    case Term::Kind::Div: {
      std::int64_t a = evaluate(t->a, v, w), b = evaluate(t->b, v, w);
      if (b == 0) return 0;
      if (a == INT64_MIN && b == -1) return overflow("/");
      return a / b;
    }
    case Term::Kind::Mod: {
      std::int64_t a = evaluate(t->a, v, w), b = evaluate(t->b, v, w);
      if (b == 0) return a;
      if (b == -1) return 0;
      return a % b;
    }
    case Term::Kind::Ite:
      return evaluate(t->cond, v, w) ? evaluate(t->a, v, w) : evaluate(t->b, v, w);
  }
  return 0;
}

bool evaluate(const PredPtr& p, const Valuation& v, IntWidth w) {
  switch (p->kind) {
    case Pred::Kind::True: return true;
    case Pred::Kind::False: return false;
    case Pred::Kind::Cmp: return cmp_values(p->op, evaluate(p->lhs, v, w), evaluate(p->rhs, v, w));
    case Pred::Kind::And:
      for (const auto& a : p->args)
        if (!evaluate(a, v, w)) return false;
      return true;
    case Pred::Kind::Or:
      for (const auto& a : p->args)
        if (evaluate(a, v, w)) return true;
      return false;
    case Pred::Kind::Not: return !evaluate(p->args[0], v, w);
    case Pred::Kind::Implies: return !evaluate(p->args[0], v, w) || evaluate(p->args[1], v, w);
  }
  return false;
}

// ---- three-valued evaluation ----

Interval evaluate_interval(const TermPtr& t, const Box& box, IntWidth w) {
  using namespace interval_ops;
  switch (t->kind) {
    case Term::Kind::Const: return Interval::point(t->value);
    case Term::Kind::IntMin: return Interval::point(w.min());
    case Term::Kind::IntMax: return Interval::point(w.max());
    case Term::Kind::Var:
    case Term::Kind::Result:
    case Term::Kind::Old: {
      auto it = box.find(leaf_key(*t));
      return it == box.end() ? Interval::full(w) : it->second;
    }
    case Term::Kind::Neg: return neg(evaluate_interval(t->a, box, w));
    case Term::Kind::Add: return add(evaluate_interval(t->a, box, w), evaluate_interval(t->b, box, w));
    case Term::Kind::Sub: return sub(evaluate_interval(t->a, box, w), evaluate_interval(t->b, box, w));
    case Term::Kind::Mul: return mul(evaluate_interval(t->a, box, w), evaluate_interval(t->b, box, w));
    case Term::Kind::Div: return div(evaluate_interval(t->a, box, w), evaluate_interval(t->b, box, w));
    case Term::Kind::Mod: return mod(evaluate_interval(t->a, box, w), evaluate_interval(t->b, box, w));
    case Term::Kind::Ite:
      switch (evaluate_tri(t->cond, box, w)) {
        case Tri::True: return evaluate_interval(t->a, box, w);
        case Tri::False: return evaluate_interval(t->b, box, w);
        case Tri::Unknown: return evaluate_interval(t->a, box, w).join(evaluate_interval(t->b, box, w));
      }
  }
  return Interval::top();
}

namespace {

bool finite_point(const Interval& i) {
  return i.is_point() && i.lo() != Interval::kNegInf && i.lo() != Interval::kPosInf;
}

Tri tri_not(Tri t) { return t == Tri::True ? Tri::False : t == Tri::False ? Tri::True : Tri::Unknown; }

Tri tri_cmp(CmpOp op, const Interval& a, const Interval& b) {
  if (a.is_bottom() || b.is_bottom()) return Tri::True;
  switch (op) {
    case CmpOp::Lt:
      if (a.hi() < b.lo() && a.hi() != Interval::kPosInf && b.lo() != Interval::kNegInf) return Tri::True;
      if (a.lo() >= b.hi() && a.lo() != Interval::kNegInf && b.hi() != Interval::kPosInf) return Tri::False;
      return Tri::Unknown;
    case CmpOp::Le:
      if (a.hi() <= b.lo() && a.hi() != Interval::kPosInf && b.lo() != Interval::kNegInf) return Tri::True;
      if (a.lo() > b.hi() && a.lo() != Interval::kNegInf && b.hi() != Interval::kPosInf) return Tri::False;
      return Tri::Unknown;
    case CmpOp::Gt: return tri_cmp(CmpOp::Lt, b, a);
    case CmpOp::Ge: return tri_cmp(CmpOp::Le, b, a);
    case CmpOp::Eq:
      if (finite_point(a) && finite_point(b) && a.lo() == b.lo()) return Tri::True;
      if (tri_cmp(CmpOp::Lt, a, b) == Tri::True || tri_cmp(CmpOp::Lt, b, a) == Tri::True) return Tri::False;
      return Tri::Unknown;
    case CmpOp::Ne: return tri_not(tri_cmp(CmpOp::Eq, a, b));
  }
  return Tri::Unknown;
}

}  // namespace

Tri evaluate_tri(const PredPtr& p, const Box& box, IntWidth w) {
  switch (p->kind) {
    case Pred::Kind::True: return Tri::True;
    case Pred::Kind::False: return Tri::False;
    case Pred::Kind::Cmp:
      return tri_cmp(p->op, evaluate_interval(p->lhs, box, w), evaluate_interval(p->rhs, box, w));
    case Pred::Kind::And: {
      Tri r = Tri::True;
      for (const auto& a : p->args) {
        Tri t = evaluate_tri(a, box, w);
        if (t == Tri::False) return Tri::False;
        if (t == Tri::Unknown) r = Tri::Unknown;
      }
      return r;
    }
    case Pred::Kind::Or: {
      Tri r = Tri::False;
      for (const auto& a : p->args) {
        Tri t = evaluate_tri(a, box, w);
        if (t == Tri::True) return Tri::True;
        if (t == Tri::Unknown) r = Tri::Unknown;
      }
      return r;
    }
    case Pred::Kind::Not: return tri_not(evaluate_tri(p->args[0], box, w));
    case Pred::Kind::Implies: {
      Tri a = evaluate_tri(p->args[0], box, w);
      if (a == Tri::False) return Tri::True;
      Tri b = evaluate_tri(p->args[1], box, w);
      if (b == Tri::True) return Tri::True;
      if (a == Tri::True && b == Tri::False) return Tri::False;
      return Tri::Unknown;
    }
  }
  return Tri::Unknown;
}

// ---- rendering ----

namespace {

int term_prec(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Add:
    case Term::Kind::Sub: return 1;
    case Term::Kind::Mul:
    case Term::Kind::Div:
    case Term::Kind::Mod: return 2;
    case Term::Kind::Neg: return 3;
    case Term::Kind::Const: return t.value < 0 ? 3 : 4;
    default: return 4;
  }
}

void render_term(std::ostream& os, const Term& t);
void render_pred(std::ostream& os, const Pred& p);

void term_operand(std::ostream& os, const Term& t, int min_prec) {
  if (term_prec(t) < min_prec) {
    os << '(';
    render_term(os, t);
    os << ')';
  } else {
    render_term(os, t);
  }
}

const char* term_op(Term::Kind k) {
  switch (k) {
    case Term::Kind::Add: return "+";
    case Term::Kind::Sub: return "-";
    case Term::Kind::Mul: return "*";
    case Term::Kind::Div: return "/";
    default: return "%";
  }
}

void render_term(std::ostream& os, const Term& t) {
  switch (t.kind) {
    case Term::Kind::Const: os << t.value; break;
    case Term::Kind::IntMin: os << "INT_MIN"; break;
    case Term::Kind::IntMax: os << "INT_MAX"; break;
    case Term::Kind::Var: os << t.name; break;
    case Term::Kind::Result: os << "\\result"; break;
    case Term::Kind::Old: os << "\\old(" << t.name << ")"; break;
    case Term::Kind::Neg:
      os << '-';
      // "--x" would lex as two minus signs anyway, but "-(-5)" reads better than "--5".
      if (t.a->kind == Term::Kind::Const && t.a->value < 0) {
        os << '(' << t.a->value << ')';
      } else {
        term_operand(os, *t.a, 4);
      }
      break;
    case Term::Kind::Ite:
      os << '(';
      render_pred(os, *t.cond);
      os << " ? ";
      render_term(os, *t.a);
      os << " : ";
      render_term(os, *t.b);
      os << ')';
      break;
    default: {
      int p = term_prec(t);
      term_operand(os, *t.a, p);
      os << ' ' << term_op(t.kind) << ' ';
      term_operand(os, *t.b, p + 1);
      break;
    }
  }
}

int pred_prec(const Pred& p) {
  switch (p.kind) {
    case Pred::Kind::Implies: return 1;
    case Pred::Kind::Or: return 2;
    case Pred::Kind::And: return 3;
    case Pred::Kind::Cmp: return 4;
    default: return 5;
  }
}

void pred_operand(std::ostream& os, const Pred& p, int min_prec) {
  if (pred_prec(p) < min_prec) {
    os << '(';
    render_pred(os, p);
    os << ')';
  } else {
    render_pred(os, p);
  }
}

void render_pred(std::ostream& os, const Pred& p) {
  switch (p.kind) {
    case Pred::Kind::True: os << "\\true"; break;
    case Pred::Kind::False: os << "\\false"; break;
    case Pred::Kind::Cmp:
      render_term(os, *p.lhs);
      os << ' ' << to_string(p.op) << ' ';
      render_term(os, *p.rhs);
      break;
    case Pred::Kind::And:
    case Pred::Kind::Or: {
      int prec = pred_prec(p);
      for (std::size_t i = 0; i < p.args.size(); ++i) {
        if (i) os << (p.kind == Pred::Kind::And ? " && " : " || ");
        pred_operand(os, *p.args[i], prec + 1);
      }
      break;
    }
    case Pred::Kind::Not:
      os << '!';
      pred_operand(os, *p.args[0], 5);
      break;
    case Pred::Kind::Implies:
      pred_operand(os, *p.args[0], 2);
      os << " ==> ";
      pred_operand(os, *p.args[1], 1);
      break;
  }
}

}  // namespace

std::string render(const TermPtr& t) {
  std::ostringstream os;
  render_term(os, *t);
  return os.str();
}

std::string render(const PredPtr& p) {
  std::ostringstream os;
  render_pred(os, *p);
  return os.str();
}

const char* to_string(ClauseKind k) {
  switch (k) {
    case ClauseKind::Requires: return "requires";
    case ClauseKind::Ensures: return "ensures";
    case ClauseKind::Assert: return "assert";
    case ClauseKind::LoopInvariant: return "loop invariant";
    case ClauseKind::LoopAssigns: return "loop assigns";
  }
  return "?";
}

bool operator==(const Clause& a, const Clause& b) {
  return a.kind == b.kind && equal(a.body, b.body) && a.vars == b.vars && a.label == b.label && a.anchor == b.anchor;
}

std::string render_clause(const Clause& c) {
  std::string out = to_string(c.kind);
  out += ' ';
  if (c.kind == ClauseKind::LoopAssigns) {
    if (c.vars.empty()) out += "\\nothing";
    for (std::size_t i = 0; i < c.vars.size(); ++i) {
      if (i) out += ", ";
      out += c.vars[i];
    }
  } else {
    if (c.kind == ClauseKind::Assert && !c.label.empty()) out += c.label + ": ";
    out += render(c.body);
  }
  return out + ';';
}

const Contract* ContractEnv::find(const std::string& fn) const {
  auto it = contracts.find(fn);
  return it == contracts.end() ? nullptr : &it->second;
}

Contract ContractEnv::get(const std::string& fn) const {
  if (const Contract* c = find(fn)) return *c;
  Contract c;
  c.function = fn;
  return c;
}

}  // namespace preguss
