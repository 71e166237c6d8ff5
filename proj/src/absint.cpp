#include "preguss/absint.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace preguss {

const char* to_string(RteKind k) {
  switch (k) {
    case RteKind::DivByZero: return "DivByZero";
    case RteKind::SignedOverflow: return "SignedOverflow";
    case RteKind::CallSitePrecondition: return "CallSitePrecondition";
  }
  return "?";
}

const char* to_string(AssertionStatus s) {
  switch (s) {
    case AssertionStatus::Proven: return "Proven";
    case AssertionStatus::Alarm: return "Alarm";
    case AssertionStatus::Pending: return "Pending";
  }
  return "?";
}

std::string RteAssertion::label() const {
  switch (kind) {
    case RteKind::DivByZero: return "division_by_0";
    case RteKind::SignedOverflow: return "overflow";
    case RteKind::CallSitePrecondition: return "call_pre";
  }
  return "rte";
}

const RteAssertion* AnalysisResult::find(const std::string& id) const {
  for (const auto& a : assertions)
    if (a.id == id) return &a;
  return nullptr;
}

std::size_t AnalysisResult::count(RteKind k) const {
  return std::count_if(assertions.begin(), assertions.end(), [&](const RteAssertion& a) { return a.kind == k; });
}

std::size_t AnalysisResult::count(AssertionStatus s) const {
  return std::count_if(assertions.begin(), assertions.end(), [&](const RteAssertion& a) { return a.status == s; });
}

// ---- terms and guards ----

std::string call_result_symbol(const std::string& callee, NodeId call) {
  return "__ret_" + callee + "_" + std::to_string(call);
}

PredPtr truthy(const TermPtr& t) {
  if (t->kind == Term::Kind::Const) return pred::boolean(t->value != 0);
  if (t->kind == Term::Kind::Ite && t->a->kind == Term::Kind::Const && t->b->kind == Term::Kind::Const) {
    if (t->a->value != 0 && t->b->value == 0) return t->cond;
    if (t->a->value == 0 && t->b->value != 0) return pred::negate(t->cond);
  }
  return pred::cmp(CmpOp::Ne, t, term::constant(0));
}

TermPtr as_term(const PredPtr& p) { return term::ite(p, term::constant(1), term::constant(0)); }

namespace {

CmpOp cmp_of(BinaryOp op) {
  switch (op) {
    case BinaryOp::Lt: return CmpOp::Lt;
    case BinaryOp::Le: return CmpOp::Le;
    case BinaryOp::Gt: return CmpOp::Gt;
    case BinaryOp::Ge: return CmpOp::Ge;
    case BinaryOp::Eq: return CmpOp::Eq;
    default: return CmpOp::Ne;
  }
}

}  // namespace

TermPtr expr_to_term(const Expr& e, const TypedProgram& tp) {
  IntWidth w = tp.width();
  switch (e.kind) {
    case Expr::Kind::IntLit: return term::constant(e.value);
    case Expr::Kind::NamedConst: return term::constant(e.name == "INT_MIN" ? w.min() : w.max());
    case Expr::Kind::Var:
      if (auto g = tp.global_value(e.name)) return term::constant(*g);
      return term::var(e.name);
    case Expr::Kind::Unary: {
      TermPtr a = expr_to_term(e.lhs(), tp);
      return e.unary_op == UnaryOp::Neg ? term::neg(a) : as_term(pred::negate(truthy(a)));
    }
    case Expr::Kind::Binary: {
      TermPtr a = expr_to_term(e.lhs(), tp);
      TermPtr b = expr_to_term(e.rhs(), tp);
      switch (e.binary_op) {
        case BinaryOp::Add: return term::add(a, b);
        case BinaryOp::Sub: return term::sub(a, b);
        case BinaryOp::Mul: return term::mul(a, b);
        case BinaryOp::Div: return term::div(a, b);
        case BinaryOp::Mod: return term::mod(a, b);
        case BinaryOp::And: return as_term(pred::conj(truthy(a), truthy(b)));
        case BinaryOp::Or: return as_term(pred::disj(truthy(a), truthy(b)));
        default: return as_term(pred::cmp(cmp_of(e.binary_op), a, b));
      }
    }
    case Expr::Kind::Call: return term::var(call_result_symbol(e.name, e.id));
  }
  return term::constant(0);
}

std::vector<Guard> guards_for(const Expr& op, const TermPtr& a, const TermPtr& b, IntWidth w) {
  std::vector<Guard> out;
  std::string n = std::to_string(op.id);
  auto range = [&](const TermPtr& r) {
    return pred::conj(pred::cmp(CmpOp::Le, term::constant(w.min()), r), pred::cmp(CmpOp::Le, r, term::constant(w.max())));
  };
  if (op.kind == Expr::Kind::Unary && op.unary_op == UnaryOp::Neg) {
    out.push_back({RteKind::SignedOverflow, "overflow@" + n, pred::cmp(CmpOp::Le, term::constant(-w.max()), a)});
  } else if (op.kind == Expr::Kind::Binary) {
    switch (op.binary_op) {
      case BinaryOp::Add: out.push_back({RteKind::SignedOverflow, "overflow@" + n, range(term::add(a, b))}); break;
      case BinaryOp::Sub: out.push_back({RteKind::SignedOverflow, "overflow@" + n, range(term::sub(a, b))}); break;
      case BinaryOp::Mul: out.push_back({RteKind::SignedOverflow, "overflow@" + n, range(term::mul(a, b))}); break;
      case BinaryOp::Div:
      case BinaryOp::Mod: {
        out.push_back({RteKind::DivByZero, "div0@" + n, pred::cmp(CmpOp::Ne, b, term::constant(0))});
        PredPtr ov = pred::disj(pred::cmp(CmpOp::Ne, a, term::constant(w.min())),
                                pred::cmp(CmpOp::Ne, b, term::constant(-1)));
        if (!is_true(ov)) out.push_back({RteKind::SignedOverflow, "overflow@" + n, ov});
        break;
      }
      default:
        break;
    }
  }
  return out;
}

std::vector<RteAssertion> instrument_function(const TypedProgram& tp, const std::string& fn) {
  std::vector<RteAssertion> out;
  const FunctionDef* f = tp.function(fn);
  if (!f) throw UnknownNodeError("unknown function '" + fn + "'");
  std::vector<const Expr*> ops;
  for_each_stmt(*f->body, [&](const Stmt& s) {
    if (!s.expr) return;
    for_each_expr(*s.expr, [&](const Expr& e) { ops.push_back(&e); });
  });
  std::sort(ops.begin(), ops.end(), [](const Expr* x, const Expr* y) { return x->id < y->id; });
  for (const Expr* e : ops) {
    bool unary = e->kind == Expr::Kind::Unary && e->unary_op == UnaryOp::Neg;
    bool binary = e->kind == Expr::Kind::Binary && is_arithmetic(e->binary_op);
    if (!unary && !binary) continue;
    TermPtr a = expr_to_term(e->lhs(), tp);
    TermPtr b = binary ? expr_to_term(e->rhs(), tp) : nullptr;
    for (auto& g : guards_for(*e, a, b, tp.width())) {
      RteAssertion r;
      r.id = g.id;
      r.kind = g.kind;
      r.predicate = g.pred;
      r.node = e->id;
      r.stmt = tp.enclosing_stmt(e->id);
      r.host = fn;
      r.loc = e->loc;
      r.status = AssertionStatus::Pending;
      out.push_back(std::move(r));
    }
  }
  return out;
}

// ---- roots and reachability ----

std::vector<std::string> analysis_roots(const TypedProgram& tp) {
  if (tp.has_entry()) return {tp.entry()};
  std::set<std::string> called;
  for (const auto& c : tp.all_calls()) called.insert(c.callee);
  std::vector<std::string> roots;
  for (const auto& f : tp.program().functions)
    if (!called.count(f.name)) roots.push_back(f.name);
  return roots;
}

std::vector<std::string> reachable_functions(const TypedProgram& tp) {
  std::set<std::string> seen;
  std::vector<std::string> stack = analysis_roots(tp);
  while (!stack.empty()) {
    std::string f = stack.back();
    stack.pop_back();
    if (!seen.insert(f).second) continue;
    for (const auto& c : tp.info(f).calls) stack.push_back(c.callee);
  }
  std::vector<std::string> out;
  for (const auto& f : tp.program().functions)
    if (seen.count(f.name)) out.push_back(f.name);
  return out;
}

// ---- interval semantics ----

namespace {

using State = std::optional<AbstractEnv>;

Interval clamp_or_full(const Interval& r, IntWidth w) {
  if (r.is_bottom()) return r;
  return r.within(w) ? r : Interval::full(w);
}

Interval bool_interval(Tri t) {
  switch (t) {
    case Tri::True: return Interval::point(1);
    case Tri::False: return Interval::point(0);
    default: return Interval(0, 1);
  }
}

Tri truth_of(const Interval& i) {
  if (i.is_bottom()) return Tri::Unknown;
  if (!i.contains(0)) return Tri::True;
  if (i.is_point()) return Tri::False;
  return Tri::Unknown;
}

Tri tri_not(Tri t) { return t == Tri::True ? Tri::False : t == Tri::False ? Tri::True : Tri::Unknown; }

Tri compare(BinaryOp op, const Interval& a, const Interval& b) {
  Box box{{"a", a}, {"b", b}};
  IntWidth w;
  return evaluate_tri(pred::cmp(cmp_of(op), term::var("a"), term::var("b")), box, w);
}

// Guard entailment from operand intervals.
bool entailed(const Expr& op, RteKind kind, const Interval& a, const Interval& b, IntWidth w) {
  using namespace interval_ops;
  if (a.is_bottom() || (op.kind == Expr::Kind::Binary && b.is_bottom())) return true;
  if (op.kind == Expr::Kind::Unary) return a.lo() >= -w.max();
  switch (op.binary_op) {
    case BinaryOp::Add: return add(a, b).within(w);
    case BinaryOp::Sub: return sub(a, b).within(w);
    case BinaryOp::Mul: return mul(a, b).within(w);
    case BinaryOp::Div:
    case BinaryOp::Mod:
      if (kind == RteKind::DivByZero) return !b.contains(0);
      return !(a.contains(w.min()) && b.contains(-1));
    default:
      return true;
  }
}

Interval arith(const Expr& op, const Interval& a, const Interval& b, IntWidth w) {
  using namespace interval_ops;
  if (a.is_bottom() || b.is_bottom()) return Interval::bottom();
  switch (op.binary_op) {
    case BinaryOp::Add: return clamp_or_full(add(a, b), w);
    case BinaryOp::Sub: return clamp_or_full(sub(a, b), w);
    case BinaryOp::Mul: return clamp_or_full(mul(a, b), w);
    case BinaryOp::Div: return clamp_or_full(div(a, b), w);
    case BinaryOp::Mod: return clamp_or_full(mod(a, b), w);
    default: return Interval::full(w);
  }
}

State join(const State& a, const State& b) {
  if (!a) return b;
  if (!b) return a;
  AbstractEnv out = *a;
  for (const auto& [k, v] : *b) {
    auto it = out.find(k);
    if (it == out.end()) out[k] = v;
    else it->second = it->second.join(v);
  }
  return out;
}

State restrict_to(const State& s, const State& scope) {
  if (!s || !scope) return s;
  AbstractEnv out;
  for (const auto& [k, v] : *s)
    if (scope->count(k)) out[k] = v;
  return out;
}

class Analyzer {
 public:
  Analyzer(const TypedProgram& tp, const AnalysisConfig& cfg) : tp_(tp), w_(tp.width()), cfg_(cfg) {}

  AnalysisResult run(const std::vector<std::string>& roots, const std::vector<std::string>& functions) {
    for (const auto& f : functions) {
      for (auto& a : instrument_function(tp_, f)) {
        a.status = AssertionStatus::Proven;
        index_[a.id] = result_.assertions.size();
        result_.assertions.push_back(std::move(a));
      }
    }
    result_.analyzed = functions;
    result_.config = cfg_;
    for (const auto& r : roots) call_full(r);
    // Calls beyond the inline depth were summarized; analyze those bodies once with unconstrained parameters.
    while (!pending_summaries_.empty()) {
      std::string f = *pending_summaries_.begin();
      pending_summaries_.erase(pending_summaries_.begin());
      if (!summarized_.insert(f).second) continue;
      call_full(f);
    }
    return std::move(result_);
  }

 private:
  struct Frame {
    Interval ret;
  };

  void call_full(const std::string& fn) {
    const FunctionDef* f = tp_.function(fn);
    std::vector<Interval> args(f->params.size(), Interval::full(w_));
    call(fn, args, 0);
  }

  Interval call(const std::string& fn, const std::vector<Interval>& args, int depth) {
    const FunctionDef* f = tp_.function(fn);
    AbstractEnv env;
    for (std::size_t i = 0; i < f->params.size(); ++i) env[f->params[i].name] = args[i];
    frames_.push_back(Frame{});
    int saved_depth = depth_;
    depth_ = depth;
    exec(*f->body, State(env));
    depth_ = saved_depth;
    Interval r = frames_.back().ret;
    frames_.pop_back();
    return f->return_type == ValueType::Void ? Interval::point(0) : r;
  }

  bool collecting() const { return in_fixpoint_ == 0; }

  void step() {
    if (++steps_ > cfg_.max_steps)
      throw AnalysisBudgetExceeded("abstract interpretation exceeded its budget of " + std::to_string(cfg_.max_steps) +
                                   " transfer steps");
  }

  void check(const Expr& op, const Interval& a, const Interval& b) {
    if (!collecting()) return;
    std::string n = std::to_string(op.id);
    for (const char* prefix : {"div0@", "overflow@"}) {
      auto it = index_.find(prefix + n);
      if (it == index_.end()) continue;
      RteAssertion& as = result_.assertions[it->second];
      if (!entailed(op, as.kind, a, b, w_)) as.status = AssertionStatus::Alarm;
    }
  }

  // Stateful evaluation: analyzes calls, records guard statuses.
  Interval eval(const Expr& e, const State& s) {
    if (!s) return Interval::bottom();
    const AbstractEnv& env = *s;
    switch (e.kind) {
      case Expr::Kind::IntLit: return Interval::point(e.value);
      case Expr::Kind::NamedConst: return Interval::point(e.name == "INT_MIN" ? w_.min() : w_.max());
      case Expr::Kind::Var: {
        if (auto g = tp_.global_value(e.name)) return Interval::point(*g);
        auto it = env.find(e.name);
        return it == env.end() ? Interval::full(w_) : it->second;
      }
      case Expr::Kind::Unary: {
        Interval a = eval(e.lhs(), s);
        if (e.unary_op == UnaryOp::Not) return bool_interval(tri_not(truth_of(a)));
        check(e, a, Interval::bottom());
        return a.is_bottom() ? a : clamp_or_full(interval_ops::neg(a), w_);
      }
      case Expr::Kind::Binary: {
        if (e.binary_op == BinaryOp::And || e.binary_op == BinaryOp::Or) {
          bool is_and = e.binary_op == BinaryOp::And;
          Interval a = eval(e.lhs(), s);
          Tri ta = truth_of(a);
          State sb = filter(s, e.lhs(), is_and);
          Interval b = sb ? eval(e.rhs(), sb) : Interval::bottom();
          if (is_and ? ta == Tri::False : ta == Tri::True) return Interval::point(is_and ? 0 : 1);
          Tri tb = truth_of(b);
          if (b.is_bottom()) return Interval::point(is_and ? 0 : 1);
          if (ta == (is_and ? Tri::True : Tri::False)) return bool_interval(tb);
          return Interval(0, 1);
        }
        Interval a = eval(e.lhs(), s);
        Interval b = eval(e.rhs(), s);
        if (is_comparison(e.binary_op)) {
          if (a.is_bottom() || b.is_bottom()) return Interval::bottom();
          return bool_interval(compare(e.binary_op, a, b));
        }
        check(e, a, b);
        return arith(e, a, b, w_);
      }
      case Expr::Kind::Call: {
        std::vector<Interval> args;
        for (const auto& op : e.operands) {
          Interval v = eval(*op, s);
          if (v.is_bottom()) return v;
          args.push_back(v);
        }
        if (depth_ + 1 > cfg_.max_inline_depth) {
          pending_summaries_.insert(e.name);
          return Interval::full(w_);
        }
        // callee bodies are analyzed in context, but the caller only learns
        // whether the call can return at all
        Interval r = call(e.name, args, depth_ + 1);
        return r.is_bottom() ? r : Interval::full(w_);
      }
    }
    return Interval::full(w_);
  }

  // Pure evaluation used by condition filtering: calls are unconstrained.
  Interval peek(const Expr& e, const AbstractEnv& env) { return eval_expr(env, e, w_); }

  State filter(const State& s, const Expr& c, bool truth) {
    if (!s) return s;
    if (c.kind == Expr::Kind::Unary && c.unary_op == UnaryOp::Not) return filter(s, c.lhs(), !truth);
    if (c.kind == Expr::Kind::Binary && (c.binary_op == BinaryOp::And || c.binary_op == BinaryOp::Or)) {
      bool is_and = c.binary_op == BinaryOp::And;
      if (is_and == truth) return filter(filter(s, c.lhs(), truth), c.rhs(), truth);
      return join(filter(s, c.lhs(), truth), filter(filter(s, c.lhs(), !truth), c.rhs(), truth));
    }
    if (c.kind == Expr::Kind::Binary && is_comparison(c.binary_op)) {
      BinaryOp op = c.binary_op;
      if (!truth) op = negate_cmp(op);
      return refine_cmp(s, op, c.lhs(), c.rhs());
    }
    Interval v = peek(c, *s);
    Tri t = truth_of(v);
    if (v.is_bottom() || (truth && t == Tri::False) || (!truth && t == Tri::True)) return std::nullopt;
    if (c.kind == Expr::Kind::Var && !tp_.global_value(c.name)) {
      AbstractEnv env = *s;
      Interval& x = env[c.name];
      if (!truth) {
        x = x.meet(Interval::point(0));
      } else if (x.lo() == 0) {
        x = Interval(1, x.hi()).meet(x);
      } else if (x.hi() == 0) {
        x = Interval(x.lo(), -1).meet(x);
      }
      if (x.is_bottom()) return std::nullopt;
      return env;
    }
    return s;
  }

  static BinaryOp negate_cmp(BinaryOp op) {
    switch (op) {
      case BinaryOp::Lt: return BinaryOp::Ge;
      case BinaryOp::Le: return BinaryOp::Gt;
      case BinaryOp::Gt: return BinaryOp::Le;
      case BinaryOp::Ge: return BinaryOp::Lt;
      case BinaryOp::Eq: return BinaryOp::Ne;
      default: return BinaryOp::Eq;
    }
  }

  static BinaryOp mirror_cmp(BinaryOp op) {
    switch (op) {
      case BinaryOp::Lt: return BinaryOp::Gt;
      case BinaryOp::Le: return BinaryOp::Ge;
      case BinaryOp::Gt: return BinaryOp::Lt;
      case BinaryOp::Ge: return BinaryOp::Le;
      default: return op;
    }
  }

  // Refines `x op other` for x a local variable.
  static Interval refine_var(const Interval& x, BinaryOp op, const Interval& o) {
    using interval_ops::sat_add;
    switch (op) {
      case BinaryOp::Lt: return x.meet(Interval(Interval::kNegInf, sat_add(o.hi(), -1)));
      case BinaryOp::Le: return x.meet(Interval(Interval::kNegInf, o.hi()));
      case BinaryOp::Gt: return x.meet(Interval(sat_add(o.lo(), 1), Interval::kPosInf));
      case BinaryOp::Ge: return x.meet(Interval(o.lo(), Interval::kPosInf));
      case BinaryOp::Eq: return x.meet(o);
      case BinaryOp::Ne:
        if (o.is_point() && !x.is_bottom()) {
          if (x.lo() == o.lo()) return Interval(sat_add(x.lo(), 1), x.hi());
          if (x.hi() == o.lo()) return Interval(x.lo(), sat_add(x.hi(), -1));
        }
        return x;
      default: return x;
    }
  }

  State refine_cmp(const State& s, BinaryOp op, const Expr& l, const Expr& r) {
    Interval a = peek(l, *s), b = peek(r, *s);
    if (a.is_bottom() || b.is_bottom()) return std::nullopt;
    if (compare(op, a, b) == Tri::False) return std::nullopt;
    AbstractEnv env = *s;
    auto local = [&](const Expr& e) { return e.kind == Expr::Kind::Var && !tp_.global_value(e.name) && env.count(e.name); };
    if (local(l)) {
      Interval& x = env[l.name];
      x = refine_var(x, op, b);
      if (x.is_bottom()) return std::nullopt;
    }
    if (local(r)) {
      Interval& y = env[r.name];
      y = refine_var(y, mirror_cmp(op), local(l) ? env[l.name] : a);
      if (y.is_bottom()) return std::nullopt;
    }
    return env;
  }

  void record(NodeId id, const State& s) {
    if (!collecting() || !s) return;
    auto it = result_.envs.find(id);
    if (it == result_.envs.end()) {
      result_.envs[id] = *s;
    } else {
      it->second = *join(State(it->second), s);
    }
  }

  State exec(const Stmt& st, State s) {
    step();
    if (st.kind != Stmt::Kind::While) record(st.id, s);
    if (!s) return s;
    switch (st.kind) {
      case Stmt::Kind::Decl:
      case Stmt::Kind::Assign: {
        Interval v = eval(*st.expr, s);
        if (v.is_bottom()) return std::nullopt;
        (*s)[st.name] = v;
        return s;
      }
      case Stmt::Kind::ExprStmt: {
        Interval v = eval(*st.expr, s);
        if (v.is_bottom()) return std::nullopt;
        return s;
      }
      case Stmt::Kind::Return: {
        if (st.expr) {
          Interval v = eval(*st.expr, s);
          frames_.back().ret = frames_.back().ret.join(v);
        }
        return std::nullopt;
      }
      case Stmt::Kind::Block: {
        State cur = s;
        for (const auto& c : st.stmts) cur = exec(*c, cur);
        return restrict_to(cur, s);
      }
      case Stmt::Kind::If: {
        Interval c = eval(*st.expr, s);
        if (c.is_bottom()) return std::nullopt;
        State t = exec(*st.then_branch, filter(s, *st.expr, true));
        State f = filter(s, *st.expr, false);
        if (st.else_branch) f = exec(*st.else_branch, f);
        return restrict_to(join(t, f), s);
      }
      case Stmt::Kind::While:
        return loop(st, s);
    }
    return s;
  }

  State widen_state(const State& prev, const State& next) {
    if (!prev) return next;
    if (!next) return prev;
    AbstractEnv out;
    for (const auto& [k, v] : *next) {
      auto it = prev->find(k);
      out[k] = it == prev->end() ? v : widen(it->second, v, w_);
    }
    return out;
  }

  State narrow_state(const State& prev, const State& next) {
    if (!prev || !next) return next;
    AbstractEnv out;
    for (const auto& [k, v] : *prev) {
      auto it = next->find(k);
      out[k] = it == next->end() ? v : narrow(v, it->second, w_);
    }
    return out;
  }

  State loop(const Stmt& st, const State& entry) {
    auto body_pass = [&](const State& head) {
      eval(*st.expr, head);
      return restrict_to(exec(*st.body, filter(head, *st.expr, true)), entry);
    };
    ++in_fixpoint_;
    State head = entry;
    for (int iter = 0;; ++iter) {
      State next = join(entry, body_pass(head));
      State grown = iter >= cfg_.widening_threshold ? widen_state(head, next) : join(head, next);
      if (grown == head) break;
      head = grown;
      if (iter > 10'000) {
        --in_fixpoint_;
        throw AnalysisBudgetExceeded("loop at node " + std::to_string(st.id) + " did not stabilize");
      }
    }
    head = narrow_state(head, join(entry, body_pass(head)));
    --in_fixpoint_;
    record(st.id, head);
    if (collecting()) body_pass(head);
    return filter(head, *st.expr, false);
  }

  const TypedProgram& tp_;
  IntWidth w_;
  AnalysisConfig cfg_;
  AnalysisResult result_;
  std::map<std::string, std::size_t> index_;
  std::vector<Frame> frames_;
  std::set<std::string> pending_summaries_, summarized_;
  int in_fixpoint_ = 0;
  int depth_ = 0;
  long steps_ = 0;
};

}  // namespace

Interval eval_expr(const AbstractEnv& env, const Expr& e, IntWidth w) {
  switch (e.kind) {
    case Expr::Kind::IntLit: return Interval::point(e.value);
    case Expr::Kind::NamedConst: return Interval::point(e.name == "INT_MIN" ? w.min() : w.max());
    case Expr::Kind::Var: {
      auto it = env.find(e.name);
      return it == env.end() ? Interval::full(w) : it->second;
    }
    case Expr::Kind::Unary: {
      Interval a = eval_expr(env, e.lhs(), w);
      if (a.is_bottom()) return a;
      if (e.unary_op == UnaryOp::Neg) return clamp_or_full(interval_ops::neg(a), w);
      return bool_interval(tri_not(truth_of(a)));
    }
    case Expr::Kind::Binary: {
      Interval a = eval_expr(env, e.lhs(), w);
      Interval b = eval_expr(env, e.rhs(), w);
      if (a.is_bottom() || b.is_bottom()) return Interval::bottom();
      if (is_comparison(e.binary_op)) return bool_interval(compare(e.binary_op, a, b));
      if (e.binary_op == BinaryOp::And || e.binary_op == BinaryOp::Or) {
        Tri ta = truth_of(a), tb = truth_of(b);
        if (e.binary_op == BinaryOp::And) {
          if (ta == Tri::False || tb == Tri::False) return Interval::point(0);
          return bool_interval(ta == Tri::True && tb == Tri::True ? Tri::True : Tri::Unknown);
        }
        if (ta == Tri::True || tb == Tri::True) return Interval::point(1);
        return bool_interval(ta == Tri::False && tb == Tri::False ? Tri::False : Tri::Unknown);
      }
      return arith(e, a, b, w);
    }
    case Expr::Kind::Call: return Interval::full(w);
  }
  return Interval::full(w);
}

AnalysisResult analyze(const TypedProgram& program, const AnalysisConfig& config) {
  Analyzer a(program, config);
  return a.run(analysis_roots(program), reachable_functions(program));
}

AnalysisResult analyze_function(const TypedProgram& program, const std::string& fn, const AnalysisConfig& config) {
  if (!program.function(fn)) throw UnknownNodeError("unknown function '" + fn + "'");
  std::set<std::string> seen;
  std::vector<std::string> stack{fn};
  while (!stack.empty()) {
    std::string f = stack.back();
    stack.pop_back();
    if (!seen.insert(f).second) continue;
    for (const auto& c : program.info(f).calls) stack.push_back(c.callee);
  }
  std::vector<std::string> fns;
  for (const auto& f : program.program().functions)
    if (seen.count(f.name)) fns.push_back(f.name);
  Analyzer a(program, config);
  return a.run({fn}, fns);
}

}  // namespace preguss
