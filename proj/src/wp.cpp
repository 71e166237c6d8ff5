#include <algorithm>
#include <functional>

#include "preguss/verifier.hpp"

namespace preguss {

std::string havoc_symbol(NodeId loop, const std::string& var) {
  return "__h" + std::to_string(loop) + "_" + var;
}

std::set<std::string> assigned_vars(const Stmt& s) {
  std::set<std::string> out;
  for_each_stmt(s, [&](const Stmt& x) {
    if (x.kind == Stmt::Kind::Assign) out.insert(x.name);
  });
  return out;
}

PredPtr ensures_for_body(const PredPtr& ensures, const FunctionDef& fn) {
  Bindings b;
  for (const auto& p : fn.params) b[p.name] = term::old(p.name);
  return substitute(ensures, b);
}

WpEngine::WpEngine(const TypedProgram& program, const ContractEnv& contracts, const FunctionDef& fn, WpMode mode,
                   WpTarget target)
    : tp_(program), contracts_(contracts), fn_(fn), mode_(mode), target_(std::move(target)) {}

PredPtr WpEngine::assume(const PredPtr& g, const PredPtr& rest) const {
  return mode_ == WpMode::Verify ? pred::implies(g, rest) : pred::conj(g, rest);
}

PredPtr WpEngine::invariant(NodeId loop) const {
  auto it = contracts_.loop_invariants.find(loop);
  if (it == contracts_.loop_invariants.end()) return pred::truth();
  return pred::conj(it->second);
}

PredPtr WpEngine::body(const std::optional<PredPtr>& normal, const ReturnK& ret) {
  PredPtr dflt = pred::boolean(mode_ == WpMode::Verify);
  PredPtr n = normal ? *normal : dflt;
  ReturnK r = ret ? ret : ReturnK([dflt](const TermPtr&) { return dflt; });
  PredPtr p = stmt(*fn_.body, n, r);
  Bindings entry;
  for (const auto& prm : fn_.params) entry["\\old(" + prm.name + ")"] = term::var(prm.name);
  return substitute(p, entry);
}

PredPtr WpEngine::stmt(const Stmt& s, const PredPtr& normal, const ReturnK& ret) {
  if (auto it = contracts_.asserts.find(s.id); it != contracts_.asserts.end()) {
    PredPtr a = pred::conj(it->second);
    if (target_.kind == WpTarget::Kind::Assert && target_.node == s.id) {
      reached_ = true;
      return mode_ == WpMode::Verify ? a : pred::negate(a);
    }
  }
  PredPtr res;
  switch (s.kind) {
    case Stmt::Kind::Block: {
      res = normal;
      for (auto it = s.stmts.rbegin(); it != s.stmts.rend(); ++it) res = stmt(**it, res, ret);
      break;
    }
    case Stmt::Kind::Decl:
    case Stmt::Kind::Assign: {
      std::string name = s.name;
      res = expr(*s.expr, [&, name](const TermPtr& t) { return substitute(normal, Bindings{{name, t}}); });
      break;
    }
    case Stmt::Kind::Return:
      if (s.expr) res = expr(*s.expr, [&](const TermPtr& t) { return ret(t); });
      else res = ret(nullptr);
      break;
    case Stmt::Kind::ExprStmt:
      res = expr(*s.expr, [&](const TermPtr&) { return normal; });
      break;
    case Stmt::Kind::If:
      res = expr(*s.expr, [&](const TermPtr& t) {
        PredPtr c = truthy(t);
        PredPtr a = stmt(*s.then_branch, normal, ret);
        PredPtr b = s.else_branch ? stmt(*s.else_branch, normal, ret) : normal;
        return pred::conj(pred::implies(c, a), pred::implies(pred::negate(c), b));
      });
      break;
    case Stmt::Kind::While:
      res = loop(s, normal, ret);
      break;
  }
  if (auto it = contracts_.asserts.find(s.id); it != contracts_.asserts.end())
    res = assume(pred::conj(it->second), res);
  return res;
}

PredPtr WpEngine::havoc(const Stmt& s, const PredPtr& p) {
  Bindings b;
  for (const auto& v : assigned_vars(*s.body)) b[v] = term::var(havoc_symbol(s.id, v));
  return substitute(p, b);
}

PredPtr WpEngine::loop(const Stmt& s, const PredPtr& normal, const ReturnK& ret) {
  bool here = target_.node == s.id &&
              (target_.kind == WpTarget::Kind::LoopEstablish || target_.kind == WpTarget::Kind::LoopPreserve);
  if (mode_ == WpMode::Definitive) return pred::falsity();
  auto inv = contracts_.loop_invariants.find(s.id);
  if (inv == contracts_.loop_invariants.end() || inv->second.empty())
    for (const auto& v : assigned_vars(*s.body)) missing_[havoc_symbol(s.id, v)] = s.id;
  PredPtr I = invariant(s.id);
  if (here && target_.kind == WpTarget::Kind::LoopEstablish) {
    reached_ = true;
    return I;
  }
  bool preserve = here;  // LoopPreserve on this loop
  // Preservation of this loop's invariant is its own VC; other VCs only assume it.
  PredPtr body_n = preserve ? I : pred::truth();
  ReturnK body_r = preserve ? ReturnK([](const TermPtr&) { return pred::truth(); }) : ret;
  PredPtr after = preserve ? pred::truth() : normal;
  PredPtr step = expr(*s.expr, [&](const TermPtr& t) {
    PredPtr c = truthy(t);
    return pred::conj(pred::implies(c, stmt(*s.body, body_n, body_r)), pred::implies(pred::negate(c), after));
  });
  if (preserve) reached_ = true;
  return havoc(s, pred::implies(I, step));
}

PredPtr WpEngine::exprs(const std::vector<ExprPtr>& es, std::size_t i, std::vector<TermPtr>& acc,
                        const std::function<PredPtr(const std::vector<TermPtr>&)>& k) {
  if (i == es.size()) return k(acc);
  return expr(*es[i], [&, i](const TermPtr& t) {
    std::vector<TermPtr> next = acc;
    next.push_back(t);
    return exprs(es, i + 1, next, k);
  });
}

PredPtr WpEngine::call(const Expr& e, const std::vector<TermPtr>& args, const ExprK& k) {
  const FunctionDef* callee = tp_.function(e.name);
  Contract c = contracts_.get(e.name);
  Bindings b;
  for (std::size_t i = 0; i < callee->params.size() && i < args.size(); ++i) {
    b[callee->params[i].name] = args[i];
    b["\\old(" + callee->params[i].name + ")"] = args[i];
  }
  PredPtr req = substitute(c.requires_conj(), b);
  if (target_.kind == WpTarget::Kind::CallRequires && target_.node == e.id) {
    reached_ = true;
    return mode_ == WpMode::Verify ? req : pred::negate(req);
  }
  TermPtr r;
  if (callee->return_type == ValueType::Int) {
    r = term::var(call_result_symbol(e.name, e.id));
    b["\\result"] = r;
  } else {
    r = term::constant(0);
  }
  PredPtr ens = substitute(c.ensures_conj(), b);
  return assume(req, pred::implies(ens, k(r)));
}

PredPtr WpEngine::expr(const Expr& e, const ExprK& k) {
  switch (e.kind) {
    case Expr::Kind::IntLit:
      return k(term::constant(e.value));
    case Expr::Kind::NamedConst:
      return k(e.name == "INT_MIN" ? term::int_min() : term::int_max());
    case Expr::Kind::Var:
      if (auto g = tp_.global_value(e.name)) {
        const auto& locals = tp_.info(fn_.name).locals;
        bool local = tp_.is_param(fn_.name, e.name) ||
                     std::find(locals.begin(), locals.end(), e.name) != locals.end();
        if (!local) return k(term::constant(*g));
      }
      return k(term::var(e.name));
    case Expr::Kind::Call: {
      std::vector<TermPtr> acc;
      return exprs(e.operands, 0, acc, [&](const std::vector<TermPtr>& args) { return call(e, args, k); });
    }
    case Expr::Kind::Unary:
      return expr(e.lhs(), [&](const TermPtr& a) {
        if (e.unary_op == UnaryOp::Not) return k(as_term(pred::negate(truthy(a))));
        return guarded(e, a, nullptr, term::neg(a), k);
      });
    case Expr::Kind::Binary: {
      BinaryOp op = e.binary_op;
      if (op == BinaryOp::And || op == BinaryOp::Or) {
        return expr(e.lhs(), [&, op](const TermPtr& a) {
          PredPtr p = truthy(a);
          auto rhs = [&]() { return expr(e.rhs(), [&](const TermPtr& b) { return k(as_term(truthy(b))); }); };
          if (op == BinaryOp::And)
            return pred::conj(pred::implies(p, rhs()), pred::implies(pred::negate(p), k(term::constant(0))));
          return pred::conj(pred::implies(p, k(term::constant(1))), pred::implies(pred::negate(p), rhs()));
        });
      }
      return expr(e.lhs(), [&, op](const TermPtr& a) {
        return expr(e.rhs(), [&, op, a](const TermPtr& b) {
          switch (op) {
            case BinaryOp::Lt: return k(as_term(pred::cmp(CmpOp::Lt, a, b)));
            case BinaryOp::Le: return k(as_term(pred::cmp(CmpOp::Le, a, b)));
            case BinaryOp::Gt: return k(as_term(pred::cmp(CmpOp::Gt, a, b)));
            case BinaryOp::Ge: return k(as_term(pred::cmp(CmpOp::Ge, a, b)));
            case BinaryOp::Eq: return k(as_term(pred::cmp(CmpOp::Eq, a, b)));
            case BinaryOp::Ne: return k(as_term(pred::cmp(CmpOp::Ne, a, b)));
            case BinaryOp::Add: return guarded(e, a, b, term::add(a, b), k);
            case BinaryOp::Sub: return guarded(e, a, b, term::sub(a, b), k);
            case BinaryOp::Mul: return guarded(e, a, b, term::mul(a, b), k);
            case BinaryOp::Div: return guarded(e, a, b, term::div(a, b), k);
            case BinaryOp::Mod: return guarded(e, a, b, term::mod(a, b), k);
            default: return k(term::constant(0));
          }
        });
      });
    }
  }
  return k(term::constant(0));
}

PredPtr WpEngine::guarded(const Expr& e, const TermPtr& a, const TermPtr& b, const TermPtr& value, const ExprK& k) {
  std::vector<Guard> gs = guards_for(e, a, b, tp_.width());
  for (const auto& g : gs) {
    if (target_.kind == WpTarget::Kind::Guard && g.id == target_.guard_id) {
      reached_ = true;
      // the other guard of the same division stays a hypothesis/obligation
      PredPtr others = pred::truth();
      for (const auto& o : gs)
        if (o.id != g.id && o.kind == RteKind::DivByZero) others = pred::conj(others, o.pred);
      if (mode_ == WpMode::Verify) return pred::implies(others, g.pred);
      return pred::conj(others, pred::negate(g.pred));
    }
  }
  PredPtr all = pred::truth();
  for (const auto& g : gs) all = pred::conj(all, g.pred);
  return assume(all, k(value));
}

PredPtr wp(const TypedProgram& program, const std::string& fn, const Stmt& s, const PredPtr& post,
           const ContractEnv& contracts) {
  const FunctionDef* f = program.function(fn);
  if (!f) throw UnknownNodeError("unknown function '" + fn + "'");
  WpEngine eng(program, contracts, *f, WpMode::Verify);
  return eng.stmt(s, post, [&](const TermPtr& t) {
    return t ? substitute(post, Bindings{{"\\result", t}}) : post;
  });
}

}  // namespace preguss
