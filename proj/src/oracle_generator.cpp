#include <algorithm>

#include "preguss/synthesis.hpp"

namespace preguss {

namespace {

bool contains_call(const Expr& e) {
  bool found = false;
  for_each_expr(e, [&](const Expr& x) { found |= x.kind == Expr::Kind::Call; });
  return found;
}

// ---- requires from a WP goal ----

struct Prover {
  DischargeConfig dc;

  VerificationOutcome check(const PredPtr& goal) const {
    VerificationCondition vc;
    vc.id = "oracle";
    vc.goal = goal;
    return discharge(vc, dc);
  }
  bool valid(const PredPtr& goal) const { return check(goal).status == Verdict::Valid; }
};

PredPtr between(const std::string& x, std::int64_t lo, std::int64_t hi) {
  return pred::conj(pred::cmp(CmpOp::Le, term::constant(lo), term::var(x)),
                    pred::cmp(CmpOp::Le, term::var(x), term::constant(hi)));
}

PredPtr interval_pred(const std::string& x, std::int64_t lo, std::int64_t hi, IntWidth w) {
  std::vector<PredPtr> ps;
  if (lo == w.min() + 1) ps.push_back(pred::cmp(CmpOp::Lt, term::int_min(), term::var(x)));
  else if (lo > w.min()) ps.push_back(pred::cmp(CmpOp::Le, term::constant(lo), term::var(x)));
  if (hi == w.max() - 1) ps.push_back(pred::cmp(CmpOp::Lt, term::var(x), term::int_max()));
  else if (hi < w.max()) ps.push_back(pred::cmp(CmpOp::Le, term::var(x), term::constant(hi)));
  return pred::conj(ps);
}

std::optional<PredPtr> single_var_requires(const PredPtr& g, const std::string& x, const Prover& pv) {
  IntWidth w = pv.dc.width;
  VerificationOutcome some = pv.check(pred::negate(g));
  if (some.status != Verdict::Invalid) return std::nullopt;  // g unsatisfiable or unknown
  std::int64_t p = some.witness.count(x) ? some.witness.at(x) : 0;
  auto inside = [&](std::int64_t lo, std::int64_t hi) { return pv.valid(pred::implies(between(x, lo, hi), g)); };
  std::int64_t a = w.min(), b = p;  // smallest lo with [lo, p] inside g
  while (a < b) {
    std::int64_t m = a + (b - a) / 2;
    if (inside(m, p)) b = m;
    else a = m + 1;
  }
  std::int64_t lo = a;
  a = p, b = w.max();
  while (a < b) {
    std::int64_t m = b - (b - a) / 2;
    if (inside(lo, m)) a = m;
    else b = m - 1;
  }
  std::int64_t hi = a;
  if (pv.valid(pred::implies(g, between(x, lo, hi)))) return interval_pred(x, lo, hi, w);
  VerificationOutcome hole = pv.check(g);
  if (hole.status == Verdict::Invalid && hole.witness.count(x)) {
    PredPtr ne = pred::cmp(CmpOp::Ne, term::var(x), term::constant(hole.witness.at(x)));
    if (pv.valid(pred::implies(g, ne)) && pv.valid(pred::implies(ne, g))) return ne;
  }
  return std::nullopt;
}

// ---- loop invariant templates ----

const Stmt* preceding_assignment(const TypedProgram& tp, NodeId loop, const std::string& v) {
  std::vector<NodeId> path = tp.stmt_path(loop);
  if (path.size() < 2) return nullptr;
  const Stmt* parent = tp.stmt(path[path.size() - 2]);
  if (!parent || parent->kind != Stmt::Kind::Block) return nullptr;
  const Stmt* last = nullptr;
  for (const auto& s : parent->stmts) {
    if (s->id == loop) break;
    if ((s->kind == Stmt::Kind::Decl || s->kind == Stmt::Kind::Assign) && s->name == v) last = s.get();
  }
  return last;
}

std::vector<Clause> loop_templates(const TypedProgram& tp, const std::string& fn, int level,
                                   const AnalysisResult& ar) {
  std::vector<Clause> out;
  IntWidth w = tp.width();
  for (NodeId l : tp.info(fn).loops) {
    const Stmt* loop = tp.stmt(l);
    std::set<std::string> mod = assigned_vars(*loop->body);
    std::vector<PredPtr> ps;
    auto env = ar.envs.find(l);
    for (const auto& v : mod) {
      if (env == ar.envs.end()) break;
      auto it = env->second.find(v);
      if (it == env->second.end() || it->second.is_bottom()) continue;
      if (it->second.lo() > w.min()) ps.push_back(pred::cmp(CmpOp::Le, term::constant(it->second.lo()), term::var(v)));
      if (it->second.hi() < w.max()) ps.push_back(pred::cmp(CmpOp::Le, term::var(v), term::constant(it->second.hi())));
    }
    const Expr& c = *loop->expr;
    if (level >= 1 && c.kind == Expr::Kind::Binary && !contains_call(c) &&
        (c.binary_op == BinaryOp::Lt || c.binary_op == BinaryOp::Gt) && c.lhs().kind == Expr::Kind::Var &&
        mod.count(c.lhs().name)) {
      std::set<std::string> rv = free_vars(expr_to_term(c.rhs(), tp));
      bool stable = std::none_of(rv.begin(), rv.end(), [&](const std::string& s) { return mod.count(s) > 0; });
      if (stable) {
        const std::string& v = c.lhs().name;
        CmpOp op = c.binary_op == BinaryOp::Lt ? CmpOp::Le : CmpOp::Ge;
        PredPtr rel = pred::cmp(op, term::var(v), expr_to_term(c.rhs(), tp));
        const Stmt* init = preceding_assignment(tp, l, v);
        if (init && init->expr && !contains_call(*init->expr)) {
          TermPtr t0 = expr_to_term(*init->expr, tp);
          if (free_vars(t0).empty()) rel = pred::disj(rel, pred::cmp(CmpOp::Eq, term::var(v), t0));
        }
        ps.push_back(rel);
      }
    }
    if (ps.empty()) continue;
    out.push_back(Clause{ClauseKind::LoopInvariant, pred::conj(ps), {}, "", l});
  }
  return out;
}

// ---- symbolic execution for exact ensures ----

struct Path {
  std::map<std::string, TermPtr> state;
  std::vector<PredPtr> pc;
};

struct SymExec {
  const TypedProgram& tp;
  std::vector<std::pair<PredPtr, TermPtr>> results;
  bool failed = false;
  static constexpr std::size_t kMaxPaths = 16;

  TermPtr eval(const Expr& e, const Path& p) {
    if (contains_call(e)) {
      failed = true;
      return term::constant(0);
    }
    Bindings b(p.state.begin(), p.state.end());
    return substitute(expr_to_term(e, tp), b);
  }

  // returns the paths that complete normally
  std::vector<Path> run(const Stmt& s, std::vector<Path> in) {
    if (failed) return {};
    std::vector<Path> out;
    switch (s.kind) {
      case Stmt::Kind::Block:
        for (const auto& c : s.stmts) in = run(*c, std::move(in));
        return in;
      case Stmt::Kind::Decl:
      case Stmt::Kind::Assign:
        for (auto& p : in) p.state[s.name] = eval(*s.expr, p);
        return in;
      case Stmt::Kind::ExprStmt:
        for (auto& p : in) eval(*s.expr, p);
        return in;
      case Stmt::Kind::Return:
        for (auto& p : in) {
          if (!s.expr) {
            failed = true;
            return {};
          }
          results.push_back({pred::conj(p.pc), eval(*s.expr, p)});
        }
        if (results.size() > kMaxPaths) failed = true;
        return {};
      case Stmt::Kind::If:
        for (auto& p : in) {
          PredPtr c = truthy(eval(*s.expr, p));
          Path t = p, f = p;
          t.pc.push_back(c);
          f.pc.push_back(pred::negate(c));
          std::vector<Path> a = run(*s.then_branch, {t});
          std::vector<Path> b = s.else_branch ? run(*s.else_branch, {f}) : std::vector<Path>{f};
          out.insert(out.end(), a.begin(), a.end());
          out.insert(out.end(), b.begin(), b.end());
          if (out.size() > kMaxPaths) failed = true;
        }
        return out;
      case Stmt::Kind::While:
        failed = true;
        return {};
    }
    return {};
  }
};

std::optional<PredPtr> interval_result(const TypedProgram& tp, const std::string& fn, const AnalysisResult& ar) {
  IntWidth w = tp.width();
  Interval r = Interval::bottom();
  bool any = false;
  for_each_stmt(*tp.function(fn)->body, [&](const Stmt& s) {
    if (s.kind != Stmt::Kind::Return || !s.expr) return;
    auto env = ar.envs.find(s.id);
    if (env == ar.envs.end()) return;
    r = r.join(eval_expr(env->second, *s.expr, w));
    any = true;
  });
  if (!any || r.is_bottom()) return std::nullopt;
  std::vector<PredPtr> ps;
  if (r.lo() > w.min()) ps.push_back(pred::cmp(CmpOp::Le, term::constant(r.lo()), term::result()));
  if (r.hi() < w.max()) ps.push_back(pred::cmp(CmpOp::Le, term::result(), term::constant(r.hi())));
  if (ps.empty()) return std::nullopt;
  return pred::conj(ps);
}

bool mentions_result_of(const VerificationCondition& vc, const std::string& callee) {
  std::set<std::string> fv = free_vars(vc.formula());
  std::string prefix = "__ret_" + callee + "_";
  return std::any_of(fv.begin(), fv.end(), [&](const std::string& v) { return v.rfind(prefix, 0) == 0; });
}

}  // namespace

std::optional<PredPtr> oracle_precondition(const VerificationCondition& failing, const TypedProgram& tp,
                                           const std::string& host, const DischargeConfig& dc) {
  PredPtr g = failing.goal;
  if (is_true(g) || is_false(g)) return std::nullopt;
  std::set<std::string> fv = free_vars(g);
  if (fv.empty()) return std::nullopt;
  for (const auto& v : fv)
    if (!tp.is_param(host, v)) return std::nullopt;
  Prover pv{dc};
  pv.dc.smt_solver.clear();
  if (fv.size() == 1)
    if (auto r = single_var_requires(g, *fv.begin(), pv)) return r;
  return g;
}

std::optional<PredPtr> oracle_result_equation(const TypedProgram& tp, const std::string& fn) {
  const FunctionDef* f = tp.function(fn);
  if (!f || f->return_type == ValueType::Void) return std::nullopt;
  SymExec se{tp, {}, false};
  Path start;
  se.run(*f->body, {start});
  if (se.failed || se.results.empty()) return std::nullopt;
  if (se.results.size() == 1) return pred::cmp(CmpOp::Eq, term::result(), se.results[0].second);
  std::vector<PredPtr> ps;
  for (const auto& [pc, t] : se.results) ps.push_back(pred::implies(pc, pred::cmp(CmpOp::Eq, term::result(), t)));
  return pred::conj(ps);
}

GeneratorResponse OracleGenerator::generate(const GeneratorRequest& req) {
  GeneratorResponse out;
  if (!req.program || !req.unit || !req.contracts) {
    out.notes.push_back("oracle needs the structured request context");
    return out;
  }
  const TypedProgram& tp = *req.program;
  auto emit = [&](const Clause& c) {
    out.clauses.push_back(c);
    out.raw += render_clause(c) + "\n";
  };

  if (req.phase == Phase::Host) {
    const std::string& host = req.host;
    bool has_loops = !tp.info(host).loops.empty();
    if (req.attempt > (has_loops ? 1 : 0)) {
      out.notes.push_back("template-exhausted");
      return out;
    }
    std::vector<Clause> invs;
    if (has_loops) invs = loop_templates(tp, host, req.attempt, analyze_function(tp, host));
    for (const auto& c : invs) emit(c);
    ContractEnv env = merge_clauses(*req.contracts, invs, tp);
    VUnit u = *req.unit;
    u.contracts = env;
    VerificationCondition vc = target_vc(u, env, tp);
    if (vc.missing_invariants.empty() || !has_loops) {
      if (auto r = oracle_precondition(vc, tp, host, req.discharge)) {
        const FunctionDef* f = tp.function(host);
        emit(Clause{ClauseKind::Requires, *r, {}, "", f->id});
      }
    }
    if (out.clauses.empty()) out.notes.push_back("template-exhausted");
    return out;
  }

  // callees: exact result equations first, analysis intervals second
  if (req.attempt > 1) {
    out.notes.push_back("template-exhausted");
    return out;
  }
  for (const auto& callee : req.callees) {
    if (req.failing && !mentions_result_of(*req.failing, callee)) continue;
    const FunctionDef* f = tp.function(callee);
    if (!f || f->return_type == ValueType::Void) continue;
    std::optional<PredPtr> ens;
    std::vector<Clause> invs;
    if (req.attempt == 0) {
      ens = oracle_result_equation(tp, callee);
    } else {
      AnalysisResult ar = analyze_function(tp, callee);
      ens = interval_result(tp, callee, ar);
      invs = loop_templates(tp, callee, 1, ar);
    }
    for (const auto& c : invs) emit(c);
    if (ens) emit(Clause{ClauseKind::Ensures, *ens, {}, "", f->id});
  }
  if (out.clauses.empty()) out.notes.push_back("template-exhausted");
  return out;
}

}  // namespace preguss
