#include <algorithm>

#include "preguss/verifier.hpp"

namespace preguss {

const char* to_string(VcKind k) {
  switch (k) {
    case VcKind::Target: return "target";
    case VcKind::LoopEstablish: return "loop_establish";
    case VcKind::LoopPreserve: return "loop_preserve";
    case VcKind::Ensures: return "ensures";
    case VcKind::Assert: return "assert";
  }
  return "?";
}

namespace {

const FunctionDef* function_by_id(const TypedProgram& tp, NodeId id) {
  for (const auto& f : tp.program().functions)
    if (f.id == id) return &f;
  return nullptr;
}

const FunctionDef& require_fn(const TypedProgram& tp, const std::string& name) {
  const FunctionDef* f = tp.function(name);
  if (!f) throw UnknownNodeError("unknown function '" + name + "'");
  return *f;
}

void push_unique(std::vector<PredPtr>& xs, const PredPtr& p) {
  for (const auto& x : xs)
    if (equal(x, p)) return;
  xs.push_back(p);
}

std::string describe(const RteAssertion& a) {
  switch (a.kind) {
    case RteKind::DivByZero: return "division-by-zero guard";
    case RteKind::SignedOverflow: return "overflow guard";
    case RteKind::CallSitePrecondition: return "call-site precondition of " + a.callee;
  }
  return "";
}

WpTarget target_of(const RteAssertion& a) {
  WpTarget t;
  t.node = a.node;
  if (a.kind == RteKind::CallSitePrecondition) {
    t.kind = WpTarget::Kind::CallRequires;
  } else {
    t.kind = WpTarget::Kind::Guard;
    t.guard_id = a.id;
  }
  return t;
}

VerificationCondition unit_vc(const VUnit& v, const ContractEnv& contracts, const TypedProgram& tp, WpMode mode) {
  const FunctionDef& f = require_fn(tp, v.host);
  WpEngine eng(tp, contracts, f, mode, target_of(v.target));
  VerificationCondition vc;
  vc.kind = VcKind::Target;
  vc.id = v.target.id;
  vc.function = v.host;
  vc.origin = v.target.node;
  vc.description = describe(v.target);
  vc.hypothesis = contracts.get(v.host).requires_conj();
  vc.goal = eng.body();
  vc.missing_invariants = eng.uninvariant_havocs();
  return vc;
}

}  // namespace

ContractEnv merge_clauses(const ContractEnv& base, const std::vector<Clause>& clauses, const TypedProgram& tp) {
  ContractEnv env = base;
  for (const auto& c : clauses) {
    if (c.is_contract_clause()) {
      const FunctionDef* f = function_by_id(tp, c.anchor);
      if (!f) throw UnknownNodeError("contract clause anchored at non-function node " + std::to_string(c.anchor));
      Contract& k = env.contracts[f->name];
      k.function = f->name;
      push_unique(c.kind == ClauseKind::Requires ? k.requires_ : k.ensures, c.body);
    } else if (c.is_loop_clause()) {
      const Stmt* s = tp.stmt(c.anchor);
      if (!s || s->kind != Stmt::Kind::While)
        throw UnknownNodeError("loop clause anchored at non-loop node " + std::to_string(c.anchor));
      if (c.kind == ClauseKind::LoopInvariant) {
        push_unique(env.loop_invariants[c.anchor], c.body);
      } else {
        auto& vs = env.loop_assigns[c.anchor];
        for (const auto& v : c.vars)
          if (std::find(vs.begin(), vs.end(), v) == vs.end()) vs.push_back(v);
      }
    } else {
      if (!tp.stmt(c.anchor)) throw UnknownNodeError("assert anchored at non-statement node " + std::to_string(c.anchor));
      push_unique(env.asserts[c.anchor], c.body);
    }
  }
  return env;
}

std::optional<std::string> clause_scope_error(const Clause& c, const TypedProgram& tp) {
  std::string fn;
  if (c.is_contract_clause()) {
    const FunctionDef* f = function_by_id(tp, c.anchor);
    if (!f) return "contract clause must be anchored at a function";
    fn = f->name;
  } else {
    if (!tp.has_node(c.anchor) || !tp.stmt(c.anchor)) return "clause must be anchored at a statement";
    if (c.is_loop_clause() && tp.stmt(c.anchor)->kind != Stmt::Kind::While)
      return "loop clause must be anchored at a loop";
    fn = tp.owner(c.anchor);
  }
  const FunctionDef& f = require_fn(tp, fn);
  const auto& locals = tp.info(fn).locals;
  auto is_local = [&](const std::string& v) {
    return tp.is_param(fn, v) || std::find(locals.begin(), locals.end(), v) != locals.end();
  };
  if (c.kind == ClauseKind::LoopAssigns) {
    for (const auto& v : c.vars)
      if (!is_local(v)) return "'" + v + "' is not a variable of " + fn;
    return std::nullopt;
  }
  for (const auto& v : free_vars(c.body)) {
    if (v == "\\result") {
      if (c.kind != ClauseKind::Ensures) return "\\result is only allowed in ensures";
      if (f.return_type == ValueType::Void) return "\\result used in ensures of void function " + fn;
      continue;
    }
    if (v.rfind("\\old(", 0) == 0) {
      std::string p = v.substr(5, v.size() - 6);
      if (c.kind != ClauseKind::Ensures) return "\\old is only allowed in ensures";
      if (!tp.is_param(fn, p)) return "\\old(" + p + ") does not name a parameter of " + fn;
      continue;
    }
    if (c.is_contract_clause()) {
      if (!tp.is_param(fn, v)) return "'" + v + "' is not a parameter of " + fn;
    } else if (!is_local(v)) {
      return "'" + v + "' is not in scope in " + fn;
    }
  }
  return std::nullopt;
}

VerificationCondition target_vc(const VUnit& v, const ContractEnv& contracts, const TypedProgram& tp) {
  return unit_vc(v, contracts, tp, WpMode::Verify);
}

VerificationCondition definitive_vc(const VUnit& v, const ContractEnv& contracts, const TypedProgram& tp) {
  VerificationCondition vc = unit_vc(v, contracts, tp, WpMode::Definitive);
  vc.id += "#definitive";
  vc.description += " (violated on every execution)";
  return vc;
}

VerificationCondition ensures_vc(const std::string& fn, const ContractEnv& contracts, const TypedProgram& tp) {
  const FunctionDef& f = require_fn(tp, fn);
  Contract c = contracts.get(fn);
  PredPtr post = ensures_for_body(c.ensures_conj(), f);
  WpEngine eng(tp, contracts, f, WpMode::Verify);
  PredPtr normal = f.return_type == ValueType::Void ? post : pred::truth();
  VerificationCondition vc;
  vc.kind = VcKind::Ensures;
  vc.id = "ensures@" + fn;
  vc.function = fn;
  vc.origin = f.id;
  vc.description = "ensures of " + fn;
  vc.hypothesis = c.requires_conj();
  vc.goal = eng.body(normal, [&](const TermPtr& t) {
    return t ? substitute(post, Bindings{{"\\result", t}}) : post;
  });
  vc.missing_invariants = eng.uninvariant_havocs();
  return vc;
}

VerificationCondition loop_vc(const std::string& fn, NodeId loop, bool establish, const ContractEnv& contracts,
                              const TypedProgram& tp) {
  const FunctionDef& f = require_fn(tp, fn);
  WpTarget t;
  t.kind = establish ? WpTarget::Kind::LoopEstablish : WpTarget::Kind::LoopPreserve;
  t.node = loop;
  WpEngine eng(tp, contracts, f, WpMode::Verify, t);
  VerificationCondition vc;
  vc.kind = establish ? VcKind::LoopEstablish : VcKind::LoopPreserve;
  vc.id = (establish ? "loop_est@" : "loop_pres@") + std::to_string(loop);
  vc.function = fn;
  vc.origin = loop;
  vc.description = establish ? "loop invariant established" : "loop invariant preserved";
  vc.hypothesis = contracts.get(fn).requires_conj();
  vc.goal = eng.body();
  vc.missing_invariants = eng.uninvariant_havocs();
  return vc;
}

std::vector<VerificationCondition> gen_vcs(const VUnit& v, const std::vector<Clause>& candidates,
                                           const TypedProgram& tp) {
  ContractEnv env = merge_clauses(v.contracts, candidates, tp);
  std::vector<VerificationCondition> out{target_vc(v, env, tp)};
  std::vector<NodeId> loops, asserts;
  std::vector<std::string> ensures;
  for (const auto& c : candidates) {
    if (c.kind == ClauseKind::LoopInvariant && std::find(loops.begin(), loops.end(), c.anchor) == loops.end())
      loops.push_back(c.anchor);
    if (c.kind == ClauseKind::Assert && std::find(asserts.begin(), asserts.end(), c.anchor) == asserts.end())
      asserts.push_back(c.anchor);
    if (c.kind == ClauseKind::Ensures) {
      const FunctionDef* f = function_by_id(tp, c.anchor);
      if (f && std::find(ensures.begin(), ensures.end(), f->name) == ensures.end()) ensures.push_back(f->name);
    }
  }
  for (NodeId l : loops) {
    out.push_back(loop_vc(tp.owner(l), l, true, env, tp));
    out.push_back(loop_vc(tp.owner(l), l, false, env, tp));
  }
  for (NodeId s : asserts) {
    std::string fn = tp.owner(s);
    WpTarget t;
    t.kind = WpTarget::Kind::Assert;
    t.node = s;
    WpEngine eng(tp, env, require_fn(tp, fn), WpMode::Verify, t);
    VerificationCondition vc;
    vc.kind = VcKind::Assert;
    vc.id = "assert@" + std::to_string(s);
    vc.function = fn;
    vc.origin = s;
    vc.description = "assertion";
    vc.hypothesis = env.get(fn).requires_conj();
    vc.goal = eng.body();
    vc.missing_invariants = eng.uninvariant_havocs();
    out.push_back(std::move(vc));
  }
  for (const auto& fn : ensures) out.push_back(ensures_vc(fn, env, tp));
  return out;
}

VerificationOutcome check_callsite(const RteAssertion& callsite, const TypedProgram& tp, const ContractEnv& contracts,
                                   const DischargeConfig& cfg) {
  VUnit v;
  v.target = callsite;
  v.host = callsite.host;
  v.slice = {callsite.host};
  return discharge(target_vc(v, contracts, tp), cfg);
}

}  // namespace preguss
