#include <gtest/gtest.h>

#include <random>

#include "interp.hpp"
#include "paths.hpp"
#include "preguss/callgraph.hpp"
#include "preguss/verifier.hpp"
#include "progen.hpp"

using namespace preguss;
using preguss::testing::example;

namespace {

struct Unit {
  TypedProgram tp;
  CallGraph cg;
  std::vector<RteAssertion> assertions;

  const RteAssertion& find(RteKind k, int nth = 0) const {
    for (const auto& a : assertions)
      if (a.kind == k && nth-- == 0) return a;
    throw std::runtime_error("no such assertion");
  }
  VUnit unit(const RteAssertion& a, const ContractEnv& env = {}) const { return build_vunit(a, tp, cg, env); }
  NodeId fn(const std::string& name) const { return tp.function(name)->id; }
};

Unit setup(const std::string& src, IntWidth w = IntWidth()) {
  Unit u{load(src, w), {}, {}};
  u.cg = build_call_graph(u.tp);
  u.assertions = collect_assertions(analyze(u.tp), u.cg, u.tp);
  return u;
}

Clause anchored(const std::string& text, NodeId anchor) {
  Clause c = parse_clause(text);
  c.anchor = anchor;
  return c;
}

ContractEnv with(const Unit& u, std::vector<Clause> cs) { return merge_clauses({}, cs, u.tp); }

DischargeConfig cfg(IntWidth w = IntWidth()) {
  DischargeConfig c;
  c.width = w;
  return c;
}

VerificationCondition vc_of(const std::string& hyp, const std::string& goal) {
  VerificationCondition vc;
  vc.hypothesis = parse_predicate(hyp);
  vc.goal = parse_predicate(goal);
  return vc;
}

// call at the given position among `main`'s calls to `callee`
const RteAssertion& callsite(const Unit& u, const std::string& callee, int nth) {
  for (const auto& a : u.assertions)
    if (a.kind == RteKind::CallSitePrecondition && a.callee == callee && nth-- == 0) return a;
  throw std::runtime_error("no call site");
}

}  // namespace

TEST(Wp, EmptyBlockIsIdentity) {
  TypedProgram tp = load("void f(int x) { }");
  PredPtr p = parse_predicate("x < 3");
  EXPECT_TRUE(equal(wp(tp, "f", *tp.function("f")->body, p, {}), p));
}

TEST(Wp, AssignmentSubstitutes) {
  TypedProgram tp = load("void f(int x) { x = x + 1; }");
  PredPtr r = wp(tp, "f", *tp.function("f")->body, parse_predicate("x < 3"), {});
  // the overflow guard is assumed, the postcondition sees x + 1
  Valuation v{{"x", 1}};
  EXPECT_TRUE(evaluate(r, v, IntWidth()));
  v["x"] = 2;
  EXPECT_FALSE(evaluate(r, v, IntWidth()));
}

TEST(Wp, AbsOverflowUnderRequires) {
  Unit u = setup(example("abs.mc"));
  ContractEnv env = with(u, {anchored("requires INT_MIN < x;", u.fn("abs"))});
  VerificationCondition vc = target_vc(u.unit(u.find(RteKind::SignedOverflow), env), env, u.tp);
  EXPECT_EQ(vc.kind, VcKind::Target);
  EXPECT_EQ(vc.function, "abs");
  EXPECT_EQ(render(vc.hypothesis), "INT_MIN < x");
  EXPECT_EQ(discharge(vc, cfg()).status, Verdict::Valid);
  // same VC without the requires fails with x == INT_MIN
  VerificationCondition bare = target_vc(u.unit(u.find(RteKind::SignedOverflow)), {}, u.tp);
  VerificationOutcome o = discharge(bare, cfg());
  ASSERT_EQ(o.status, Verdict::Invalid);
  EXPECT_EQ(o.witness.at("x"), IntWidth().min());
}

TEST(Wp, IdEnsuresDischargesDivision) {
  Unit u = setup(example("id.mc"));
  ContractEnv env = with(u, {anchored("ensures \\result == x;", u.fn("id"))});
  VerificationCondition vc = target_vc(u.unit(u.find(RteKind::DivByZero), env), env, u.tp);
  EXPECT_EQ(discharge(vc, cfg()).status, Verdict::Valid);
  EXPECT_NE(render(vc.goal).find("__ret_id_"), std::string::npos);
  VerificationCondition bare = target_vc(u.unit(u.find(RteKind::DivByZero)), {}, u.tp);
  EXPECT_EQ(discharge(bare, cfg()).status, Verdict::Invalid);
}

TEST(GenVcs, AbsUnitHasOneValidTarget) {
  Unit u = setup(example("abs.mc"));
  std::vector<Clause> cand{anchored("requires INT_MIN < x;", u.fn("abs"))};
  auto vcs = gen_vcs(u.unit(u.find(RteKind::SignedOverflow)), cand, u.tp);
  ASSERT_EQ(vcs.size(), 1u);
  EXPECT_EQ(vcs[0].id, u.find(RteKind::SignedOverflow).id);
  EXPECT_EQ(discharge(vcs[0], cfg()).status, Verdict::Valid);
}

TEST(GenVcs, AbsIntMinCallSiteIsClosedAndInvalid) {
  Unit u = setup(example("abs.mc"));
  ContractEnv env = with(u, {anchored("requires INT_MIN < x;", u.fn("abs"))});
  const RteAssertion& bad = callsite(u, "abs", 1);
  auto vcs = gen_vcs(u.unit(bad, env), {}, u.tp);
  ASSERT_EQ(vcs.size(), 1u);
  EXPECT_TRUE(is_true(vcs[0].hypothesis));
  VerificationOutcome o = discharge(vcs[0], cfg());
  EXPECT_EQ(o.status, Verdict::Invalid);
  EXPECT_TRUE(o.witness.empty());
}

TEST(GenVcs, IdEnsuresEstablished) {
  Unit u = setup(example("id.mc"));
  std::vector<Clause> cand{anchored("ensures \\result == x;", u.fn("id"))};
  auto vcs = gen_vcs(u.unit(u.find(RteKind::DivByZero)), cand, u.tp);
  ASSERT_EQ(vcs.size(), 2u);
  EXPECT_EQ(vcs[0].kind, VcKind::Target);
  EXPECT_EQ(vcs[1].kind, VcKind::Ensures);
  EXPECT_EQ(vcs[1].id, "ensures@id");
  for (const auto& vc : vcs) EXPECT_EQ(discharge(vc, cfg()).status, Verdict::Valid) << vc.id;
}

TEST(GenVcs, LoopInvariantVcs) {
  Unit u = setup("int f(int n) { int i = 0; while (i < n) { i = i + 1; } return 10 / (i + 1); }",
                 IntWidth::from_bits(8));
  const Stmt& loop = *u.tp.function("f")->body->stmts[1];
  std::vector<Clause> cand{anchored("requires 0 <= n;", u.fn("f")),
                           anchored("loop invariant 0 <= i && i <= n;", loop.id)};
  VUnit v = u.unit(u.find(RteKind::DivByZero));
  v.contracts = merge_clauses({}, {cand[0]}, u.tp);
  auto vcs = gen_vcs(v, cand, u.tp);
  ASSERT_EQ(vcs.size(), 3u);
  EXPECT_EQ(vcs[1].id, "loop_est@" + std::to_string(loop.id));
  EXPECT_EQ(vcs[2].id, "loop_pres@" + std::to_string(loop.id));
  for (const auto& vc : vcs) {
    EXPECT_TRUE(vc.missing_invariants.empty());
    EXPECT_EQ(discharge(vc, cfg(IntWidth::from_bits(8))).status, Verdict::Valid) << vc.id;
  }
  // without the invariant the havocked loop variable is reported
  VerificationCondition bare = target_vc(u.unit(u.find(RteKind::DivByZero)), {}, u.tp);
  EXPECT_FALSE(bare.missing_invariants.empty());
  // a wrong invariant fails preservation
  std::vector<Clause> wrong{anchored("loop invariant i == 0;", loop.id)};
  auto w = gen_vcs(u.unit(u.find(RteKind::DivByZero)), wrong, u.tp);
  EXPECT_EQ(discharge(w[2], cfg(IntWidth::from_bits(8))).status, Verdict::Invalid);
}

TEST(Discharge, Examples) {
  VerificationOutcome closed = discharge(vc_of("\\true", "INT_MIN < INT_MIN"), cfg());
  EXPECT_EQ(closed.status, Verdict::Invalid);
  EXPECT_TRUE(closed.witness.empty());

  EXPECT_EQ(discharge(vc_of("r1 == 1", "r1 != 0"), cfg()).status, Verdict::Valid);

  IntWidth w8 = IntWidth::from_bits(8);
  VerificationCondition abs_vc = vc_of("x < 0 && INT_MIN < x", "-INT_MAX <= x");
  EXPECT_EQ(discharge(abs_vc, cfg(w8)).status, Verdict::Valid);
  // oracle: all 256 values of x
  bool any_violation = false;
  for (int x = -128; x <= 127; ++x)
    if (!evaluate(abs_vc.formula(), {{"x", x}}, w8)) any_violation = true;
  EXPECT_FALSE(any_violation);
}

TEST(Discharge, UnknownOnHardNonlinearAtWidth32) {
  DischargeConfig c = cfg();
  c.bounded_var_limit = 0;
  c.node_budget = 100;
  VerificationOutcome o = discharge(vc_of("1 < x && 1 < y && 1 < z", "x * y * z != 1000003 * 7 + x - x"), c);
  if (o.status == Verdict::Unknown) EXPECT_FALSE(o.reason.empty());
  else if (o.status == Verdict::Invalid) {
    VerificationCondition vc = vc_of("1 < x && 1 < y && 1 < z", "x * y * z != 1000003 * 7 + x - x");
    EXPECT_FALSE(evaluate(vc.formula(), o.witness, IntWidth()));
  }
}

TEST(CheckCallsite, AbsExamples) {
  Unit u = setup(example("abs.mc"));
  ContractEnv env = with(u, {anchored("requires INT_MIN < x;", u.fn("abs"))});
  EXPECT_EQ(check_callsite(callsite(u, "abs", 0), u.tp, env, cfg()).status, Verdict::Valid);
  EXPECT_EQ(check_callsite(callsite(u, "abs", 1), u.tp, env, cfg()).status, Verdict::Invalid);
  EXPECT_EQ(check_callsite(callsite(u, "abs", 1), u.tp, {}, cfg()).status, Verdict::Valid);
}

TEST(CheckCallsite, IdDualRole) {
  Unit u = setup(example("id.mc"));
  ContractEnv ens = with(u, {anchored("ensures \\result == x;", u.fn("id"))});
  EXPECT_EQ(discharge(target_vc(u.unit(u.find(RteKind::DivByZero), ens), ens, u.tp), cfg()).status, Verdict::Valid);
  for (const auto& a : u.assertions)
    if (a.kind == RteKind::CallSitePrecondition)
      EXPECT_EQ(check_callsite(a, u.tp, ens, cfg()).status, Verdict::Valid) << a.id;

  ContractEnv req = with(u, {anchored("requires x != 0;", u.fn("id"))});
  EXPECT_EQ(check_callsite(callsite(u, "id", 0), u.tp, req, cfg()).status, Verdict::Valid);
  EXPECT_EQ(check_callsite(callsite(u, "id", 1), u.tp, req, cfg()).status, Verdict::Invalid);
}

TEST(Clauses, MergeAndScope) {
  Unit u = setup(example("id.mc"));
  EXPECT_THROW(merge_clauses({}, {anchored("ensures \\true;", 99999)}, u.tp), UnknownNodeError);
  EXPECT_FALSE(clause_scope_error(anchored("requires x != 0;", u.fn("id")), u.tp).has_value());
  EXPECT_TRUE(clause_scope_error(anchored("requires y != 0;", u.fn("id")), u.tp).has_value());
  EXPECT_TRUE(clause_scope_error(anchored("ensures \\result == 0;", u.fn("one")), u.tp).has_value());
  ContractEnv twice = merge_clauses({}, {anchored("requires x != 0;", u.fn("id")), anchored("requires x != 0;", u.fn("id"))}, u.tp);
  EXPECT_EQ(twice.get("id").requires_.size(), 1u);
}

TEST(Smt, ExportShape) {
  Unit u = setup(example("abs.mc"));
  ContractEnv env = with(u, {anchored("requires INT_MIN < x;", u.fn("abs"))});
  VerificationCondition vc = target_vc(u.unit(u.find(RteKind::SignedOverflow), env), env, u.tp);
  std::string s = to_smtlib(vc, IntWidth());
  EXPECT_NE(s.find("(set-logic QF_LIA)"), std::string::npos);
  EXPECT_NE(s.find("(declare-const |x| Int)"), std::string::npos) << s;
  EXPECT_NE(s.find("(check-sat)"), std::string::npos);
  EXPECT_NE(s.find("(- 2147483648)"), std::string::npos);
  EXPECT_NE(to_smtlib(vc_of("\\true", "x * y != 3"), IntWidth()).find("QF_NIA"), std::string::npos);
  EXPECT_EQ(smt_symbol("\\result"), "|$result|");
}

TEST(Smt, SolverVerdicts) {
  std::string solver = find_smt_solver();
  if (solver.empty()) GTEST_SKIP() << "no SMT solver available";
  Unit u = setup(example("abs.mc"));
  ContractEnv env = with(u, {anchored("requires INT_MIN < x;", u.fn("abs"))});
  VerificationCondition ok = target_vc(u.unit(u.find(RteKind::SignedOverflow), env), env, u.tp);
  EXPECT_EQ(run_smt_solver(ok, IntWidth(), solver).status, Verdict::Valid);
  VerificationCondition bad = target_vc(u.unit(callsite(u, "abs", 1), env), env, u.tp);
  EXPECT_EQ(run_smt_solver(bad, IntWidth(), solver).status, Verdict::Invalid);
  VerificationCondition bare = target_vc(u.unit(u.find(RteKind::SignedOverflow)), {}, u.tp);
  VerificationOutcome o = run_smt_solver(bare, IntWidth(), solver);
  ASSERT_EQ(o.status, Verdict::Invalid);
  EXPECT_FALSE(evaluate(bare.formula(), o.witness, IntWidth()));
  EXPECT_THROW(run_smt_solver(ok, IntWidth(), "/nonexistent/solver"), SmtIoError);
}

// ---- properties ----

namespace {

struct RandomVc {
  std::mt19937 rng;
  explicit RandomVc(unsigned seed) : rng(seed) {}
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  TermPtr t(int d) {
    if (d == 0 || pick(0, 2) == 0) {
      switch (pick(0, 3)) {
        case 0: return term::constant(pick(-130, 130));
        case 1: return pick(0, 1) ? term::int_min() : term::int_max();
        default: return term::var(pick(0, 1) ? "x" : "y");
      }
    }
    switch (pick(0, 5)) {
      case 0: return term::add(t(d - 1), t(d - 1));
      case 1: return term::sub(t(d - 1), t(d - 1));
      case 2: return term::mul(t(d - 1), t(d - 1));
      case 3: return term::neg(t(d - 1));
      case 4: return term::div(t(d - 1), t(d - 1));
      default: return term::mod(t(d - 1), t(d - 1));
    }
  }
  PredPtr p(int d) {
    if (d == 0 || pick(0, 2) == 0) return pred::cmp(static_cast<CmpOp>(pick(0, 5)), t(2), t(2));
    switch (pick(0, 3)) {
      case 0: return pred::conj(p(d - 1), p(d - 1));
      case 1: return pred::disj(p(d - 1), p(d - 1));
      case 2: return pred::negate(p(d - 1));
      default: return pred::implies(p(d - 1), p(d - 1));
    }
  }
};

}  // namespace

TEST(VerifierProperties, VerdictsAgreeWithEnumerationAtWidth8) {
  IntWidth w = IntWidth::from_bits(8);
  RandomVc g(404);
  int valid = 0, invalid = 0;
  for (int i = 0; i < 400; ++i) {
    VerificationCondition vc;
    vc.hypothesis = g.p(2);
    vc.goal = g.p(2);
    VerificationOutcome o = discharge(vc, cfg(w));
    ASSERT_NE(o.status, Verdict::Unknown) << render(vc.formula());
    PredPtr f = instantiate_width(vc.formula(), w);
    if (o.status == Verdict::Invalid) {
      ++invalid;
      Valuation full = o.witness;
      full.try_emplace("x", 0);
      full.try_emplace("y", 0);
      ASSERT_FALSE(evaluate(f, full, w)) << render(f);
    } else {
      ++valid;
      for (int x = -128; x <= 127; ++x)
        for (int y = -128; y <= 127; ++y) ASSERT_TRUE(evaluate(f, {{"x", x}, {"y", y}}, w)) << render(f) << " " << x << "," << y;
    }
  }
  EXPECT_GT(valid, 20);
  EXPECT_GT(invalid, 20);
}

TEST(VerifierProperties, ValidTargetsHoldOnExecutionAtWidth8) {
  IntWidth w = IntWidth::from_bits(8);
  std::mt19937 rng(515);
  preguss::testing::GenConfig gc;
  gc.functions = 3;
  int valid = 0, unknown = 0;
  for (int i = 0; i < 60; ++i) {
    std::string src = preguss::testing::generate_program(rng, gc);
    Unit u = setup(src, w);
    for (const auto& a : u.assertions) {
      if (a.kind == RteKind::CallSitePrecondition) continue;
      VerificationOutcome o = discharge(target_vc(u.unit(a), {}, u.tp), cfg(w));
      if (o.status == Verdict::Unknown) ++unknown;
      if (o.status != Verdict::Valid) continue;
      ++valid;
      auto arity = u.tp.function(a.host)->params.size();
      for (const auto& args : preguss::testing::input_vectors(arity, w, 2000)) {
        auto r = preguss::testing::execute(u.tp, a.host, args);
        for (const auto& h : r.hits) ASSERT_TRUE(h.id != a.id || h.holds) << a.id << "\n" << src;
      }
    }
  }
  EXPECT_GT(valid, 30);
  EXPECT_EQ(unknown, 0);
}

TEST(VerifierProperties, AddingEnsuresNeverBreaksValidTargets) {
  IntWidth w = IntWidth::from_bits(8);
  std::mt19937 rng(616);
  const char* extra[] = {"ensures \\result >= 0;", "ensures \\result == 1;", "ensures \\result < 100;"};
  int checked = 0;
  for (int i = 0; i < 60; ++i) {
    Unit u = setup(preguss::testing::generate_program(rng), w);
    for (const auto& a : u.assertions) {
      VUnit v = u.unit(a);
      if (v.slice.size() < 2) continue;
      if (discharge(target_vc(v, {}, u.tp), cfg(w)).status != Verdict::Valid) continue;
      for (const char* e : extra) {
        std::vector<Clause> cs;
        for (std::size_t k = 1; k < v.slice.size(); ++k)
          if (u.tp.function(v.slice[k])->return_type == ValueType::Int) cs.push_back(anchored(e, u.fn(v.slice[k])));
        ContractEnv env = merge_clauses({}, cs, u.tp);
        VerificationCondition vc = target_vc(v, env, u.tp);
        VerificationOutcome o = discharge(vc, cfg(w));
        ASSERT_EQ(o.status, Verdict::Valid) << o.reason << "\n" << render(vc.formula());
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 0);
}
