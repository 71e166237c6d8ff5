#include <gtest/gtest.h>

#include <deque>
#include <functional>

#include "interp.hpp"
#include "paths.hpp"
#include "preguss/synthesis.hpp"

using namespace preguss;
using preguss::testing::example;

namespace {

struct Session {
  TypedProgram tp;
  CallGraph cg;
  std::vector<VUnit> queue;
  PipelineResult result;

  const UnitRecord& unit(const std::string& prefix, int nth = 0) const {
    for (const auto& u : result.units)
      if (u.id.rfind(prefix, 0) == 0 && nth-- == 0) return u;
    throw std::runtime_error("no unit " + prefix);
  }
  const UnitRecord& call_to(const std::string& callee, int nth = 0) const {
    for (const auto& u : result.units)
      if (u.kind == RteKind::CallSitePrecondition && u.callee == callee && nth-- == 0) return u;
    throw std::runtime_error("no call unit for " + callee);
  }
  Contract contract(const std::string& fn) const { return result.env.get(fn); }
};

Session setup(const std::string& src, IntWidth w = IntWidth()) {
  Session r{load(src, w), {}, {}, {}};
  r.cg = build_call_graph(r.tp);
  std::vector<RteAssertion> pending;
  for (auto& a : collect_assertions(analyze(r.tp), r.cg, r.tp))
    if (a.status != AssertionStatus::Proven) pending.push_back(a);
  r.queue = build_queue(pending, r.tp, r.cg, {});
  return r;
}

SynthesisConfig config(IntWidth w = IntWidth()) {
  SynthesisConfig c;
  c.discharge.width = w;
  return c;
}

Session pipeline(const std::string& src, SpecGenerator& gen, SynthesisConfig cfg, const SynthesisHooks& hooks = {}) {
  Session r = setup(src, cfg.discharge.width);
  r.result = process_queue(r.queue, r.tp, gen, cfg, hooks);
  return r;
}

// Replays canned replies through the LLM reply parser; records requests.
class Scripted : public SpecGenerator {
 public:
  explicit Scripted(std::vector<std::string> replies) : replies_(replies.begin(), replies.end()) {}
  std::string name() const override { return "scripted"; }
  GeneratorResponse generate(const GeneratorRequest& req) override {
    requests.push_back(req);
    std::string text = replies_.empty() ? "" : replies_.front();
    if (!replies_.empty()) replies_.pop_front();
    std::string def = req.phase == Phase::Host ? req.host : (req.callees.size() == 1 ? req.callees[0] : "");
    return parse_llm_reply(text, *req.program, def);
  }
  std::vector<GeneratorRequest> requests;

 private:
  std::deque<std::string> replies_;
};

// w=8 set of x values satisfying a one-variable predicate
std::vector<std::int64_t> models(const PredPtr& p, const std::string& x, IntWidth w) {
  std::vector<std::int64_t> out;
  for (std::int64_t v = w.min(); v <= w.max(); ++v)
    if (evaluate(p, {{x, v}}, w)) out.push_back(v);
  return out;
}

}  // namespace

TEST(Pipeline, AbsEndToEnd) {
  OracleGenerator gen;
  Session r = pipeline(example("abs.mc"), gen, config());
  const UnitRecord& ov = r.unit("overflow@");
  EXPECT_EQ(ov.verdict, FinalVerdict::Certified);
  EXPECT_EQ(ov.host_iters, 1);
  Contract abs = r.contract("abs");
  ASSERT_EQ(abs.requires_.size(), 1u);
  EXPECT_EQ(render(abs.requires_[0]), "INT_MIN < x");
  EXPECT_TRUE(abs.ensures.empty());
  EXPECT_EQ(r.call_to("abs", 0).verdict, FinalVerdict::Certified);
  const UnitRecord& bad = r.call_to("abs", 1);
  EXPECT_EQ(bad.verdict, FinalVerdict::DefinitiveRTE);
  ASSERT_TRUE(bad.witness.has_value());
  EXPECT_EQ(bad.predicate, "INT_MIN < -2147483648");
  EXPECT_EQ(r.result.prohibition_violations, 0);
  EXPECT_NE(r.result.annotated_source.find("requires INT_MIN < x;"), std::string::npos);
}

TEST(Pipeline, AbsRequiresMatchesGuardAtWidth8) {
  // the accepted requires admits exactly the inputs on which `abs` runs without error
  IntWidth w8 = IntWidth::from_bits(8);
  OracleGenerator gen;
  Session r = pipeline(example("abs.mc"), gen, config(w8));
  Contract abs = r.contract("abs");
  ASSERT_EQ(abs.requires_.size(), 1u);
  std::vector<std::int64_t> safe;
  for (std::int64_t x = w8.min(); x <= w8.max(); ++x)
    if (!preguss::testing::execute(r.tp, "abs", {x}).rte) safe.push_back(x);
  EXPECT_EQ(models(abs.requires_[0], "x", w8), safe);
  EXPECT_EQ(safe.size(), 255u);
}

TEST(Pipeline, IdEndToEnd) {
  OracleGenerator gen;
  Session r = pipeline(example("id.mc"), gen, config());
  ASSERT_FALSE(r.result.units.empty());
  for (const auto& u : r.result.units) EXPECT_EQ(u.verdict, FinalVerdict::Certified) << u.id;
  Contract id = r.contract("id");
  EXPECT_TRUE(id.requires_.empty());
  ASSERT_EQ(id.ensures.size(), 1u);
  EXPECT_EQ(render(id.ensures[0]), "\\result == x");
  const UnitRecord& div = r.unit("div0@");
  EXPECT_EQ(div.last_phase, Phase::Callees);
  EXPECT_EQ(div.host_iters, 0);
  EXPECT_EQ(div.callee_iters, 1);
  bool has_ensures_vc = false;
  for (const auto& v : div.vcs) has_ensures_vc |= v.id == "ensures@id" && v.status == Verdict::Valid;
  EXPECT_TRUE(has_ensures_vc);
}

TEST(Pipeline, IdOverConstraintHazard) {
  // the precondition a generator might forge for id breaks the id(0) call site
  Session r = setup(example("id.mc"));
  ContractEnv env;
  env.contracts["id"].function = "id";
  env.contracts["id"].requires_.push_back(parse_predicate("x != 0"));
  const CallSite* zero = nullptr;
  for (const auto& c : r.tp.all_calls())
    if (c.caller == "zero") zero = &c;
  ASSERT_NE(zero, nullptr);
  RteAssertion a;
  a.id = "call@" + std::to_string(zero->call);
  a.kind = RteKind::CallSitePrecondition;
  a.node = zero->call;
  a.stmt = zero->stmt;
  a.host = "zero";
  a.callee = "id";
  VerificationOutcome o = check_callsite(a, r.tp, env, DischargeConfig{});
  EXPECT_EQ(o.status, Verdict::Invalid);
}

TEST(Pipeline, CalleePhaseStripsRequires) {
  Scripted gen({"```acsl id\nrequires x != 0;\n```", "```acsl id\nensures \\result == x;\n```"});
  std::vector<std::tuple<Clause, bool, std::set<std::string>>> writes;
  SynthesisHooks hooks;
  hooks.on_store_write = [&](const Clause& c, bool refused, const std::set<std::string>& locked) {
    writes.emplace_back(c, refused, locked);
  };
  Session r = pipeline(example("id.mc"), gen, config(), hooks);
  EXPECT_EQ(r.unit("div0@").verdict, FinalVerdict::Certified);
  EXPECT_EQ(r.unit("div0@").callee_iters, 2);
  EXPECT_TRUE(r.contract("id").requires_.empty());
  bool stripped = false;
  for (const auto& e : r.result.events) stripped |= e.kind == "prohibition-strip" && e.detail == "id: requires x != 0;";
  EXPECT_TRUE(stripped);
  ASSERT_EQ(gen.requests.size(), 2u);
  ASSERT_EQ(gen.requests[1].feedback.size(), 1u);
  bool noted = false;
  for (const auto& n : gen.requests[1].feedback[0].notes) noted |= n.find("prohibited") != std::string::npos;
  EXPECT_TRUE(noted);
  for (const auto& [c, refused, locked] : writes) EXPECT_FALSE(c.kind == ClauseKind::Requires && locked.count("id"));
  EXPECT_EQ(r.result.prohibition_violations, 0);
}

TEST(Pipeline, CalleeEnsuresMustBeEstablished) {
  Scripted gen({"```acsl id\nensures \\result == x + 1;\n```", "```acsl id\nensures \\result == x;\n```"});
  Session r = pipeline(example("id.mc"), gen, config());
  const UnitRecord& div = r.unit("div0@");
  EXPECT_EQ(div.verdict, FinalVerdict::Certified);
  EXPECT_EQ(div.callee_iters, 2);
  const FeedbackEntry& first = gen.requests[1].feedback.at(0);
  bool invalid = false;
  for (const auto& v : first.vcs) invalid |= v.id == "ensures@id" && v.status == Verdict::Invalid;
  EXPECT_TRUE(invalid);
  ASSERT_EQ(r.contract("id").ensures.size(), 1u);
  EXPECT_EQ(render(r.contract("id").ensures[0]), "\\result == x");
}

TEST(Pipeline, ConstantDivisorNeedsNoClauses) {
  OracleGenerator gen;
  Session r = pipeline("int f(int x) { return x / 2; }", gen, config());
  for (const auto& u : r.result.units) EXPECT_EQ(u.verdict, FinalVerdict::Certified);
  EXPECT_TRUE(r.result.calls.empty());
  EXPECT_TRUE(r.result.contracts.empty());
}

TEST(Pipeline, NoAssertions) {
  OracleGenerator gen;
  std::string src = "int k(int x) { return x; }\n";
  Session r = pipeline(src, gen, config());
  EXPECT_TRUE(r.result.units.empty());
  EXPECT_EQ(r.result.annotated_source, render(r.tp.program()));
  EXPECT_TRUE(structurally_equal(parse(r.result.annotated_source), r.tp.program()));
}

TEST(Pipeline, LoopProgramCertified) {
  OracleGenerator gen;
  Session r = pipeline(example("loop.mc"), gen, config());
  for (const auto& u : r.result.units) EXPECT_EQ(u.verdict, FinalVerdict::Certified) << u.id;
}

TEST(Pipeline, HostRequiresFlowToCallers) {
  // f gets a requires; the call in g becomes an obligation that g's own requires discharges
  OracleGenerator gen;
  Session r = pipeline("int f(int x) { return 10 / x; }\nint g(int y) { return f(y + 1); }\n", gen, config());
  EXPECT_EQ(render(r.contract("f").requires_.at(0)), "x != 0");
  const UnitRecord& call = r.call_to("f");
  EXPECT_EQ(call.verdict, FinalVerdict::Certified);
  ASSERT_FALSE(r.contract("g").requires_.empty());
  for (std::int64_t y : {-1, 0, 5})
    EXPECT_EQ(evaluate(r.contract("g").requires_conj(), {{"y", y}}, IntWidth()), y != -1);
}

TEST(Pipeline, HighRiskStopsUnlessContinuing) {
  Scripted gen({});
  std::string src = "int f(int x) { return 10 / x; }\nint g(int y) { return 7 / y; }\n";
  SynthesisConfig cfg = config();
  cfg.max_iters = 2;
  Session r = pipeline(src, gen, cfg);
  ASSERT_EQ(r.result.units.size(), 1u);
  EXPECT_TRUE(r.result.stopped_early);
  const UnitRecord& u = r.result.units[0];
  EXPECT_EQ(u.verdict, FinalVerdict::HighRiskAlert);
  ASSERT_TRUE(u.last_feedback.has_value());
  EXPECT_EQ(u.host_iters, 2);
  EXPECT_EQ(gen.requests.size(), 2u);

  Scripted gen2({});
  cfg.continue_on_alert = true;
  Session r2 = pipeline(src, gen2, cfg);
  EXPECT_EQ(r2.result.units.size(), r2.queue.size());
  EXPECT_FALSE(r2.result.stopped_early);
  EXPECT_LE(gen2.requests.size(), r2.queue.size() * 2 * cfg.max_iters);
}

TEST(Pipeline, HostPhaseFiltersOutOfPhaseClauses) {
  Scripted gen({"```acsl f\nensures \\result == 1;\nrequires y != 0;\nrequires x != 0;\n```"});
  Session r = pipeline("int f(int x) { return 10 / x; }\n", gen, config());
  EXPECT_EQ(r.unit("div0@").verdict, FinalVerdict::Certified);
  const auto& notes = gen.requests.size() > 1 ? gen.requests[1].feedback[0].notes : std::vector<std::string>{};
  EXPECT_TRUE(notes.empty());
  EXPECT_TRUE(r.contract("f").ensures.empty());
  ASSERT_EQ(r.contract("f").requires_.size(), 1u);
}

TEST(Pipeline, RetentionDropsUnneededClauses) {
  Scripted gen({"```acsl f\nrequires x != 0;\nrequires x < 100;\n```"});
  Session r = pipeline("int f(int x) { return 10 / x; }\n", gen, config());
  ASSERT_EQ(r.contract("f").requires_.size(), 1u);
  EXPECT_EQ(render(r.contract("f").requires_[0]), "x != 0");
  bool logged = false;
  for (const auto& e : r.result.events) logged |= e.kind == "retention-drop" && e.detail == "f: requires x < 100;";
  EXPECT_TRUE(logged);
}

TEST(Pipeline, EntryGetsNoPrecondition) {
  Scripted gen({"```acsl main\nrequires 1 == 0;\n```"});
  SynthesisConfig cfg = config();
  cfg.max_iters = 1;
  Session r = pipeline("int ext(int x) { return x; }\nvoid main() { int a = ext(3); int b = 5 / a; }\n", gen, cfg);
  EXPECT_TRUE(r.contract("main").requires_.empty());
}

TEST(Pipeline, InvalidConfig) {
  OracleGenerator gen;
  SynthesisConfig cfg = config();
  cfg.max_iters = 0;
  Session r = setup(example("abs.mc"));
  EXPECT_THROW(process_queue(r.queue, r.tp, gen, cfg), std::invalid_argument);
}

TEST(Pipeline, OracleIsDeterministic) {
  OracleGenerator g1, g2;
  Session a = pipeline(example("id.mc"), g1, config());
  Session b = pipeline(example("id.mc"), g2, config());
  ASSERT_EQ(a.result.calls.size(), b.result.calls.size());
  for (std::size_t i = 0; i < a.result.calls.size(); ++i) {
    EXPECT_EQ(a.result.calls[i].request_digest, b.result.calls[i].request_digest);
    EXPECT_EQ(a.result.calls[i].response_digest, b.result.calls[i].response_digest);
  }
  EXPECT_EQ(a.result.annotated_source, b.result.annotated_source);
}

// ---- oracle generator ----

TEST(Oracle, AbsHostRequires) {
  Session r = setup(example("abs.mc"));
  const VUnit* ov = nullptr;
  for (const auto& v : r.queue)
    if (v.target.kind == RteKind::SignedOverflow) ov = &v;
  ASSERT_NE(ov, nullptr);
  VerificationCondition vc = target_vc(*ov, {}, r.tp);
  auto p = oracle_precondition(vc, r.tp, "abs", DischargeConfig{});
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(render(*p), "INT_MIN < x");
  // the raw WP and the proposal agree on every 8-bit input
  IntWidth w8 = IntWidth::from_bits(8);
  Session r8 = setup(example("abs.mc"), w8);
  for (const auto& v : r8.queue)
    if (v.target.kind == RteKind::SignedOverflow) {
      VerificationCondition vc8 = target_vc(v, {}, r8.tp);
      DischargeConfig dc;
      dc.width = w8;
      auto p8 = oracle_precondition(vc8, r8.tp, "abs", dc);
      ASSERT_TRUE(p8.has_value());
      EXPECT_EQ(models(*p8, "x", w8), models(vc8.goal, "x", w8));
    }
}

TEST(Oracle, ResultEquations) {
  TypedProgram id = load(example("id.mc"));
  EXPECT_EQ(render(*oracle_result_equation(id, "id")), "\\result == x");
  TypedProgram abs = load(example("abs.mc"));
  auto e = oracle_result_equation(abs, "abs");
  ASSERT_TRUE(e.has_value());
  IntWidth w = IntWidth();
  for (std::int64_t x : {-5, 0, 7}) {
    EXPECT_TRUE(evaluate(*e, {{"x", x}, {"\\result", x < 0 ? -x : x}}, w));
    EXPECT_FALSE(evaluate(*e, {{"x", x}, {"\\result", x < 0 ? -x + 1 : x + 1}}, w));
  }
  TypedProgram loop = load(example("loop.mc"));
  EXPECT_FALSE(oracle_result_equation(loop, "count").has_value());
  EXPECT_FALSE(oracle_result_equation(loop, "main").has_value());
}

TEST(Oracle, TrivialGuardGivesNothing) {
  VerificationCondition vc;
  vc.goal = pred::truth();
  TypedProgram tp = load("int f(int x) { return x; }");
  EXPECT_FALSE(oracle_precondition(vc, tp, "f", DischargeConfig{}).has_value());
  vc.goal = parse_predicate("x != 3");
  EXPECT_EQ(render(*oracle_precondition(vc, tp, "f", DischargeConfig{})), "x != 3");
  vc.goal = parse_predicate("y != 3");
  EXPECT_FALSE(oracle_precondition(vc, tp, "f", DischargeConfig{}).has_value());
}

// ---- store and prompts ----

TEST(Store, LockRefusesCalleeRequires) {
  TypedProgram tp = load(example("id.mc"));
  ContractStore s(tp);
  Clause r = parse_clause("requires x != 0;");
  r.anchor = tp.function("id")->id;
  Clause e = parse_clause("ensures \\result == x;");
  e.anchor = r.anchor;
  s.lock_callees({"id"});
  EXPECT_FALSE(s.add(r, "u"));
  EXPECT_TRUE(s.add(e, "u"));
  EXPECT_EQ(s.violations(), 1);
  s.unlock();
  EXPECT_TRUE(s.add(r, "u"));
  EXPECT_EQ(s.env().get("id").requires_.size(), 1u);
  EXPECT_EQ(s.clauses().size(), 2u);
  EXPECT_TRUE(s.add(r, "u"));
  EXPECT_EQ(s.clauses().size(), 2u);
}

TEST(Prompt, CalleePhaseStatesProhibition) {
  Session r = setup(example("id.mc"));
  const VUnit* div = nullptr;
  for (const auto& v : r.queue)
    if (v.target.kind == RteKind::DivByZero) div = &v;
  ASSERT_NE(div, nullptr);
  GeneratorRequest req;
  req.phase = Phase::Callees;
  req.callees = {"id"};
  req.assertion = "assert division_by_0: x != 0;";
  FeedbackEntry fe;
  fe.candidates = {"id: requires x != 0;"};
  fe.notes = {"stripped"};
  req.feedback = {fe};
  auto msgs = render_prompt(req, r.tp, *div, {});
  ASSERT_EQ(msgs.size(), 2u);
  EXPECT_EQ(msgs[0].role, "system");
  const std::string& u = msgs[1].content;
  EXPECT_NE(u.find("prohibited"), std::string::npos);
  EXPECT_NE(u.find("depends on values returned by: id"), std::string::npos);
  EXPECT_NE(u.find("int id(int x)"), std::string::npos);
  EXPECT_NE(u.find("/*@ assert division_by_0: x != 0; */"), std::string::npos);
  EXPECT_NE(u.find("id: requires x != 0;"), std::string::npos);
}

TEST(Prompt, FeedbackRendering) {
  FeedbackEntry fe;
  fe.attempt = 0;
  VcFeedback v;
  v.id = "overflow@5";
  v.description = "overflow guard";
  v.formula = "x < 0 ==> -2147483647 <= x";
  v.status = Verdict::Invalid;
  v.witness = {{"x", -2147483648LL}};
  fe.vcs.push_back(v);
  std::string s = render_feedback(fe);
  EXPECT_NE(s.find("overflow@5 [Invalid] overflow guard"), std::string::npos);
  EXPECT_NE(s.find("x < 0 ==> -2147483647 <= x"), std::string::npos);
  EXPECT_NE(s.find("counterexample: x = -2147483648"), std::string::npos);
}
