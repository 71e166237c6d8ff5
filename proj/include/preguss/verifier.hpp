#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "preguss/absint.hpp"
#include "preguss/callgraph.hpp"
#include "preguss/frontend.hpp"
#include "preguss/specs.hpp"

namespace preguss {

// ---- weakest preconditions ----

enum class WpMode {
  Verify,      // prove the target; other guards and callee requires are assumed
  Definitive,  // prove that every execution allowed by the hypotheses violates the target
};

struct WpTarget {
  enum class Kind { None, Guard, CallRequires, LoopEstablish, LoopPreserve, Assert };
  Kind kind = Kind::None;
  NodeId node = -1;      // operation, call, loop or asserted statement
  std::string guard_id;  // Guard: "div0@N" / "overflow@N"
};

/// Fresh symbol standing for the value of `var` after an arbitrary number of iterations of `loop`.
std::string havoc_symbol(NodeId loop, const std::string& var);
/// Variables assigned anywhere inside the statement.
std::set<std::string> assigned_vars(const Stmt& s);

/// Contract clauses as the verifier reads them: formal parameters in ensures
/// denote entry values, so `x` becomes `\old(x)`.
PredPtr ensures_for_body(const PredPtr& ensures, const FunctionDef& fn);

/// Predicate transformer over one function body.
class WpEngine {
 public:
  using ReturnK = std::function<PredPtr(const TermPtr&)>;  // null term for `return;`

  WpEngine(const TypedProgram& program, const ContractEnv& contracts, const FunctionDef& fn, WpMode mode,
           WpTarget target = {});

  /// wp(s, N, R): N for normal completion, R for `return`.
  PredPtr stmt(const Stmt& s, const PredPtr& normal, const ReturnK& ret);
  /// Whole body; N/R default to \true (\false in Definitive mode) unless given.
  PredPtr body(const std::optional<PredPtr>& normal = std::nullopt, const ReturnK& ret = nullptr);

  /// Havoc symbols introduced for loops that carry no invariant.
  const std::map<std::string, NodeId>& uninvariant_havocs() const { return missing_; }
  bool target_reached() const { return reached_; }

 private:
  using ExprK = std::function<PredPtr(const TermPtr&)>;

  PredPtr expr(const Expr& e, const ExprK& k);
  PredPtr exprs(const std::vector<ExprPtr>& es, std::size_t i, std::vector<TermPtr>& acc,
                const std::function<PredPtr(const std::vector<TermPtr>&)>& k);
  PredPtr guarded(const Expr& e, const TermPtr& a, const TermPtr& b, const TermPtr& value, const ExprK& k);
  PredPtr call(const Expr& e, const std::vector<TermPtr>& args, const ExprK& k);
  PredPtr loop(const Stmt& s, const PredPtr& normal, const ReturnK& ret);
  PredPtr havoc(const Stmt& s, const PredPtr& p);
  PredPtr invariant(NodeId loop) const;
  PredPtr assume(const PredPtr& g, const PredPtr& rest) const;

  const TypedProgram& tp_;
  const ContractEnv& contracts_;
  const FunctionDef& fn_;
  WpMode mode_;
  WpTarget target_;
  std::map<std::string, NodeId> missing_;
  bool reached_ = false;
};

/// Convenience form of the calculus: wp of a statement of `fn` for a
/// postcondition used both at normal exit and (with \result bound) at returns.
/// Guards are assumed.
PredPtr wp(const TypedProgram& program, const std::string& fn, const Stmt& s, const PredPtr& post,
           const ContractEnv& contracts);

// ---- verification conditions ----

enum class VcKind { Target, LoopEstablish, LoopPreserve, Ensures, Assert };
const char* to_string(VcKind k);

struct VerificationCondition {
  std::string id;
  VcKind kind = VcKind::Target;
  std::string function;  // body the WP was computed over
  NodeId origin = -1;
  std::string description;
  PredPtr hypothesis = pred::truth();
  PredPtr goal = pred::truth();
  std::map<std::string, NodeId> missing_invariants;  // havoc symbol -> loop lacking an invariant

  /// hypothesis ==> goal
  PredPtr formula() const { return pred::implies(hypothesis, goal); }
};

enum class Verdict { Valid, Invalid, Unknown };
const char* to_string(Verdict v);

struct VerificationOutcome {
  Verdict status = Verdict::Unknown;
  Valuation witness;   // Invalid only
  std::string reason;  // Unknown only
  std::string tier;    // "simplify", "linear", "bounded", "smt"
};

struct DischargeConfig {
  IntWidth width;
  int dnf_cap = 512;             // cubes before the linear tier gives up
  int fm_constraint_cap = 4000;  // Fourier-Motzkin blow-up guard
  int bounded_var_limit = 4;     // branch-and-prune also runs above 16 bits up to this many variables
  long node_budget = 400'000;    // branch-and-prune boxes per VC
  std::string smt_solver;        // executable; empty disables the external tier
};

/// Three tiers: normalization + linear reasoning, bounded branch-and-prune,
/// optional external SMT solver. Invalid outcomes always carry a witness that
/// was checked by evaluation.
VerificationOutcome discharge(const VerificationCondition& vc, const DischargeConfig& cfg);

/// Anchor-resolved union of a contract environment and candidate clauses.
/// Throws UnknownNodeError for an anchor that is not a function or loop.
ContractEnv merge_clauses(const ContractEnv& base, const std::vector<Clause>& clauses, const TypedProgram& program);

/// Scope check for a clause at its anchor; returns a message when ill-scoped.
std::optional<std::string> clause_scope_error(const Clause& c, const TypedProgram& program);

/// The VC for the unit's target under the given contracts.
VerificationCondition target_vc(const VUnit& v, const ContractEnv& contracts, const TypedProgram& program);
/// hypotheses ==> (every execution reaches the target and violates it).
VerificationCondition definitive_vc(const VUnit& v, const ContractEnv& contracts, const TypedProgram& program);
/// Ensures VC of a function under the given contracts.
VerificationCondition ensures_vc(const std::string& fn, const ContractEnv& contracts, const TypedProgram& program);
VerificationCondition loop_vc(const std::string& fn, NodeId loop, bool establish, const ContractEnv& contracts,
                              const TypedProgram& program);

/// Target VC, then establishment/preservation of candidate loop invariants,
/// then candidate ensures (host and callees). Host requires are hypotheses.
std::vector<VerificationCondition> gen_vcs(const VUnit& v, const std::vector<Clause>& candidates,
                                           const TypedProgram& program);

/// Callee requires instantiated with the actual arguments, checked in the caller's WP context.
VerificationOutcome check_callsite(const RteAssertion& callsite, const TypedProgram& program,
                                   const ContractEnv& contracts, const DischargeConfig& cfg);

// ---- SMT-LIB ----

/// One self-contained SMT-LIB v2 script: range assertions, hypothesis,
/// negated goal, (check-sat). Logic QF_LIA, or QF_NIA for nonlinear VCs.
std::string to_smtlib(const VerificationCondition& vc, IntWidth w, bool with_model = false);
std::string smt_symbol(const std::string& key);

/// Runs an external solver on a script; throws SmtIoError when it cannot be run
/// or answers something other than sat/unsat/unknown.
VerificationOutcome run_smt_solver(const VerificationCondition& vc, IntWidth w, const std::string& solver);

/// Locates a solver: $PREGUSS_SMT_SOLVER, then z3 / cvc5 on PATH. Empty if none.
std::string find_smt_solver();

}  // namespace preguss
