#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "preguss/frontend.hpp"
#include "preguss/interval.hpp"
#include "preguss/specs.hpp"

namespace preguss {

enum class RteKind { DivByZero, SignedOverflow, CallSitePrecondition };
enum class AssertionStatus { Proven, Alarm, Pending };

const char* to_string(RteKind k);
const char* to_string(AssertionStatus s);

struct RteAssertion {
  std::string id;  // "div0@N", "overflow@N" or "call@N" with N the operation / call node
  RteKind kind = RteKind::DivByZero;
  PredPtr predicate = pred::truth();
  NodeId node = -1;  // the guarded expression
  NodeId stmt = -1;  // innermost enclosing statement
  std::string host;
  Location loc;
  AssertionStatus status = AssertionStatus::Pending;
  std::string callee;  // CallSitePrecondition only

  /// ACSL label used in instrumented source ("overflow", "division_by_0", "call_pre").
  std::string label() const;
};

using AbstractEnv = std::map<std::string, Interval>;

struct AnalysisConfig {
  int widening_threshold = 3;  // plain joins before widening kicks in at a loop head
  int max_inline_depth = 32;   // deeper calls are summarized context-insensitively
  long max_steps = 20'000'000; // statement transfer budget

  bool operator==(const AnalysisConfig&) const = default;
};

struct AnalysisResult {
  std::vector<RteAssertion> assertions;   // node order
  std::map<NodeId, AbstractEnv> envs;     // state before each statement (loops: the head invariant), joined over contexts
  std::vector<std::string> analyzed;      // functions reachable from the roots, source order
  AnalysisConfig config;

  const RteAssertion* find(const std::string& id) const;
  std::size_t count(RteKind k) const;
  std::size_t count(AssertionStatus s) const;
};

/// Interval of an expression in an environment. Calls evaluate to the full range.
/// Arithmetic that may leave the width range yields the full range.
Interval eval_expr(const AbstractEnv& env, const Expr& e, IntWidth w);

/// Whole-program analysis from the entry (or, without `main`, from every
/// function that has no caller). Callees are analyzed once per calling
/// context; a returning call yields the full range in the caller.
AnalysisResult analyze(const TypedProgram& program, const AnalysisConfig& config = {});

/// Analysis of one function in isolation, parameters unconstrained.
AnalysisResult analyze_function(const TypedProgram& program, const std::string& fn,
                                const AnalysisConfig& config = {});

/// Functions reachable from the analysis roots, in source order.
std::vector<std::string> analysis_roots(const TypedProgram& program);
std::vector<std::string> reachable_functions(const TypedProgram& program);

// ---- guard construction, shared with the verifier ----

std::string call_result_symbol(const std::string& callee, NodeId call);

/// Call-free term view of an expression; a call is replaced by its result symbol.
TermPtr expr_to_term(const Expr& e, const TypedProgram& program);
/// The predicate `t != 0`, simplified for boolean-valued terms.
PredPtr truthy(const TermPtr& t);
/// 1 / 0 valued term of a predicate.
TermPtr as_term(const PredPtr& p);

struct Guard {
  RteKind kind;
  std::string id;
  PredPtr pred;
};

/// Guards of one operation given its operand terms (b is null for unary minus).
/// Empty for operations that cannot fail. The division overflow guard is
/// omitted when it folds to true (a literal operand rules MIN / -1 out).
std::vector<Guard> guards_for(const Expr& op, const TermPtr& a, const TermPtr& b, IntWidth w);

/// Guard assertions (status Pending) for every operation of a function, node order.
std::vector<RteAssertion> instrument_function(const TypedProgram& program, const std::string& fn);

}  // namespace preguss
