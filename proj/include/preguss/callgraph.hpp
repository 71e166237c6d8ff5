#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "preguss/absint.hpp"
#include "preguss/frontend.hpp"
#include "preguss/specs.hpp"

namespace preguss {

struct CallEdge {
  std::string caller;
  std::string callee;
  NodeId call = -1;
  bool operator==(const CallEdge&) const = default;
};

struct CallGraph {
  std::vector<std::string> nodes;  // source order
  std::vector<CallEdge> edges;     // one per call site, source order

  /// Distinct direct callees in order of first call.
  std::vector<std::string> callees(const std::string& f) const;
  std::vector<std::string> callers(const std::string& f) const;
  /// True if `to` is reachable from `from` through at least one edge.
  bool reaches(const std::string& from, const std::string& to) const;
  /// Shortest call distance, -1 if unreachable (0 for from == to).
  int distance(const std::string& from, const std::string& to) const;
};

/// Throws MutualRecursionError naming the cycle (self-recursion included).
CallGraph build_call_graph(const TypedProgram& program);

/// Callees before callers; ties broken by source order.
std::vector<std::string> post_order(const CallGraph& cg);

/// Guard assertions of the analysis plus one CallSitePrecondition assertion
/// (predicate true, status Pending) per call site of an analyzed function.
std::vector<RteAssertion> collect_assertions(const AnalysisResult& analysis, const CallGraph& cg,
                                             const TypedProgram& program);

struct VUnit {
  RteAssertion target;
  std::string host;
  std::vector<std::string> slice;            // host first, then retained direct callees
  std::vector<std::string> dropped_callees;  // direct callees visible only through contracts
  ContractEnv contracts;                     // snapshot
  int priority = 0;
};

/// Two-layer unit: host plus all direct callees, optionally narrowed by the dependency filter.
VUnit build_vunit(const RteAssertion& a, const TypedProgram& program, const CallGraph& cg,
                  const ContractEnv& contracts, bool dependency_filter = true, int priority = 0);

/// Keeps a direct callee body iff some call to it reaches the target through
/// data or control dependence inside the host.
VUnit filter_callees_by_dependency(VUnit v, const TypedProgram& program);

/// Call nodes (in the host) the target depends on.
std::set<NodeId> relevant_calls(const TypedProgram& program, const std::string& host, NodeId target_node,
                                RteKind kind);

/// Units ordered by post-order of hosts, then by source position.
std::vector<VUnit> build_queue(const std::vector<RteAssertion>& assertions, const TypedProgram& program,
                               const CallGraph& cg, const ContractEnv& contracts, bool dependency_filter = true);

nlohmann::ordered_json dump_queue(const std::vector<VUnit>& queue);

}  // namespace preguss
