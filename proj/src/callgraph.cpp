#include "preguss/callgraph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>

namespace preguss {

std::vector<std::string> CallGraph::callees(const std::string& f) const {
  std::vector<std::string> out;
  for (const auto& e : edges)
    if (e.caller == f && std::find(out.begin(), out.end(), e.callee) == out.end()) out.push_back(e.callee);
  return out;
}

std::vector<std::string> CallGraph::callers(const std::string& f) const {
  std::vector<std::string> out;
  for (const auto& e : edges)
    if (e.callee == f && std::find(out.begin(), out.end(), e.caller) == out.end()) out.push_back(e.caller);
  return out;
}

int CallGraph::distance(const std::string& from, const std::string& to) const {
  std::map<std::string, int> dist{{from, 0}};
  std::deque<std::string> q{from};
  while (!q.empty()) {
    std::string f = q.front();
    q.pop_front();
    if (f == to) return dist[f];
    for (const auto& c : callees(f))
      if (!dist.count(c)) {
        dist[c] = dist[f] + 1;
        q.push_back(c);
      }
  }
  return -1;
}

bool CallGraph::reaches(const std::string& from, const std::string& to) const {
  for (const auto& c : callees(from))
    if (c == to || distance(c, to) >= 0) return true;
  return false;
}

CallGraph build_call_graph(const TypedProgram& program) {
  CallGraph cg;
  for (const auto& f : program.program().functions) cg.nodes.push_back(f.name);
  for (const auto& f : program.program().functions)
    for (const auto& c : program.info(f.name).calls) cg.edges.push_back({c.caller, c.callee, c.call});

  // Cycle detection by DFS with an explicit path.
  std::map<std::string, int> color;  // 0 white, 1 on path, 2 done
  std::vector<std::string> path;
  std::function<void(const std::string&)> visit = [&](const std::string& f) {
    color[f] = 1;
    path.push_back(f);
    for (const auto& c : cg.callees(f)) {
      if (color[c] == 1) {
        auto it = std::find(path.begin(), path.end(), c);
        throw MutualRecursionError(std::vector<std::string>(it, path.end()));
      }
      if (color[c] == 0) visit(c);
    }
    path.pop_back();
    color[f] = 2;
  };
  for (const auto& f : cg.nodes)
    if (color[f] == 0) visit(f);
  return cg;
}

std::vector<std::string> post_order(const CallGraph& cg) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  std::function<void(const std::string&)> visit = [&](const std::string& f) {
    if (!seen.insert(f).second) return;
    for (const auto& c : cg.callees(f)) visit(c);
    out.push_back(f);
  };
  for (const auto& f : cg.nodes) visit(f);
  return out;
}

std::vector<RteAssertion> collect_assertions(const AnalysisResult& analysis, const CallGraph& cg,
                                             const TypedProgram& program) {
  std::vector<RteAssertion> out = analysis.assertions;
  std::set<std::string> analyzed(analysis.analyzed.begin(), analysis.analyzed.end());
  for (const auto& e : cg.edges) {
    if (!analyzed.count(e.caller)) continue;
    RteAssertion a;
    a.id = "call@" + std::to_string(e.call);
    a.kind = RteKind::CallSitePrecondition;
    a.predicate = pred::truth();
    a.node = e.call;
    a.stmt = program.enclosing_stmt(e.call);
    a.host = e.caller;
    a.callee = e.callee;
    a.loc = program.expr(e.call)->loc;
    a.status = AssertionStatus::Pending;
    out.push_back(std::move(a));
  }
  return out;
}

VUnit build_vunit(const RteAssertion& a, const TypedProgram& program, const CallGraph& cg,
                  const ContractEnv& contracts, bool dependency_filter, int priority) {
  VUnit v;
  v.target = a;
  v.host = a.host;
  v.slice.push_back(a.host);
  for (const auto& c : cg.callees(a.host)) v.slice.push_back(c);
  v.contracts = contracts;
  v.priority = priority;
  if (dependency_filter) v = filter_callees_by_dependency(std::move(v), program);
  return v;
}

VUnit filter_callees_by_dependency(VUnit v, const TypedProgram& program) {
  std::set<NodeId> calls = relevant_calls(program, v.host, v.target.node, v.target.kind);
  std::set<std::string> keep;
  for (NodeId c : calls) keep.insert(program.expr(c)->name);
  std::vector<std::string> slice{v.host};
  for (std::size_t i = 1; i < v.slice.size(); ++i) {
    if (keep.count(v.slice[i])) slice.push_back(v.slice[i]);
    else v.dropped_callees.push_back(v.slice[i]);
  }
  v.slice = std::move(slice);
  return v;
}

std::vector<VUnit> build_queue(const std::vector<RteAssertion>& assertions, const TypedProgram& program,
                               const CallGraph& cg, const ContractEnv& contracts, bool dependency_filter) {
  std::map<std::string, std::size_t> rank;
  std::vector<std::string> order = post_order(cg);
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
  std::vector<const RteAssertion*> sorted;
  for (const auto& a : assertions) sorted.push_back(&a);
  std::stable_sort(sorted.begin(), sorted.end(), [&](const RteAssertion* x, const RteAssertion* y) {
    if (rank[x->host] != rank[y->host]) return rank[x->host] < rank[y->host];
    return x->node < y->node;
  });
  std::vector<VUnit> out;
  for (std::size_t i = 0; i < sorted.size(); ++i)
    out.push_back(build_vunit(*sorted[i], program, cg, contracts, dependency_filter, static_cast<int>(i)));
  return out;
}

nlohmann::ordered_json dump_queue(const std::vector<VUnit>& queue) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& v : queue) {
    nlohmann::ordered_json j;
    j["priority"] = v.priority;
    j["id"] = v.target.id;
    j["kind"] = to_string(v.target.kind);
    j["host"] = v.host;
    if (!v.target.callee.empty()) j["callee"] = v.target.callee;
    j["line"] = v.target.loc.line;
    j["column"] = v.target.loc.column;
    j["slice"] = v.slice;
    j["dropped_callees"] = v.dropped_callees;
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace preguss
