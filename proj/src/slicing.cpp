// Backward dependence inside one function: reaching definitions over a small
// CFG plus structural control dependence.
#include <functional>
#include <map>
#include <set>

#include "preguss/callgraph.hpp"

namespace preguss {

namespace {

struct Node {
  const Stmt* stmt = nullptr;  // null for entry/exit
  bool is_cond = false;
  std::string def;  // Decl/Assign target
  std::set<std::string> uses;
  std::set<NodeId> calls;
  std::vector<int> succ;
  std::vector<int> controllers;  // enclosing condition nodes
  bool contains_return = false;  // condition nodes: some return inside the branches/body
};

using Def = std::pair<int, std::string>;  // (defining node, variable)

void expr_vars(const Expr& e, std::set<std::string>& vars, std::set<NodeId>& calls) {
  for_each_expr(e, [&](const Expr& x) {
    if (x.kind == Expr::Kind::Var) vars.insert(x.name);
    if (x.kind == Expr::Kind::Call) calls.insert(x.id);
  });
}

bool has_return(const Stmt& s) {
  bool r = false;
  for_each_stmt(s, [&](const Stmt& x) { r = r || x.kind == Stmt::Kind::Return; });
  return r;
}

class Cfg {
 public:
  explicit Cfg(const FunctionDef& f) {
    entry_ = add(Node{});
    exit_ = add(Node{});
    for (int n : build(*f.body, {entry_}, {})) link(n, exit_);
    std::set<Def> params;
    for (const auto& p : f.params) params.insert({entry_, p.name});
    reaching(params);
  }

  std::vector<Node> nodes;
  std::map<NodeId, int> by_stmt;
  std::vector<std::set<Def>> in;
  std::vector<bool> live;  // reachable from entry

  bool reaches(int from, int to) const {
    std::set<int> seen;
    std::vector<int> stack{from};
    while (!stack.empty()) {
      int n = stack.back();
      stack.pop_back();
      for (int s : nodes[n].succ) {
        if (s == to) return true;
        if (seen.insert(s).second) stack.push_back(s);
      }
    }
    return false;
  }

 private:
  int add(Node n) {
    nodes.push_back(std::move(n));
    return static_cast<int>(nodes.size()) - 1;
  }

  void link(int a, int b) { nodes[a].succ.push_back(b); }

  int simple(const Stmt& s, const std::vector<int>& preds, const std::vector<int>& ctrl) {
    Node n;
    n.stmt = &s;
    n.controllers = ctrl;
    if (s.expr) expr_vars(*s.expr, n.uses, n.calls);
    if (s.kind == Stmt::Kind::Decl || s.kind == Stmt::Kind::Assign) n.def = s.name;
    int id = add(std::move(n));
    by_stmt[s.id] = id;
    for (int p : preds) link(p, id);
    return id;
  }

  int condition(const Stmt& s, const std::vector<int>& preds, const std::vector<int>& ctrl) {
    int c = simple(s, preds, ctrl);
    nodes[c].is_cond = true;
    nodes[c].contains_return = has_return(s);
    return c;
  }

  std::vector<int> build(const Stmt& s, std::vector<int> preds, const std::vector<int>& ctrl) {
    switch (s.kind) {
      case Stmt::Kind::Block:
        for (const auto& c : s.stmts) preds = build(*c, preds, ctrl);
        return preds;
      case Stmt::Kind::Return:
        link(simple(s, preds, ctrl), exit_);
        return {};
      case Stmt::Kind::If: {
        int c = condition(s, preds, ctrl);
        std::vector<int> inner = ctrl;
        inner.push_back(c);
        std::vector<int> out = build(*s.then_branch, {c}, inner);
        std::vector<int> other = s.else_branch ? build(*s.else_branch, {c}, inner) : std::vector<int>{c};
        out.insert(out.end(), other.begin(), other.end());
        return out;
      }
      case Stmt::Kind::While: {
        int c = condition(s, preds, ctrl);
        std::vector<int> inner = ctrl;
        inner.push_back(c);
        for (int b : build(*s.body, {c}, inner)) link(b, c);
        return {c};
      }
      default:
        return {simple(s, preds, ctrl)};
    }
  }

  void reaching(const std::set<Def>& entry_defs) {
    std::size_t n = nodes.size();
    in.assign(n, {});
    std::vector<std::set<Def>> out(n);
    std::vector<std::vector<int>> preds(n);
    for (std::size_t i = 0; i < n; ++i)
      for (int s : nodes[i].succ) preds[s].push_back(static_cast<int>(i));
    out[entry_] = entry_defs;
    // dead statements (after a return) define nothing
    live.assign(n, false);
    std::vector<int> stack{entry_};
    live[entry_] = true;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int s : nodes[x].succ)
        if (!live[s]) live[s] = true, stack.push_back(s);
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (static_cast<int>(i) == entry_ || !live[i]) continue;
        std::set<Def> inset;
        for (int p : preds[i]) inset.insert(out[p].begin(), out[p].end());
        std::set<Def> outset;
        const std::string& d = nodes[i].def;
        for (const auto& r : inset)
          if (d.empty() || r.second != d) outset.insert(r);
        if (!d.empty()) outset.insert({static_cast<int>(i), d});
        if (inset != in[i] || outset != out[i]) {
          in[i] = std::move(inset);
          out[i] = std::move(outset);
          changed = true;
        }
      }
    }
  }

  int entry_ = 0, exit_ = 0;
};

// Path of expressions from `root` down to the node with id `target`.
bool expr_path(const Expr& root, NodeId target, std::vector<const Expr*>& path) {
  path.push_back(&root);
  if (root.id == target) return true;
  for (const auto& op : root.operands)
    if (expr_path(*op, target, path)) return true;
  path.pop_back();
  return false;
}

}  // namespace

std::set<NodeId> relevant_calls(const TypedProgram& program, const std::string& host, NodeId target_node,
                                RteKind) {
  const FunctionDef* f = program.function(host);
  if (!f) throw UnknownNodeError("unknown function '" + host + "'");
  const Expr* target = program.expr(target_node);
  if (!target) throw UnknownNodeError("unknown target node " + std::to_string(target_node));
  Cfg cfg(*f);
  int tnode = cfg.by_stmt.at(program.enclosing_stmt(target_node));

  // Seeds: the operands of the guarded operation, or the arguments of the guarded call.
  std::set<std::string> vars;
  std::set<NodeId> calls;
  for (const auto& op : target->operands) expr_vars(*op, vars, calls);
  // Short-circuit operators above the target decide whether it is evaluated.
  std::vector<const Expr*> path;
  const Stmt* st = cfg.nodes[tnode].stmt;
  if (st->expr && expr_path(*st->expr, target_node, path)) {
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      const Expr* e = path[i];
      if (e->kind == Expr::Kind::Binary && (e->binary_op == BinaryOp::And || e->binary_op == BinaryOp::Or) &&
          path[i + 1] == e->operands[1].get())
        expr_vars(e->lhs(), vars, calls);
    }
  }

  std::set<int> relevant;
  std::vector<std::pair<int, std::string>> work;  // (use site, variable)
  std::function<void(int)> mark = [&](int n) {
    if (!relevant.insert(n).second) return;
    const Node& node = cfg.nodes[n];
    calls.insert(node.calls.begin(), node.calls.end());
    for (const auto& v : node.uses) work.emplace_back(n, v);
    for (int c : node.controllers) mark(c);
  };

  for (const auto& v : vars) work.emplace_back(tnode, v);
  for (int c : cfg.nodes[tnode].controllers) mark(c);
  // Conditions that may return early change whether the target is reached.
  for (std::size_t i = 0; i < cfg.nodes.size(); ++i)
    if (cfg.live[i] && cfg.nodes[i].is_cond && cfg.nodes[i].contains_return && cfg.reaches(static_cast<int>(i), tnode))
      mark(static_cast<int>(i));

  std::set<std::pair<int, std::string>> done;
  while (!work.empty()) {
    auto item = work.back();
    work.pop_back();
    if (!done.insert(item).second) continue;
    for (const auto& [d, v] : cfg.in[item.first])
      if (v == item.second && cfg.nodes[d].stmt) mark(d);
  }
  return calls;
}

}  // namespace preguss
