#include "preguss/synthesis.hpp"

namespace preguss {

namespace {

std::string anchor_function(const Clause& c, const TypedProgram& tp) {
  for (const auto& f : tp.program().functions)
    if (f.id == c.anchor) return f.name;
  return tp.has_node(c.anchor) ? tp.owner(c.anchor) : std::string();
}

}  // namespace

bool ContractStore::add(const Clause& c, const std::string& unit) {
  ++writes_;
  std::string fn = anchor_function(c, *program_);
  bool refused = c.kind == ClauseKind::Requires && locked_.count(fn);
  if (on_write) on_write(c, refused);
  if (refused) {
    ++violations_;
    log_.push_back({unit, "refused", fn + ": " + render_clause(c)});
    return false;
  }
  for (const auto& old : clauses_)
    if (old == c) return true;
  env_ = merge_clauses(env_, {c}, *program_);
  clauses_.push_back(c);
  log_.push_back({unit, "accept", fn + ": " + render_clause(c)});
  return true;
}

}  // namespace preguss
