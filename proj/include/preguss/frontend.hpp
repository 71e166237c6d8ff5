#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "preguss/ast.hpp"
#include "preguss/int_width.hpp"
#include "preguss/specs.hpp"

namespace preguss {

/// Parses MiniC source. `#` lines (preprocessor directives) and comments are
/// skipped. Throws SyntaxError with the location and the expected-token set.
Program parse(std::string_view source, std::string file = "<input>");

struct CallSite {
  std::string caller;
  std::string callee;
  NodeId call = -1;   // the Call expression
  NodeId stmt = -1;   // innermost enclosing statement
  Location loc;
  const Expr* expr = nullptr;
};

struct FunctionInfo {
  const FunctionDef* def = nullptr;
  std::vector<std::string> locals;   // declaration order
  std::vector<NodeId> loops;         // pre-order
  std::vector<CallSite> calls;       // source order
};

// A resolved program: names bound, arities and value/void usage checked,
// literals range-checked against the width. Holds node indexes used by every
// later pass.
class TypedProgram {
 public:
  const Program& program() const { return *program_; }
  IntWidth width() const { return width_; }

  const FunctionDef* function(const std::string& name) const;
  const FunctionInfo& info(const std::string& name) const;
  bool has_entry() const { return has_entry_; }
  const std::string& entry() const { return program_->entry; }

  const Stmt* stmt(NodeId id) const;
  const Expr* expr(NodeId id) const;
  bool has_node(NodeId id) const;
  /// Function that contains the node (functions contain themselves).
  const std::string& owner(NodeId id) const;
  /// Innermost statement enclosing an expression node.
  NodeId enclosing_stmt(NodeId expr_id) const;
  /// Chain of enclosing statements, outermost first, ending with the node itself if it is a statement.
  std::vector<NodeId> stmt_path(NodeId id) const;

  std::optional<std::int64_t> global_value(const std::string& name) const;
  bool is_param(const std::string& fn, const std::string& var) const;

  const std::vector<CallSite>& all_calls() const { return all_calls_; }

 private:
  friend TypedProgram resolve(const Program& program, IntWidth width);

  // Shared so the node indexes (raw pointers into the program) stay valid across copies.
  std::shared_ptr<const Program> program_;
  IntWidth width_;
  bool has_entry_ = false;
  std::map<std::string, FunctionInfo> infos_;
  std::map<NodeId, const Stmt*> stmts_;
  std::map<NodeId, const Expr*> exprs_;
  std::map<NodeId, std::string> owners_;
  std::map<NodeId, NodeId> parent_stmt_;
  std::map<std::string, std::int64_t> globals_;
  std::vector<CallSite> all_calls_;
};

/// Throws ResolveError (unknown-identifier, arity-mismatch, type-mismatch,
/// duplicate-definition, literal-out-of-range, reserved-name).
TypedProgram resolve(const Program& program, IntWidth width = IntWidth());

// Convenience: parse + resolve.
TypedProgram load(std::string_view source, IntWidth width = IntWidth(), std::string file = "<input>");

struct Annotation {
  NodeId anchor = -1;
  Clause clause;
  bool operator==(const Annotation&) const = default;
};

/// Pretty-prints the program with ACSL-style comments placed immediately above
/// their anchors. Throws UnknownNodeError for an anchor that is not a
/// function, global or statement of the program.
std::string render(const Program& program, const std::vector<Annotation>& annotations = {});

/// Renders one function (with optional annotations); used for prompts.
std::string render_function(const FunctionDef& fn, const std::vector<Annotation>& annotations = {},
                            bool label_loops = false);
std::string render_expr(const Expr& e);

}  // namespace preguss
