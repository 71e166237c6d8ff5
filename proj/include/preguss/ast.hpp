#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "preguss/error.hpp"

namespace preguss {

// Pre-order index over the whole program; stable across re-parses of the same text.
using NodeId = int;

enum class UnaryOp { Neg, Not };
enum class BinaryOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };

const char* to_string(UnaryOp op);
const char* to_string(BinaryOp op);
bool is_comparison(BinaryOp op);
bool is_arithmetic(BinaryOp op);
bool is_logical(BinaryOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { IntLit, NamedConst, Var, Unary, Binary, Call };

  Kind kind = Kind::IntLit;
  NodeId id = -1;
  Location loc;
  std::int64_t value = 0;   // IntLit
  std::string name;         // NamedConst (INT_MIN, INT_MAX), Var, Call callee
  UnaryOp unary_op = UnaryOp::Neg;
  BinaryOp binary_op = BinaryOp::Add;
  std::vector<ExprPtr> operands;  // unary: 1, binary: 2, call: arguments

  const Expr& lhs() const { return *operands.at(0); }
  const Expr& rhs() const { return *operands.at(1); }
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Stmt {
  enum class Kind { Decl, Assign, If, While, Return, ExprStmt, Block };

  Kind kind = Kind::Block;
  NodeId id = -1;
  Location loc;
  std::string name;              // Decl / Assign target
  ExprPtr expr;                  // Decl/Assign value, Return value (may be null), ExprStmt, If/While condition
  StmtPtr then_branch;           // If
  StmtPtr else_branch;           // If (may be null)
  StmtPtr body;                  // While
  std::vector<StmtPtr> stmts;    // Block

  bool is_call_stmt() const { return kind == Kind::ExprStmt && expr && expr->kind == Expr::Kind::Call; }
};

enum class ValueType { Int, Void };

struct Param {
  std::string name;
  Location loc;
};

struct FunctionDef {
  std::string name;
  NodeId id = -1;
  Location loc;
  ValueType return_type = ValueType::Int;
  std::vector<Param> params;
  StmtPtr body;  // always a Block
};

// Top-level `int NAME = <constant>;`. Globals are read-only named constants.
struct GlobalConst {
  std::string name;
  NodeId id = -1;
  Location loc;
  ExprPtr init;
};

struct Program {
  std::vector<GlobalConst> globals;
  std::vector<FunctionDef> functions;
  std::string entry = "main";
  std::string file;

  const FunctionDef* find(const std::string& name) const;
};

/// Structural equality: ignores locations, compares shape, names, literals and node ids.
bool structurally_equal(const Program& a, const Program& b);
bool structurally_equal(const Stmt& a, const Stmt& b);
bool structurally_equal(const Expr& a, const Expr& b);

// Visitation helpers used by most passes.
template <typename F>
void for_each_expr(const Expr& e, F&& f) {
  f(e);
  for (const auto& op : e.operands) for_each_expr(*op, f);
}

template <typename F>
void for_each_stmt(const Stmt& s, F&& f) {
  f(s);
  switch (s.kind) {
    case Stmt::Kind::If:
      for_each_stmt(*s.then_branch, f);
      if (s.else_branch) for_each_stmt(*s.else_branch, f);
      break;
    case Stmt::Kind::While:
      for_each_stmt(*s.body, f);
      break;
    case Stmt::Kind::Block:
      for (const auto& c : s.stmts) for_each_stmt(*c, f);
      break;
    default:
      break;
  }
}

/// Every expression directly owned by the statement (not by nested statements).
std::vector<const Expr*> own_exprs(const Stmt& s);

}  // namespace preguss
