#include "preguss/ast.hpp"

namespace preguss {

const char* to_string(UnaryOp op) { return op == UnaryOp::Neg ? "-" : "!"; }

const char* to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
  }
  return "?";
}

bool is_comparison(BinaryOp op) {
  switch (op) {
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge:
    case BinaryOp::Eq:
    case BinaryOp::Ne:
      return true;
    default:
      return false;
  }
}

bool is_arithmetic(BinaryOp op) {
  return op == BinaryOp::Add || op == BinaryOp::Sub || op == BinaryOp::Mul || op == BinaryOp::Div ||
         op == BinaryOp::Mod;
}

bool is_logical(BinaryOp op) { return op == BinaryOp::And || op == BinaryOp::Or; }

const FunctionDef* Program::find(const std::string& name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.id != b.id || a.operands.size() != b.operands.size()) return false;
  switch (a.kind) {
    case Expr::Kind::IntLit:
      if (a.value != b.value) return false;
      break;
    case Expr::Kind::NamedConst:
    case Expr::Kind::Var:
    case Expr::Kind::Call:
      if (a.name != b.name) return false;
      break;
    case Expr::Kind::Unary:
      if (a.unary_op != b.unary_op) return false;
      break;
    case Expr::Kind::Binary:
      if (a.binary_op != b.binary_op) return false;
      break;
  }
  for (std::size_t i = 0; i < a.operands.size(); ++i)
    if (!structurally_equal(*a.operands[i], *b.operands[i])) return false;
  return true;
}

namespace {

template <typename T>
bool both_null_or_equal(const std::shared_ptr<const T>& a, const std::shared_ptr<const T>& b) {
  if (!a || !b) return !a && !b;
  return structurally_equal(*a, *b);
}

}  // namespace

bool structurally_equal(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind || a.id != b.id || a.name != b.name || a.stmts.size() != b.stmts.size()) return false;
  if (!both_null_or_equal(a.expr, b.expr) || !both_null_or_equal(a.then_branch, b.then_branch) ||
      !both_null_or_equal(a.else_branch, b.else_branch) || !both_null_or_equal(a.body, b.body))
    return false;
  for (std::size_t i = 0; i < a.stmts.size(); ++i)
    if (!structurally_equal(*a.stmts[i], *b.stmts[i])) return false;
  return true;
}

bool structurally_equal(const Program& a, const Program& b) {
  if (a.globals.size() != b.globals.size() || a.functions.size() != b.functions.size()) return false;
  for (std::size_t i = 0; i < a.globals.size(); ++i) {
    const auto& x = a.globals[i];
    const auto& y = b.globals[i];
    if (x.name != y.name || x.id != y.id || !structurally_equal(*x.init, *y.init)) return false;
  }
  for (std::size_t i = 0; i < a.functions.size(); ++i) {
    const auto& f = a.functions[i];
    const auto& g = b.functions[i];
    if (f.name != g.name || f.id != g.id || f.return_type != g.return_type || f.params.size() != g.params.size())
      return false;
    for (std::size_t k = 0; k < f.params.size(); ++k)
      if (f.params[k].name != g.params[k].name) return false;
    if (!structurally_equal(*f.body, *g.body)) return false;
  }
  return true;
}

std::vector<const Expr*> own_exprs(const Stmt& s) {
  if (s.expr) return {s.expr.get()};
  return {};
}

}  // namespace preguss
