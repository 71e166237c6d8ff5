#include <set>

#include "preguss/frontend.hpp"

namespace preguss {

const FunctionDef* TypedProgram::function(const std::string& name) const {
  auto it = infos_.find(name);
  return it == infos_.end() ? nullptr : it->second.def;
}

const FunctionInfo& TypedProgram::info(const std::string& name) const {
  auto it = infos_.find(name);
  if (it == infos_.end()) throw UnknownNodeError("unknown function '" + name + "'");
  return it->second;
}

const Stmt* TypedProgram::stmt(NodeId id) const {
  auto it = stmts_.find(id);
  return it == stmts_.end() ? nullptr : it->second;
}

const Expr* TypedProgram::expr(NodeId id) const {
  auto it = exprs_.find(id);
  return it == exprs_.end() ? nullptr : it->second;
}

bool TypedProgram::has_node(NodeId id) const { return owners_.count(id) > 0; }

const std::string& TypedProgram::owner(NodeId id) const {
  auto it = owners_.find(id);
  if (it == owners_.end()) throw UnknownNodeError("unknown node id " + std::to_string(id));
  return it->second;
}

NodeId TypedProgram::enclosing_stmt(NodeId expr_id) const {
  auto it = parent_stmt_.find(expr_id);
  return it == parent_stmt_.end() ? -1 : it->second;
}

std::vector<NodeId> TypedProgram::stmt_path(NodeId id) const {
  std::vector<NodeId> rev;
  NodeId cur = stmts_.count(id) ? id : enclosing_stmt(id);
  while (cur >= 0) {
    rev.push_back(cur);
    auto it = parent_stmt_.find(cur);
    cur = it == parent_stmt_.end() ? -1 : it->second;
  }
  return {rev.rbegin(), rev.rend()};
}

std::optional<std::int64_t> TypedProgram::global_value(const std::string& name) const {
  auto it = globals_.find(name);
  if (it == globals_.end()) return std::nullopt;
  return it->second;
}

bool TypedProgram::is_param(const std::string& fn, const std::string& var) const {
  const FunctionDef* f = function(fn);
  if (!f) return false;
  for (const auto& p : f->params)
    if (p.name == var) return true;
  return false;
}

namespace {

bool always_returns(const Stmt& s) {
  switch (s.kind) {
    case Stmt::Kind::Return:
      return true;
    case Stmt::Kind::Block:
      for (const auto& c : s.stmts)
        if (always_returns(*c)) return true;
      return false;
    case Stmt::Kind::If:
      return s.else_branch && always_returns(*s.then_branch) && always_returns(*s.else_branch);
    default:
      return false;
  }
}

void check_name(const std::string& name, const Location& loc) {
  if (name.rfind("__", 0) == 0)
    throw ResolveError(ResolveErrorKind::ReservedName, loc, "identifiers starting with '__' are reserved: '" + name + "'");
}

class Resolver {
 public:
  Resolver(IntWidth w, std::map<std::string, FunctionInfo>& infos,
           std::map<NodeId, const Stmt*>& stmts, std::map<NodeId, const Expr*>& exprs,
           std::map<NodeId, std::string>& owners, std::map<NodeId, NodeId>& parents,
           std::map<std::string, std::int64_t>& globals, std::vector<CallSite>& calls)
      : w_(w), infos_(infos), stmts_(stmts), exprs_(exprs), owners_(owners), parents_(parents),
        globals_(globals), calls_(calls) {}

  void run(const Program& p) {
    std::set<std::string> top;
    for (const auto& g : p.globals) {
      check_name(g.name, g.loc);
      if (!top.insert(g.name).second)
        throw ResolveError(ResolveErrorKind::DuplicateDefinition, g.loc, "redefinition of '" + g.name + "'");
      owners_[g.id] = "";
      globals_[g.name] = constant(*g.init);
    }
    for (const auto& f : p.functions) {
      check_name(f.name, f.loc);
      if (!top.insert(f.name).second)
        throw ResolveError(ResolveErrorKind::DuplicateDefinition, f.loc, "redefinition of '" + f.name + "'");
      infos_[f.name].def = &f;
    }
    for (const auto& f : p.functions) function(f);
  }

 private:
  std::int64_t constant(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::IntLit:
        check_literal(e);
        return e.value;
      case Expr::Kind::NamedConst:
        return e.name == "INT_MIN" ? w_.min() : w_.max();
      case Expr::Kind::Var: {
        auto it = globals_.find(e.name);
        if (it == globals_.end())
          throw ResolveError(ResolveErrorKind::UnknownIdentifier, e.loc, "'" + e.name + "' is not a constant");
        return it->second;
      }
      case Expr::Kind::Unary: {
        std::int64_t v = constant(e.lhs());
        return e.unary_op == UnaryOp::Neg ? checked(-v, e) : (v == 0);
      }
      case Expr::Kind::Binary: {
        std::int64_t a = constant(e.lhs());
        std::int64_t b = constant(e.rhs());
        switch (e.binary_op) {
          case BinaryOp::Add: return checked(a + b, e);
          case BinaryOp::Sub: return checked(a - b, e);
          case BinaryOp::Mul: return checked(a * b, e);
          case BinaryOp::Div:
          case BinaryOp::Mod:
            if (b == 0) throw ResolveError(ResolveErrorKind::TypeMismatch, e.loc, "division by zero in constant");
            return checked(e.binary_op == BinaryOp::Div ? a / b : a % b, e);
          case BinaryOp::Lt: return a < b;
          case BinaryOp::Le: return a <= b;
          case BinaryOp::Gt: return a > b;
          case BinaryOp::Ge: return a >= b;
          case BinaryOp::Eq: return a == b;
          case BinaryOp::Ne: return a != b;
          case BinaryOp::And: return a && b;
          case BinaryOp::Or: return a || b;
        }
        return 0;
      }
      case Expr::Kind::Call:
        break;
    }
    throw ResolveError(ResolveErrorKind::TypeMismatch, e.loc, "global initializer must be a constant expression");
  }

  std::int64_t checked(std::int64_t v, const Expr& e) {
    if (!w_.contains(v))
      throw ResolveError(ResolveErrorKind::LiteralOutOfRange, e.loc, "constant " + std::to_string(v) + " overflows int");
    return v;
  }

  void check_literal(const Expr& e) {
    if (!w_.contains(e.value))
      throw ResolveError(ResolveErrorKind::LiteralOutOfRange, e.loc,
                         "literal " + std::to_string(e.value) + " does not fit a " + std::to_string(w_.bits()) +
                             "-bit int");
  }

  void function(const FunctionDef& f) {
    fn_ = &f;
    info_ = &infos_[f.name];
    owners_[f.id] = f.name;
    scopes_.clear();
    scopes_.emplace_back();
    for (const auto& p : f.params) {
      check_name(p.name, p.loc);
      if (globals_.count(p.name) || !scopes_.back().insert(p.name).second)
        throw ResolveError(ResolveErrorKind::DuplicateDefinition, p.loc, "duplicate parameter '" + p.name + "'");
    }
    stmt(*f.body, -1);
    if (f.return_type == ValueType::Int && !always_returns(*f.body))
      throw ResolveError(ResolveErrorKind::TypeMismatch, f.loc,
                         "control may reach the end of non-void function '" + f.name + "'");
  }

  bool visible(const std::string& name) const {
    for (const auto& s : scopes_)
      if (s.count(name)) return true;
    return false;
  }

  void stmt(const Stmt& s, NodeId parent) {
    stmts_[s.id] = &s;
    owners_[s.id] = fn_->name;
    if (parent >= 0) parents_[s.id] = parent;
    switch (s.kind) {
      case Stmt::Kind::Decl:
        value(*s.expr, s.id);
        check_name(s.name, s.loc);
        if (visible(s.name) || globals_.count(s.name))
          throw ResolveError(ResolveErrorKind::DuplicateDefinition, s.loc,
                             "'" + s.name + "' is already declared in an enclosing scope");
        scopes_.back().insert(s.name);
        info_->locals.push_back(s.name);
        break;
      case Stmt::Kind::Assign:
        if (!visible(s.name)) {
          if (globals_.count(s.name))
            throw ResolveError(ResolveErrorKind::TypeMismatch, s.loc, "cannot assign to constant '" + s.name + "'");
          throw ResolveError(ResolveErrorKind::UnknownIdentifier, s.loc, "use of undeclared '" + s.name + "'");
        }
        value(*s.expr, s.id);
        break;
      case Stmt::Kind::If:
        value(*s.expr, s.id);
        scoped(*s.then_branch, s.id);
        if (s.else_branch) scoped(*s.else_branch, s.id);
        break;
      case Stmt::Kind::While:
        info_->loops.push_back(s.id);
        value(*s.expr, s.id);
        scoped(*s.body, s.id);
        break;
      case Stmt::Kind::Return:
        if (fn_->return_type == ValueType::Void && s.expr)
          throw ResolveError(ResolveErrorKind::TypeMismatch, s.loc, "void function '" + fn_->name + "' returns a value");
        if (fn_->return_type == ValueType::Int && !s.expr)
          throw ResolveError(ResolveErrorKind::TypeMismatch, s.loc, "non-void function '" + fn_->name + "' must return a value");
        if (s.expr) value(*s.expr, s.id);
        break;
      case Stmt::Kind::ExprStmt:
        expr(*s.expr, s.id, /*needs_value=*/false);
        break;
      case Stmt::Kind::Block:
        scopes_.emplace_back();
        for (const auto& c : s.stmts) stmt(*c, s.id);
        scopes_.pop_back();
        break;
    }
  }

  void scoped(const Stmt& s, NodeId parent) {
    scopes_.emplace_back();
    stmt(s, parent);
    scopes_.pop_back();
  }

  void value(const Expr& e, NodeId st) { expr(e, st, true); }

  void expr(const Expr& e, NodeId st, bool needs_value) {
    exprs_[e.id] = &e;
    owners_[e.id] = fn_->name;
    parents_[e.id] = st;
    switch (e.kind) {
      case Expr::Kind::IntLit:
        check_literal(e);
        break;
      case Expr::Kind::NamedConst:
        break;
      case Expr::Kind::Var:
        if (!visible(e.name) && !globals_.count(e.name))
          throw ResolveError(ResolveErrorKind::UnknownIdentifier, e.loc, "use of undeclared '" + e.name + "'");
        break;
      case Expr::Kind::Unary:
      case Expr::Kind::Binary:
        for (const auto& op : e.operands) value(*op, st);
        break;
      case Expr::Kind::Call: {
        auto it = infos_.find(e.name);
        if (it == infos_.end())
          throw ResolveError(ResolveErrorKind::UnknownIdentifier, e.loc, "call to undefined function '" + e.name + "'");
        const FunctionDef& callee = *it->second.def;
        if (callee.params.size() != e.operands.size())
          throw ResolveError(ResolveErrorKind::ArityMismatch, e.loc,
                             "'" + e.name + "' expects " + std::to_string(callee.params.size()) + " argument(s), got " +
                                 std::to_string(e.operands.size()));
        if (needs_value && callee.return_type == ValueType::Void)
          throw ResolveError(ResolveErrorKind::TypeMismatch, e.loc, "void function '" + e.name + "' used as a value");
        for (const auto& op : e.operands) value(*op, st);
        CallSite cs{fn_->name, e.name, e.id, st, e.loc, &e};
        info_->calls.push_back(cs);
        calls_.push_back(cs);
        break;
      }
    }
  }

  IntWidth w_;
  std::map<std::string, FunctionInfo>& infos_;
  std::map<NodeId, const Stmt*>& stmts_;
  std::map<NodeId, const Expr*>& exprs_;
  std::map<NodeId, std::string>& owners_;
  std::map<NodeId, NodeId>& parents_;
  std::map<std::string, std::int64_t>& globals_;
  std::vector<CallSite>& calls_;
  const FunctionDef* fn_ = nullptr;
  FunctionInfo* info_ = nullptr;
  std::vector<std::set<std::string>> scopes_;
};

}  // namespace

TypedProgram resolve(const Program& program, IntWidth width) {
  TypedProgram tp;
  auto owned = std::make_shared<Program>(program);
  tp.program_ = owned;
  tp.width_ = width;
  Resolver r(width, tp.infos_, tp.stmts_, tp.exprs_, tp.owners_, tp.parent_stmt_, tp.globals_, tp.all_calls_);
  r.run(*owned);
  tp.has_entry_ = owned->find(owned->entry) != nullptr;
  return tp;
}

TypedProgram load(std::string_view source, IntWidth width, std::string file) {
  return resolve(parse(source, std::move(file)), width);
}

}  // namespace preguss
