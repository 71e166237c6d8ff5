#include <map>
#include <set>
#include <sstream>

#include "preguss/frontend.hpp"

namespace preguss {

namespace {

int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::IntLit:
      return e.value < 0 ? 7 : 8;
    case Expr::Kind::Unary:
      return 7;
    case Expr::Kind::Binary:
      switch (e.binary_op) {
        case BinaryOp::Or: return 1;
        case BinaryOp::And: return 2;
        case BinaryOp::Eq:
        case BinaryOp::Ne: return 3;
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge: return 4;
        case BinaryOp::Add:
        case BinaryOp::Sub: return 5;
        default: return 6;
      }
    default:
      return 8;
  }
}

void print_expr(std::ostream& os, const Expr& e);

void print_operand(std::ostream& os, const Expr& e, int min_prec) {
  if (precedence(e) < min_prec) {
    os << '(';
    print_expr(os, e);
    os << ')';
  } else {
    print_expr(os, e);
  }
}

void print_expr(std::ostream& os, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::IntLit:
      os << e.value;
      break;
    case Expr::Kind::NamedConst:
    case Expr::Kind::Var:
      os << e.name;
      break;
    case Expr::Kind::Unary:
      os << to_string(e.unary_op);
      // `-5` would re-parse as a literal, so a negated literal keeps its parentheses.
      if (e.unary_op == UnaryOp::Neg && e.lhs().kind == Expr::Kind::IntLit) {
        os << '(' << e.lhs().value << ')';
      } else if (e.unary_op == UnaryOp::Neg && e.lhs().kind == Expr::Kind::Unary && e.lhs().unary_op == UnaryOp::Neg) {
        os << '(';
        print_expr(os, e.lhs());
        os << ')';
      } else {
        print_operand(os, e.lhs(), 7);
      }
      break;
    case Expr::Kind::Binary: {
      int p = precedence(e);
      print_operand(os, e.lhs(), p);
      os << ' ' << to_string(e.binary_op) << ' ';
      print_operand(os, e.rhs(), p + 1);
      break;
    }
    case Expr::Kind::Call:
      os << e.name << '(';
      for (std::size_t i = 0; i < e.operands.size(); ++i) {
        if (i) os << ", ";
        print_expr(os, *e.operands[i]);
      }
      os << ')';
      break;
  }
}

class Printer {
 public:
  Printer(const std::vector<Annotation>& annotations, bool label_loops) : label_loops_(label_loops) {
    for (const auto& a : annotations) by_anchor_[a.anchor].push_back(&a.clause);
  }

  void annotations(NodeId id, int indent) {
    auto it = by_anchor_.find(id);
    if (it == by_anchor_.end()) return;
    for (const Clause* c : it->second) {
      pad(indent);
      os_ << "/*@ " << render_clause(*c) << " */\n";
    }
  }

  void pad(int indent) {
    for (int i = 0; i < indent; ++i) os_ << "  ";
  }

  void function(const FunctionDef& f) {
    annotations(f.id, 0);
    os_ << (f.return_type == ValueType::Int ? "int " : "void ") << f.name << '(';
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      if (i) os_ << ", ";
      os_ << "int " << f.params[i].name;
    }
    os_ << ") ";
    block_body(*f.body, 0);
    os_ << '\n';
  }

  // Prints "{ ... }" where the opening brace continues the current line.
  void block_body(const Stmt& b, int indent) {
    os_ << "{\n";
    for (const auto& s : b.stmts) stmt(*s, indent + 1);
    pad(indent);
    os_ << '}';
  }

  // A branch or loop body: blocks stay on the header line, others go below it.
  void nested(const Stmt& s, int indent) {
    if (s.kind == Stmt::Kind::Block && !by_anchor_.count(s.id)) {
      os_ << ' ';
      block_body(s, indent);
    } else {
      os_ << '\n';
      stmt(s, indent + 1, /*trailing_newline=*/false);
    }
  }

  void stmt(const Stmt& s, int indent, bool trailing_newline = true) {
    annotations(s.id, indent);
    if (label_loops_ && s.kind == Stmt::Kind::While) {
      pad(indent);
      os_ << "/* loop " << s.id << " */\n";
    }
    pad(indent);
    switch (s.kind) {
      case Stmt::Kind::Decl:
        os_ << "int " << s.name << " = ";
        print_expr(os_, *s.expr);
        os_ << ';';
        break;
      case Stmt::Kind::Assign:
        os_ << s.name << " = ";
        print_expr(os_, *s.expr);
        os_ << ';';
        break;
      case Stmt::Kind::Return:
        os_ << "return";
        if (s.expr) {
          os_ << ' ';
          print_expr(os_, *s.expr);
        }
        os_ << ';';
        break;
      case Stmt::Kind::ExprStmt:
        print_expr(os_, *s.expr);
        os_ << ';';
        break;
      case Stmt::Kind::Block:
        block_body(s, indent);
        break;
      case Stmt::Kind::If: {
        os_ << "if (";
        print_expr(os_, *s.expr);
        os_ << ')';
        nested(*s.then_branch, indent);
        if (s.else_branch) {
          bool then_inline_block = s.then_branch->kind == Stmt::Kind::Block && !by_anchor_.count(s.then_branch->id);
          if (then_inline_block) {
            os_ << " else";
          } else {
            os_ << '\n';
            pad(indent);
            os_ << "else";
          }
          nested(*s.else_branch, indent);
        }
        break;
      }
      case Stmt::Kind::While:
        os_ << "while (";
        print_expr(os_, *s.expr);
        os_ << ')';
        nested(*s.body, indent);
        break;
    }
    if (trailing_newline) os_ << '\n';
  }

  std::string str() const { return os_.str(); }
  std::ostringstream& out() { return os_; }

 private:
  std::map<NodeId, std::vector<const Clause*>> by_anchor_;
  bool label_loops_ = false;
  std::ostringstream os_;
};

void collect_ids(const Program& p, std::set<NodeId>& ids) {
  for (const auto& g : p.globals) ids.insert(g.id);
  for (const auto& f : p.functions) {
    ids.insert(f.id);
    for_each_stmt(*f.body, [&](const Stmt& s) { ids.insert(s.id); });
  }
}

}  // namespace

std::string render_expr(const Expr& e) {
  std::ostringstream os;
  print_expr(os, e);
  return os.str();
}

std::string render(const Program& program, const std::vector<Annotation>& annotations) {
  std::set<NodeId> ids;
  collect_ids(program, ids);
  for (const auto& a : annotations)
    if (!ids.count(a.anchor)) throw UnknownNodeError("annotation anchor " + std::to_string(a.anchor) + " is not a statement or function of the program");

  Printer pr(annotations, false);
  for (const auto& g : program.globals) {
    pr.annotations(g.id, 0);
    pr.out() << "int " << g.name << " = " << render_expr(*g.init) << ";\n";
  }
  for (std::size_t i = 0; i < program.functions.size(); ++i) {
    if (i || !program.globals.empty()) pr.out() << '\n';
    pr.function(program.functions[i]);
  }
  return pr.str();
}

std::string render_function(const FunctionDef& fn, const std::vector<Annotation>& annotations, bool label_loops) {
  Printer pr(annotations, label_loops);
  pr.function(fn);
  return pr.str();
}

}  // namespace preguss
