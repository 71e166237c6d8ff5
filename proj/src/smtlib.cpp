#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <unistd.h>

#include "preguss/verifier.hpp"

namespace preguss {

std::string smt_symbol(const std::string& key) {
  std::string s;
  for (char c : key) {
    if (c == '\\') s += '$';
    else if (c == '|') s += '!';
    else s += c;
  }
  return "|" + s + "|";
}

namespace {

std::string num(std::int64_t v) {
  if (v >= 0) return std::to_string(v);
  return "(- " + std::to_string(std::uint64_t(0) - std::uint64_t(v)) + ")";
}

std::string smt(const PredPtr& p);

std::string abs_of(const std::string& a) { return "(ite (>= " + a + " 0) " + a + " (- " + a + "))"; }

// truncating division, x / 0 == 0; literal divisors stay linear
std::string tdiv(const std::string& a, const std::string& b, const TermPtr& bt) {
  std::string ab = bt->kind == Term::Kind::Const ? num(bt->value < 0 ? -bt->value : bt->value) : abs_of(b);
  std::string q = "(div " + abs_of(a) + " " + ab + ")";
  return "(ite (= " + b + " 0) 0 (ite (= (< " + a + " 0) (< " + b + " 0)) " + q + " (- " + q + ")))";
}

std::string smt(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Const: return num(t->value);
    case Term::Kind::IntMin:
    case Term::Kind::IntMax: throw Error("width not instantiated");
    case Term::Kind::Var:
    case Term::Kind::Result:
    case Term::Kind::Old: return smt_symbol(leaf_key(*t));
    case Term::Kind::Neg: return "(- " + smt(t->a) + ")";
    case Term::Kind::Add: return "(+ " + smt(t->a) + " " + smt(t->b) + ")";
    case Term::Kind::Sub: return "(- " + smt(t->a) + " " + smt(t->b) + ")";
    case Term::Kind::Mul: return "(* " + smt(t->a) + " " + smt(t->b) + ")";
    case Term::Kind::Div: return tdiv(smt(t->a), smt(t->b), t->b);
    case Term::Kind::Mod: {
      std::string a = smt(t->a), b = smt(t->b);
      return "(ite (= " + b + " 0) " + a + " (- " + a + " (* " + b + " " + tdiv(a, b, t->b) + ")))";
    }
    case Term::Kind::Ite: return "(ite " + smt(t->cond) + " " + smt(t->a) + " " + smt(t->b) + ")";
  }
  return "0";
}

std::string nary(const char* op, const std::vector<PredPtr>& args) {
  std::string s = std::string("(") + op;
  for (const auto& a : args) s += " " + smt(a);
  return s + ")";
}

std::string smt(const PredPtr& p) {
  switch (p->kind) {
    case Pred::Kind::True: return "true";
    case Pred::Kind::False: return "false";
    case Pred::Kind::Cmp: {
      std::string a = smt(p->lhs), b = smt(p->rhs);
      switch (p->op) {
        case CmpOp::Eq: return "(= " + a + " " + b + ")";
        case CmpOp::Ne: return "(not (= " + a + " " + b + "))";
        case CmpOp::Lt: return "(< " + a + " " + b + ")";
        case CmpOp::Le: return "(<= " + a + " " + b + ")";
        case CmpOp::Gt: return "(> " + a + " " + b + ")";
        case CmpOp::Ge: return "(>= " + a + " " + b + ")";
      }
      return "true";
    }
    case Pred::Kind::And: return nary("and", p->args);
    case Pred::Kind::Or: return nary("or", p->args);
    case Pred::Kind::Not: return "(not " + smt(p->args[0]) + ")";
    case Pred::Kind::Implies: return "(=> " + smt(p->args[0]) + " " + smt(p->args[1]) + ")";
  }
  return "true";
}

}  // namespace

std::string to_smtlib(const VerificationCondition& vc, IntWidth w, bool with_model) {
  PredPtr h = instantiate_width(vc.hypothesis, w), g = instantiate_width(vc.goal, w);
  PredPtr both = pred::conj(h, g);
  std::set<std::string> vars = free_vars(both);
  bool nia = is_nonlinear(both);
  std::ostringstream o;
  o << "; " << vc.id << ": " << vc.description << "\n";
  o << "(set-logic " << (nia ? "QF_NIA" : "QF_LIA") << ")\n";
  for (const auto& v : vars) o << "(declare-const " << smt_symbol(v) << " Int)\n";
  for (const auto& v : vars)
    o << "(assert (and (<= " << num(w.min()) << " " << smt_symbol(v) << ") (<= " << smt_symbol(v) << " "
      << num(w.max()) << ")))\n";
  o << "(assert " << smt(h) << ")\n";
  o << "(assert (not " << smt(g) << "))\n";
  o << "(check-sat)\n";
  if (with_model && !vars.empty()) {
    o << "(get-value (";
    bool first = true;
    for (const auto& v : vars) {
      o << (first ? "" : " ") << smt_symbol(v);
      first = false;
    }
    o << "))\n";
  }
  o << "(exit)\n";
  return o.str();
}

std::string find_smt_solver() {
  if (const char* env = std::getenv("PREGUSS_SMT_SOLVER"); env && *env) return env;
  const char* path = std::getenv("PATH");
  if (!path) return "";
  for (const char* name : {"z3", "cvc5"}) {
    std::stringstream ss(path);
    std::string dir;
    while (std::getline(ss, dir, ':')) {
      std::filesystem::path p = std::filesystem::path(dir) / name;
      if (::access(p.c_str(), X_OK) == 0) return p.string();
    }
  }
  return "";
}

VerificationOutcome run_smt_solver(const VerificationCondition& vc, IntWidth w, const std::string& solver) {
  std::string script = to_smtlib(vc, w, true);
  char tmpl[] = "/tmp/preguss-vc-XXXXXX.smt2";
  int fd = ::mkstemps(tmpl, 5);
  if (fd < 0) throw SmtIoError("cannot create temporary SMT file");
  {
    std::ofstream f(tmpl);
    f << script;
  }
  ::close(fd);
  std::string cmd = "'" + solver + "' '" + tmpl + "' 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) {
    std::filesystem::remove(tmpl);
    throw SmtIoError("cannot start solver '" + solver + "'");
  }
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  int rc = ::pclose(pipe);
  std::filesystem::remove(tmpl);

  std::istringstream lines(out);
  std::string first;
  std::getline(lines, first);
  while (!first.empty() && (first.back() == '\r' || first.back() == ' ')) first.pop_back();
  VerificationOutcome o;
  o.tier = "smt";
  if (first == "unsat") {
    o.status = Verdict::Valid;
  } else if (first == "sat") {
    o.status = Verdict::Invalid;
    // ((|x| (- 5)) (|y| 3))
    std::regex pair(R"(\(\s*\|([^|]*)\|\s+(\(\s*-\s*(\d+)\s*\)|(\d+))\s*\))");
    std::string rest((std::istreambuf_iterator<char>(lines)), {});
    for (std::sregex_iterator it(rest.begin(), rest.end(), pair), end; it != end; ++it) {
      std::string sym = (*it)[1];
      for (char& c : sym)
        if (c == '$') c = '\\';
      std::int64_t v = (*it)[3].matched ? -std::stoll((*it)[3]) : std::stoll((*it)[4]);
      o.witness[sym] = v;
    }
  } else if (first == "unknown" || first == "timeout") {
    o.status = Verdict::Unknown;
    o.reason = "solver returned unknown";
  } else {
    throw SmtIoError("solver '" + solver + "' failed (exit " + std::to_string(rc) + "): " + first);
  }
  return o;
}

}  // namespace preguss
