#include "progen.hpp"

#include <set>
#include <sstream>
#include <vector>

namespace preguss::testing {

namespace {

struct Fn {
  std::string name;
  int params;
  bool is_void;
};

class Gen {
 public:
  Gen(std::mt19937& rng, const GenConfig& cfg) : rng_(rng), cfg_(cfg) {}

  std::string program() {
    std::ostringstream o;
    for (int i = 0; i < cfg_.functions; ++i) {
      Fn f{"f" + std::to_string(i), pick(0, cfg_.max_params), i > 0 && chance(4)};
      fns_.push_back(f);
      o << function(f, i) << "\n";
    }
    return o.str();
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(int n) { return pick(0, n - 1) == 0; }

  std::string function(const Fn& f, int index) {
    vars_.clear();
    counters_.clear();
    locals_ = 0;
    callable_ = index;
    std::ostringstream o;
    o << (f.is_void ? "void " : "int ") << f.name << "(";
    for (int p = 0; p < f.params; ++p) {
      std::string n = "p" + std::to_string(p);
      o << (p ? ", " : "") << "int " << n;
      vars_.push_back(n);
    }
    o << ") {\n";
    is_void_ = f.is_void;
    int n = pick(1, cfg_.max_stmts);
    for (int i = 0; i < n; ++i) o << stmt(1, 1);
    if (!f.is_void) o << "  return " << expr(cfg_.max_expr_depth) << ";\n";
    o << "}\n";
    return o.str();
  }

  std::string ind(int d) { return std::string(2 * d, ' '); }

  std::string literal() {
    switch (pick(0, 9)) {
      case 0: return "INT_MIN";
      case 1: return "INT_MAX";
      case 2: return std::to_string(pick(100, 127));
      default: return std::to_string(pick(-5, 9));
    }
  }

  std::string leaf() {
    if (!vars_.empty() && !chance(3)) return vars_[pick(0, int(vars_.size()) - 1)];
    return literal();
  }

  std::string call_expr(int depth, bool need_value) {
    std::vector<const Fn*> cands;
    for (int j = 0; j < callable_; ++j)
      if (!need_value || !fns_[j].is_void) cands.push_back(&fns_[j]);
    if (cands.empty()) return "";
    const Fn* f = cands[pick(0, int(cands.size()) - 1)];
    std::string s = f->name + "(";
    for (int p = 0; p < f->params; ++p) s += (p ? ", " : "") + expr(depth - 1);
    return s + ")";
  }

  std::string expr(int depth) {
    if (depth <= 0 || chance(3)) return leaf();
    switch (pick(0, 11)) {
      case 0: return "-" + paren(expr(depth - 1));
      case 1: return "!" + paren(expr(depth - 1));
      case 2: {
        std::string c = call_expr(depth, true);
        if (!c.empty()) return c;
        return leaf();
      }
      default: {
        static const char* ops[] = {"+", "-", "*", "/", "%", "<", "<=", ">", ">=", "==", "!=", "&&", "||"};
        static const int weights[] = {4, 4, 3, 3, 2, 1, 1, 1, 1, 1, 1, 1, 1};
        std::discrete_distribution<int> d(std::begin(weights), std::end(weights));
        const char* op = ops[d(rng_)];
        return paren(expr(depth - 1)) + " " + op + " " + paren(expr(depth - 1));
      }
    }
  }

  static std::string paren(const std::string& s) {
    bool simple = true;
    for (char c : s)
      if (c == ' ') simple = false;
    if (!s.empty() && s[0] == '-') simple = false;
    return simple ? s : "(" + s + ")";
  }

  std::vector<std::string> assignable() {
    std::vector<std::string> out;
    for (const auto& v : vars_)
      if (!counters_.count(v)) out.push_back(v);
    return out;
  }

  std::string block(int depth, int stmts) {
    std::size_t saved = vars_.size();
    std::ostringstream o;
    for (int i = 0; i < stmts; ++i) o << stmt(depth, 1);
    vars_.resize(saved);
    return o.str();
  }

  std::string stmt(int depth, int) {
    std::ostringstream o;
    int k = pick(0, 9);
    bool nest = depth <= cfg_.max_depth;
    if (k <= 2) {
      std::string n = "v" + std::to_string(locals_++);
      o << ind(depth) << "int " << n << " = " << expr(cfg_.max_expr_depth) << ";\n";
      vars_.push_back(n);
    } else if (k <= 4) {
      auto as = assignable();
      if (as.empty()) return stmt(depth, 0);
      o << ind(depth) << as[pick(0, int(as.size()) - 1)] << " = " << expr(cfg_.max_expr_depth) << ";\n";
    } else if (k == 5 && nest) {
      o << ind(depth) << "if (" << expr(cfg_.max_expr_depth) << ") {\n" << block(depth + 1, pick(1, 2));
      if (chance(2)) o << ind(depth) << "} else {\n" << block(depth + 1, pick(1, 2));
      o << ind(depth) << "}\n";
    } else if (k == 6 && nest && cfg_.loops) {
      std::string c = "c" + std::to_string(locals_++);
      o << ind(depth) << "int " << c << " = 0;\n";
      vars_.push_back(c);
      counters_.insert(c);
      o << ind(depth) << "while (" << c << " < " << pick(1, 3) << ") {\n" << block(depth + 1, pick(1, 2));
      o << ind(depth + 1) << c << " = " << c << " + 1;\n" << ind(depth) << "}\n";
    } else if (k == 7) {
      std::string c = call_expr(cfg_.max_expr_depth, false);
      if (c.empty()) c = paren(leaf()) + " / " + paren(expr(1));
      o << ind(depth) << c << ";\n";
    } else if (k == 8 && depth > 1) {
      o << ind(depth) << "return" << (is_void_ ? "" : " " + expr(cfg_.max_expr_depth)) << ";\n";
    } else {
      o << ind(depth) << paren(leaf()) << " / " << paren(expr(1)) << ";\n";
    }
    return o.str();
  }

  std::mt19937& rng_;
  GenConfig cfg_;
  std::vector<Fn> fns_;
  std::vector<std::string> vars_;
  std::set<std::string> counters_;
  int locals_ = 0;
  int callable_ = 0;
  bool is_void_ = false;
};

}  // namespace

std::string generate_program(std::mt19937& rng, const GenConfig& cfg) { return Gen(rng, cfg).program(); }

Star generate_star(std::mt19937& rng, int callees) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  Star s;
  s.host = "host";
  int dep = pick(1, callees);
  s.dependent = "c" + std::to_string(dep);
  std::ostringstream o;
  for (int i = 1; i <= callees; ++i) {
    switch (pick(0, 2)) {
      case 0: o << "int c" << i << "(int y) { return y - " << pick(0, 5) << "; }\n"; break;
      case 1: o << "int c" << i << "(int y) { if (y < " << pick(-3, 3) << ") { return 0; } return y; }\n"; break;
      default: o << "int c" << i << "(int y) { return " << pick(-2, 2) << "; }\n"; break;
    }
  }
  o << "int host(int x) {\n";
  for (int i = 1; i <= callees; ++i) o << "  int r" << i << " = c" << i << "(x);\n";
  // unrelated uses of the other results
  for (int i = 1; i <= callees; ++i)
    if (i != dep && pick(0, 2) == 0) o << "  r" << i << " = r" << i << " % 3;\n";
  o << "  int t = 100 / r" << dep << ";\n";
  o << "  return t;\n}\n";
  s.source = o.str();
  return s;
}

}  // namespace preguss::testing
