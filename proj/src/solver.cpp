// VC discharge. Works on F = hypothesis && !goal; Valid iff F has no model in
// the width range.
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "preguss/verifier.hpp"

namespace preguss {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Valid: return "Valid";
    case Verdict::Invalid: return "Invalid";
    case Verdict::Unknown: return "Unknown";
  }
  return "?";
}

namespace {

using i128 = __int128;

struct TooLarge {};

// ---- NNF with if-then-else lifting, then DNF ----

const Term* find_ite(const TermPtr& t) {
  if (!t) return nullptr;
  if (t->kind == Term::Kind::Ite) return t.get();
  if (const Term* x = find_ite(t->a)) return x;
  return find_ite(t->b);
}

TermPtr replace(const TermPtr& t, const Term* target, const TermPtr& with) {
  if (!t) return t;
  if (t.get() == target) return with;
  TermPtr a = replace(t->a, target, with), b = replace(t->b, target, with);
  if (a == t->a && b == t->b) return t;
  switch (t->kind) {
    case Term::Kind::Neg: return term::neg(a);
    case Term::Kind::Add: return term::add(a, b);
    case Term::Kind::Sub: return term::sub(a, b);
    case Term::Kind::Mul: return term::mul(a, b);
    case Term::Kind::Div: return term::div(a, b);
    case Term::Kind::Mod: return term::mod(a, b);
    case Term::Kind::Ite: return term::ite(t->cond, a, b);
    default: return t;
  }
}

PredPtr nnf(const PredPtr& p, bool pos) {
  switch (p->kind) {
    case Pred::Kind::True: return pred::boolean(pos);
    case Pred::Kind::False: return pred::boolean(!pos);
    case Pred::Kind::Not: return nnf(p->args[0], !pos);
    case Pred::Kind::Implies:
      if (pos) return pred::disj(nnf(p->args[0], false), nnf(p->args[1], true));
      return pred::conj(nnf(p->args[0], true), nnf(p->args[1], false));
    case Pred::Kind::And:
    case Pred::Kind::Or: {
      std::vector<PredPtr> xs;
      for (const auto& a : p->args) xs.push_back(nnf(a, pos));
      bool conj = (p->kind == Pred::Kind::And) == pos;
      return conj ? pred::conj(xs) : pred::disj(xs);
    }
    case Pred::Kind::Cmp: {
      const Term* it = find_ite(p->lhs);
      if (!it) it = find_ite(p->rhs);
      if (it) {
        PredPtr c = it->cond;
        auto pick = [&](const TermPtr& v) {
          return pred::cmp(p->op, replace(p->lhs, it, v), replace(p->rhs, it, v));
        };
        PredPtr lifted = pred::disj(pred::conj(c, pick(it->a)), pred::conj(pred::negate(c), pick(it->b)));
        return nnf(lifted, pos);
      }
      return pos ? p : pred::cmp(negate(p->op), p->lhs, p->rhs);
    }
  }
  return p;
}

using Cube = std::vector<PredPtr>;  // conjunction of comparison atoms

std::vector<Cube> dnf(const PredPtr& p, std::size_t cap) {
  switch (p->kind) {
    case Pred::Kind::True: return {Cube{}};
    case Pred::Kind::False: return {};
    case Pred::Kind::Cmp:
      if (p->op == CmpOp::Ne)
        return {Cube{pred::cmp(CmpOp::Lt, p->lhs, p->rhs)}, Cube{pred::cmp(CmpOp::Gt, p->lhs, p->rhs)}};
      return {Cube{p}};
    case Pred::Kind::Or: {
      std::vector<Cube> out;
      for (const auto& a : p->args) {
        auto part = dnf(a, cap);
        out.insert(out.end(), part.begin(), part.end());
        if (out.size() > cap) throw TooLarge{};
      }
      return out;
    }
    case Pred::Kind::And: {
      std::vector<Cube> acc{Cube{}};
      for (const auto& a : p->args) {
        auto part = dnf(a, cap);
        std::vector<Cube> next;
        for (const auto& x : acc)
          for (const auto& y : part) {
            Cube c = x;
            c.insert(c.end(), y.begin(), y.end());
            next.push_back(std::move(c));
            if (next.size() > cap) throw TooLarge{};
          }
        acc = std::move(next);
        if (acc.empty()) break;
      }
      return acc;
    }
    default: throw TooLarge{};  // not in NNF
  }
}

// ---- linear forms: sum c_i x_i + k ----

struct Lin {
  std::map<std::string, i128> c;
  i128 k = 0;
};

Lin lin_add(Lin a, const Lin& b, i128 s) {
  for (const auto& [v, x] : b.c) {
    a.c[v] += s * x;
    if (a.c[v] == 0) a.c.erase(v);
  }
  a.k += s * b.k;
  return a;
}

Lin lin_scale(Lin a, i128 s) {
  if (s == 0) return Lin{};
  for (auto& [v, x] : a.c) x *= s;
  a.k *= s;
  return a;
}

// Nonlinear subterms become opaque symbols ("#..."): sound for refutation only.
Lin linearize(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Const: return Lin{{}, t->value};
    case Term::Kind::Var:
    case Term::Kind::Result:
    case Term::Kind::Old: return Lin{{{leaf_key(*t), 1}}, 0};
    case Term::Kind::Neg: return lin_scale(linearize(t->a), -1);
    case Term::Kind::Add: return lin_add(linearize(t->a), linearize(t->b), 1);
    case Term::Kind::Sub: return lin_add(linearize(t->a), linearize(t->b), -1);
    case Term::Kind::Mul: {
      Lin a = linearize(t->a), b = linearize(t->b);
      if (a.c.empty()) return lin_scale(b, a.k);
      if (b.c.empty()) return lin_scale(a, b.k);
      break;
    }
    default: break;
  }
  return Lin{{{"#" + render(t), 1}}, 0};
}

// Constraints in the form lin <= 0.
std::vector<Lin> constraints_of(const PredPtr& atom) {
  Lin d = lin_add(linearize(atom->lhs), linearize(atom->rhs), -1);  // lhs - rhs
  switch (atom->op) {
    case CmpOp::Le: return {d};
    case CmpOp::Lt: d.k += 1; return {d};
    case CmpOp::Ge: return {lin_scale(d, -1)};
    case CmpOp::Gt: { Lin n = lin_scale(d, -1); n.k += 1; return {n}; }
    case CmpOp::Eq: return {d, lin_scale(d, -1)};
    case CmpOp::Ne: return {};
  }
  return {};
}

i128 abs128(i128 x) { return x < 0 ? -x : x; }
i128 gcd128(i128 a, i128 b) {
  a = abs128(a), b = abs128(b);
  while (b) { i128 t = a % b; a = b; b = t; }
  return a;
}
i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
i128 ceil_div(i128 a, i128 b) { return -floor_div(-a, b); }

bool is_opaque(const std::string& v) { return !v.empty() && v[0] == '#'; }

// Fourier-Motzkin with integer tightening; true when certainly infeasible.
bool fm_infeasible(std::vector<Lin> cs, IntWidth w, std::size_t cap) {
  std::set<std::string> vars;
  for (const auto& c : cs)
    for (const auto& [v, x] : c.c) vars.insert(v);
  for (const auto& v : vars) {
    if (is_opaque(v)) continue;
    cs.push_back(Lin{{{v, 1}}, -i128(w.max())});
    cs.push_back(Lin{{{v, -1}}, i128(w.min())});
  }
  static const i128 kLimit = i128(1) << 100;
  while (true) {
    std::map<std::map<std::string, i128>, i128> norm;
    for (auto& c : cs) {
      if (c.c.empty()) {
        if (c.k > 0) return true;
        continue;
      }
      i128 g = 0;
      for (const auto& [v, x] : c.c) g = gcd128(g, x);
      for (auto& [v, x] : c.c) {
        x /= g;
        if (abs128(x) > kLimit) return false;
      }
      c.k = ceil_div(c.k, g);
      if (abs128(c.k) > kLimit) return false;
      auto [it, fresh] = norm.emplace(c.c, c.k);
      if (!fresh) it->second = std::max(it->second, c.k);
    }
    cs.clear();
    for (auto& [c, k] : norm) cs.push_back(Lin{c, k});
    // opposite pairs: a.x + k1 <= 0 and -a.x + k2 <= 0
    for (const auto& [c, k] : norm) {
      std::map<std::string, i128> neg = c;
      for (auto& [v, x] : neg) x = -x;
      if (auto it = norm.find(neg); it != norm.end() && k + it->second > 0) return true;
    }
    std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
    for (const auto& c : cs)
      for (const auto& [v, x] : c.c) (x > 0 ? counts[v].first : counts[v].second)++;
    if (counts.empty()) return false;
    std::string pick;
    std::size_t best = SIZE_MAX;
    for (const auto& [v, pn] : counts) {
      std::size_t cost = pn.first * pn.second;
      if (cost < best) best = cost, pick = v;
    }
    std::vector<Lin> next, pos, neg;
    for (auto& c : cs) {
      auto it = c.c.find(pick);
      if (it == c.c.end()) next.push_back(std::move(c));
      else (it->second > 0 ? pos : neg).push_back(std::move(c));
    }
    for (const auto& p : pos)
      for (const auto& n : neg) {
        i128 a = p.c.at(pick), b = -n.c.at(pick);
        next.push_back(lin_add(lin_scale(p, b), n, a));
        if (next.size() > cap) return false;
      }
    cs = std::move(next);
  }
}

// ---- witnesses ----

std::optional<bool> eval_safe(const PredPtr& f, const Valuation& v, IntWidth w) {
  try {
    return evaluate(f, v, w);
  } catch (const EvalError&) {
    return std::nullopt;
  }
}

void collect_constants(const PredPtr& p, std::set<std::int64_t>& out) {
  if (p->kind == Pred::Kind::Cmp) {
    std::function<void(const TermPtr&)> term_rec = [&](const TermPtr& t) {
      if (!t) return;
      if (t->kind == Term::Kind::Const) out.insert(t->value);
      term_rec(t->a);
      term_rec(t->b);
      if (t->cond) collect_constants(t->cond, out);
    };
    term_rec(p->lhs);
    term_rec(p->rhs);
  }
  for (const auto& a : p->args) collect_constants(a, out);
}

std::optional<Valuation> candidate_points(const PredPtr& f, const std::vector<std::string>& vars, IntWidth w) {
  std::set<std::int64_t> base{0, 1, -1, w.min(), w.min() + 1, w.max(), w.max() - 1};
  std::set<std::int64_t> consts;
  collect_constants(f, consts);
  for (auto c : consts)
    for (std::int64_t d : {-1, 0, 1})
      if (w.contains(c + d)) base.insert(c + d);
  std::vector<std::int64_t> vals(base.begin(), base.end());
  Valuation v;
  for (const auto& x : vars) v[x] = 0;
  if (vars.empty()) {
    auto r = eval_safe(f, v, w);
    return r && *r ? std::optional<Valuation>(v) : std::nullopt;
  }
  double combos = std::pow(double(vals.size()), double(vars.size()));
  if (combos <= 60000) {
    std::vector<std::size_t> idx(vars.size(), 0);
    while (true) {
      for (std::size_t i = 0; i < vars.size(); ++i) v[vars[i]] = vals[idx[i]];
      if (auto r = eval_safe(f, v, w); r && *r) return v;
      std::size_t i = 0;
      while (i < idx.size() && ++idx[i] == vals.size()) idx[i++] = 0;
      if (i == idx.size()) break;
    }
    return std::nullopt;
  }
  std::mt19937_64 rng(0x5eed);
  std::uniform_int_distribution<std::size_t> pick(0, vals.size() - 1);
  std::uniform_int_distribution<std::int64_t> any(w.min(), w.max());
  for (int n = 0; n < 20000; ++n) {
    for (const auto& x : vars) v[x] = (n % 4 == 3) ? any(rng) : vals[pick(rng)];
    if (auto r = eval_safe(f, v, w); r && *r) return v;
  }
  return std::nullopt;
}

// ---- branch and prune ----

// Interval contraction with the linear atoms of a cube.
bool contract(Box& box, const std::vector<Lin>& cs) {
  for (int round = 0; round < 16; ++round) {
    bool changed = false;
    for (const auto& c : cs) {
      bool usable = !c.c.empty();
      for (const auto& [v, x] : c.c) usable = usable && box.count(v);
      if (!usable) continue;
      for (const auto& [vj, cj] : c.c) {
        i128 smin = c.k;
        for (const auto& [vi, ci] : c.c) {
          if (vi == vj) continue;
          const Interval& iv = box.at(vi);
          smin += ci > 0 ? ci * i128(iv.lo()) : ci * i128(iv.hi());
        }
        Interval& xj = box.at(vj);
        std::int64_t lo = xj.lo(), hi = xj.hi();
        if (cj > 0) {
          i128 ub = floor_div(-smin, cj);
          if (ub < hi) hi = ub < i128(lo) - 1 ? lo - 1 : std::int64_t(ub);
        } else {
          i128 lb = ceil_div(smin, -cj);
          if (lb > lo) lo = lb > i128(hi) + 1 ? hi + 1 : std::int64_t(lb);
        }
        if (lo > hi) return false;
        if (lo != xj.lo() || hi != xj.hi()) {
          xj = Interval(lo, hi);
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  return true;
}

enum class Search { Model, Exhausted, Budget };

Search branch_and_prune(const PredPtr& f, const std::vector<Lin>& lin, Box box, IntWidth w, long& budget,
                        Valuation& model) {
  std::vector<Box> stack{std::move(box)};
  bool undecided = false;
  while (!stack.empty()) {
    if (--budget < 0) return Search::Budget;
    Box b = std::move(stack.back());
    stack.pop_back();
    if (!contract(b, lin)) continue;
    Tri t = evaluate_tri(f, b, w);
    if (t == Tri::False) continue;
    Valuation pt;
    bool point = true;
    std::string widest;
    std::uint64_t wsize = 0;
    for (const auto& [v, iv] : b) {
      pt[v] = std::clamp<std::int64_t>(0, iv.lo(), iv.hi());
      if (!iv.is_point()) point = false;
      if (iv.size() > wsize) wsize = iv.size(), widest = v;
    }
    if (t == Tri::True || point) {
      auto r = eval_safe(f, pt, w);
      if (r && *r) {
        model = pt;
        return Search::Model;
      }
      if (point) {
        if (!r) undecided = true;
        continue;
      }
    }
    const Interval& iv = b.at(widest);
    std::int64_t mid = iv.lo() + static_cast<std::int64_t>((static_cast<i128>(iv.hi()) - iv.lo()) / 2);
    Box lo = b, hi = std::move(b);
    lo[widest] = Interval(iv.lo(), mid);
    hi[widest] = Interval(mid + 1, iv.hi());
    stack.push_back(std::move(hi));
    stack.push_back(std::move(lo));
  }
  return undecided ? Search::Budget : Search::Exhausted;
}

// A conjunction splits into groups of conjuncts with disjoint variables;
// it has a model iff every group has one.
Search solve_conjunction(const std::vector<PredPtr>& conjuncts, IntWidth w, long& budget, Valuation& model) {
  std::vector<std::set<std::string>> vars;
  for (const auto& c : conjuncts) vars.push_back(free_vars(c));
  std::vector<int> group(conjuncts.size(), -1);
  int groups = 0;
  for (std::size_t i = 0; i < conjuncts.size(); ++i) {
    if (group[i] >= 0) continue;
    group[i] = groups;
    std::vector<std::size_t> todo{i};
    std::set<std::string> seen = vars[i];
    while (!todo.empty()) {
      todo.pop_back();
      for (std::size_t j = 0; j < conjuncts.size(); ++j) {
        if (group[j] >= 0) continue;
        bool shared = false;
        for (const auto& v : vars[j]) shared = shared || seen.count(v);
        if (!shared) continue;
        group[j] = groups;
        seen.insert(vars[j].begin(), vars[j].end());
        todo.push_back(j);
      }
    }
    ++groups;
  }
  bool undecided = false;
  for (int g = 0; g < groups; ++g) {
    std::vector<PredPtr> part;
    std::vector<Lin> lin;
    Box box;
    for (std::size_t i = 0; i < conjuncts.size(); ++i) {
      if (group[i] != g) continue;
      part.push_back(conjuncts[i]);
      if (conjuncts[i]->kind == Pred::Kind::Cmp) {
        auto cs = constraints_of(conjuncts[i]);
        lin.insert(lin.end(), cs.begin(), cs.end());
      }
      for (const auto& v : vars[i]) box[v] = Interval::full(w);
    }
    Valuation m;
    Search s = branch_and_prune(pred::conj(part), lin, box, w, budget, m);
    if (s == Search::Exhausted) return s;
    if (s == Search::Budget) undecided = true;
    else model.insert(m.begin(), m.end());
  }
  return undecided ? Search::Budget : Search::Model;
}

VerificationOutcome invalid(Valuation w, const char* tier) {
  VerificationOutcome o;
  o.status = Verdict::Invalid;
  o.witness = std::move(w);
  o.tier = tier;
  return o;
}

VerificationOutcome valid(const char* tier) {
  VerificationOutcome o;
  o.status = Verdict::Valid;
  o.tier = tier;
  return o;
}

}  // namespace

VerificationOutcome discharge(const VerificationCondition& vc, const DischargeConfig& cfg) {
  IntWidth w = cfg.width;
  PredPtr f = pred::conj(instantiate_width(vc.hypothesis, w), pred::negate(instantiate_width(vc.goal, w)));
  std::set<std::string> fv = free_vars(f);
  std::vector<std::string> vars(fv.begin(), fv.end());
  Valuation zero;
  for (const auto& v : vars) zero[v] = 0;

  if (is_false(f)) return valid("simplify");
  if (is_true(f)) return invalid(zero, "simplify");

  if (auto m = candidate_points(f, vars, w)) return invalid(*m, "linear");

  PredPtr n = nnf(f, true);
  std::optional<std::vector<Cube>> cubes;
  try {
    cubes = dnf(n, static_cast<std::size_t>(cfg.dnf_cap));
  } catch (const TooLarge&) {
  }

  if (cubes) {
    bool all_refuted = true;
    for (const auto& cube : *cubes) {
      std::vector<Lin> cs;
      for (const auto& a : cube) {
        auto part = constraints_of(a);
        cs.insert(cs.end(), part.begin(), part.end());
      }
      if (all_refuted && !fm_infeasible(cs, w, static_cast<std::size_t>(cfg.fm_constraint_cap))) all_refuted = false;
    }
    if (all_refuted) return valid("linear");
  }

  std::string reason = "linear reasoning inconclusive";
  if (w.bits() <= 16 || static_cast<int>(vars.size()) <= cfg.bounded_var_limit) {
    long budget = cfg.node_budget;
    Valuation model;
    bool exhausted = true;
    if (cubes) {
      for (const auto& cube : *cubes) {
        Search s = solve_conjunction(cube, w, budget, model);
        if (s == Search::Model) {
          for (const auto& v : vars) model.try_emplace(v, 0);
          if (auto r = eval_safe(f, model, w); r && *r) return invalid(model, "bounded");
          exhausted = false;
        } else if (s == Search::Budget) {
          exhausted = false;
          if (budget < 0) break;
        }
        model.clear();
      }
    } else {
      std::vector<PredPtr> top = n->kind == Pred::Kind::And ? n->args : std::vector<PredPtr>{n};
      Search s = solve_conjunction(top, w, budget, model);
      if (s == Search::Model) {
        for (const auto& v : vars) model.try_emplace(v, 0);
        if (auto r = eval_safe(f, model, w); r && *r) return invalid(model, "bounded");
      }
      exhausted = s == Search::Exhausted;
    }
    if (exhausted) return valid("bounded");
    reason = "bounded search budget exhausted";
  } else {
    reason = "too many variables for bounded search at this width";
  }

  if (!cfg.smt_solver.empty()) {
    VerificationOutcome o = run_smt_solver(vc, w, cfg.smt_solver);
    if (o.status != Verdict::Invalid) return o;
    for (const auto& v : vars) o.witness.try_emplace(v, 0);
    Valuation restricted;
    for (const auto& v : vars) restricted[v] = o.witness[v];
    if (auto r = eval_safe(f, restricted, w); r && *r) return invalid(restricted, "smt");
    reason = "solver model rejected by evaluation";
  }
  VerificationOutcome o;
  o.status = Verdict::Unknown;
  o.reason = reason;
  return o;
}

}  // namespace preguss
