#include <gtest/gtest.h>

#include <random>

#include "preguss/specs.hpp"

using namespace preguss;

TEST(ParseClause, RequiresIntMin) {
  Clause c = parse_clause("requires INT_MIN < x;");
  EXPECT_EQ(c.kind, ClauseKind::Requires);
  EXPECT_TRUE(equal(c.body, pred::cmp(CmpOp::Lt, term::int_min(), term::var("x"))));
}

TEST(ParseClause, EnsuresResult) {
  Clause c = parse_clause("ensures \\result == x;");
  EXPECT_EQ(c.kind, ClauseKind::Ensures);
  EXPECT_TRUE(equal(c.body, pred::cmp(CmpOp::Eq, term::result(), term::var("x"))));
}

TEST(ParseClause, OutOfSubsetIsUnknownConstruct) {
  EXPECT_THROW(parse_clause("requires \\valid(p);"), UnknownConstructError);
  EXPECT_THROW(parse_clause("requires \\forall integer i; i < 3;"), UnknownConstructError);
  EXPECT_THROW(parse_clause("assigns x;"), UnknownConstructError);
}

TEST(ParseClause, SyntaxErrors) {
  EXPECT_THROW(parse_clause("requires x <;"), SpecSyntaxError);
  EXPECT_THROW(parse_clause("requires x < 1"), SpecSyntaxError);
  EXPECT_THROW(parse_clause("requires \\result == 1;"), SpecSyntaxError);
  EXPECT_THROW(parse_clause("loop invariant \\old(x) == 1;"), SpecSyntaxError);
}

TEST(ParseClause, OtherKinds) {
  Clause a = parse_clause("loop assigns i, s;");
  EXPECT_EQ(a.kind, ClauseKind::LoopAssigns);
  EXPECT_EQ(a.vars, (std::vector<std::string>{"i", "s"}));
  Clause b = parse_clause("assert overflow: -2147483647 <= x;");
  EXPECT_EQ(b.kind, ClauseKind::Assert);
  EXPECT_EQ(b.label, "overflow");
  Clause l = parse_clause("loop invariant 0 <= i && i <= n;");
  EXPECT_EQ(l.kind, ClauseKind::LoopInvariant);
}

TEST(RenderClause, Canonical) {
  Clause r;
  r.kind = ClauseKind::Requires;
  r.body = pred::cmp(CmpOp::Ne, term::var("x"), term::constant(0));
  EXPECT_EQ(render_clause(r), "requires x != 0;");
  Clause e;
  e.kind = ClauseKind::Ensures;
  e.body = pred::truth();
  EXPECT_EQ(render_clause(e), "ensures \\true;");
  Clause l;
  l.kind = ClauseKind::LoopInvariant;
  l.body = pred::conj(pred::cmp(CmpOp::Le, term::constant(0), term::var("i")),
                      pred::cmp(CmpOp::Le, term::var("i"), term::var("n")));
  EXPECT_EQ(render_clause(l), "loop invariant 0 <= i && i <= n;");
}

TEST(Substitute, CallSiteInstances) {
  PredPtr req = parse_predicate("INT_MIN < x");
  PredPtr inst = substitute(req, Bindings{{"x", term::int_min()}});
  EXPECT_TRUE(equal(inst, parse_predicate("INT_MIN < INT_MIN")));
  EXPECT_TRUE(is_false(inst));
  EXPECT_TRUE(equal(substitute(req, Bindings{}), req));
  PredPtr ens = parse_predicate("\\result == x");
  PredPtr e2 = substitute(ens, Bindings{{"\\result", term::var("r1")}, {"x", term::constant(1)}});
  EXPECT_EQ(render(e2), "r1 == 1");
}

TEST(Substitute, Simultaneous) {
  PredPtr p = parse_predicate("x < y");
  PredPtr q = substitute(p, Bindings{{"x", term::var("y")}, {"y", term::var("x")}});
  EXPECT_EQ(render(q), "y < x");
}

TEST(Evaluate, WidthInstantiation) {
  IntWidth w8 = IntWidth::from_bits(8);
  PredPtr p = parse_predicate("-INT_MAX <= x");
  EXPECT_TRUE(evaluate(p, {{"x", -127}}, w8));
  EXPECT_FALSE(evaluate(p, {{"x", -128}}, w8));
  EXPECT_EQ(render(instantiate_width(p, IntWidth())), "-2147483647 <= x");
}

TEST(Evaluate, TruncatingDivisionTotal) {
  IntWidth w;
  EXPECT_TRUE(evaluate(parse_predicate("-7 / 2 == -3"), {}, w));
  EXPECT_TRUE(evaluate(parse_predicate("-7 % 2 == -1"), {}, w));
  EXPECT_TRUE(evaluate(parse_predicate("x / 0 == 0"), {{"x", 5}}, w));
  EXPECT_TRUE(evaluate(parse_predicate("x % 0 == x"), {{"x", 5}}, w));
}

TEST(Nonlinear, Flagged) {
  EXPECT_TRUE(is_nonlinear(parse_predicate("x * y <= 3")));
  EXPECT_FALSE(is_nonlinear(parse_predicate("2 * y <= 3")));
  EXPECT_TRUE(is_nonlinear(parse_predicate("x / y <= 3")));
}

// ---- properties ----

namespace {

struct RandomPred {
  std::mt19937 rng{11};
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  TermPtr t(int d, bool ensures) {
    if (d == 0 || pick(0, 2) == 0) {
      switch (pick(0, ensures ? 5 : 3)) {
        case 0: return term::constant(pick(-9, 9));
        case 1: return term::var(pick(0, 1) ? "x" : "y");
        case 2: return pick(0, 1) ? term::int_min() : term::int_max();
        case 3: return term::var("n");
        case 4: return term::result();
        default: return term::old("x");
      }
    }
    switch (pick(0, 5)) {
      case 0: return term::add(t(d - 1, ensures), t(d - 1, ensures));
      case 1: return term::sub(t(d - 1, ensures), t(d - 1, ensures));
      case 2: return term::mul(t(d - 1, ensures), t(d - 1, ensures));
      case 3: return term::neg(t(d - 1, ensures));
      case 4: return term::div(t(d - 1, ensures), t(d - 1, ensures));
      default: return term::mod(t(d - 1, ensures), t(d - 1, ensures));
    }
  }

  PredPtr p(int d, bool ensures) {
    if (d == 0 || pick(0, 2) == 0) {
      if (pick(0, 9) == 0) return pick(0, 1) ? pred::truth() : pred::falsity();
      return pred::cmp(static_cast<CmpOp>(pick(0, 5)), t(2, ensures), t(2, ensures));
    }
    switch (pick(0, 3)) {
      case 0: return pred::conj(p(d - 1, ensures), p(d - 1, ensures));
      case 1: return pred::disj(p(d - 1, ensures), p(d - 1, ensures));
      case 2: return pred::negate(p(d - 1, ensures));
      default: return pred::implies(p(d - 1, ensures), p(d - 1, ensures));
    }
  }
};

}  // namespace

TEST(SpecProperties, RenderParseRoundTrip) {
  RandomPred g;
  const ClauseKind kinds[] = {ClauseKind::Requires, ClauseKind::Ensures, ClauseKind::Assert, ClauseKind::LoopInvariant};
  for (int i = 0; i < 2000; ++i) {
    Clause c;
    c.kind = kinds[i % 4];
    c.body = g.p(3, c.kind == ClauseKind::Ensures);
    std::string text = render_clause(c);
    Clause back = parse_clause(text);
    ASSERT_EQ(back.kind, c.kind) << text;
    ASSERT_TRUE(equal(back.body, c.body)) << text << "\n reparsed: " << render_clause(back);
  }
}

TEST(SpecProperties, SubstitutionComposes) {
  // p[a][b] == p[a o b] when dom(b) is disjoint from the variables of ran(a) and from dom(a)
  RandomPred g;
  IntWidth w = IntWidth::from_bits(8);
  for (int i = 0; i < 1000; ++i) {
    PredPtr p = g.p(3, false);
    Bindings a{{"x", term::add(term::var("n"), term::constant(g.pick(-3, 3)))}};
    Bindings b{{"y", term::constant(g.pick(-5, 5))}};
    Bindings ab = a;
    for (auto& [k, v] : ab) v = substitute(v, b);
    ab.insert(b.begin(), b.end());
    PredPtr lhs = substitute(substitute(p, a), b), rhs = substitute(p, ab);
    for (int n = -4; n <= 4; ++n) ASSERT_EQ(evaluate(lhs, {{"n", n}}, w), evaluate(rhs, {{"n", n}}, w));
  }
}

TEST(SpecProperties, ThreeValuedAgreesWithConcrete) {
  // simplified forms agree with a direct evaluation of the unsimplified tree
  IntWidth w = IntWidth::from_bits(8);
  RandomPred g;
  for (int i = 0; i < 500; ++i) {
    PredPtr p = g.p(3, false);
    for (int x = -3; x <= 3; ++x)
      for (int y = -3; y <= 3; ++y) {
        Valuation v{{"x", x}, {"y", y}, {"n", 2}};
        bool direct = evaluate(p, v, w);
        bool tri_ok = true;
        Box box;
        for (auto& [k, val] : v) box[k] = Interval::point(val);
        Tri t = evaluate_tri(p, box, w);
        if (t != Tri::Unknown) tri_ok = (t == Tri::True) == direct;
        ASSERT_TRUE(tri_ok) << render(p);
        ASSERT_EQ(evaluate(pred::negate(p), v, w), !direct);
      }
  }
}
