#include <doctest.h>

#include "dgl/static_semantics.hpp"
#include "dgl/parse.hpp"
#include "gen.hpp"

using namespace dgl;

namespace {
VarSet vs(std::initializer_list<Variable> l) { return VarSet::of(l); }
const Variable x{"x", 0}, xp{"x", 1}, y{"y", 0}, yp{"y", 1}, v{"v", 0};
}  // namespace

TEST_CASE("VarSet algebra") {
  VarSet top = VarSet::top();
  VarSet s = vs({x, y});
  CHECK(top.unite(s).is_top());
  CHECK(top.intersect(s) == s);
  CHECK(s.subtract(top).is_empty());
  CHECK(top.subtract(VarSet::empty()).is_top());
  CHECK_THROWS_AS(top.subtract(vs({x})), DglError);  // cofinite sets stay unmaterialized
  CHECK(s.subtract(vs({x})) == vs({y}));
  CHECK(top.contains(Variable{"anything", 1}));
  CHECK(!s.disjoint(top));
  CHECK(VarSet::empty().disjoint(top));
  CHECK(s.disjoint(vs({v})));
}

TEST_CASE("free variables of games") {
  CHECK(free_vars(parse_game("{x'=v & true}")) == vs({x, v}));
  CHECK(free_vars(parse_game("{x'=v}")) == vs({x, v}));
  CHECK(free_vars(parse_game("?true")).is_empty());
  CHECK(free_vars(parse_game("a")).is_top());
  CHECK(free_vars(parse_game("x:=y")) == vs({y}));
}

TEST_CASE("differentials close free variables under priming") {
  CHECK(free_vars(parse_term("(x*y)'")) == vs({x, xp, y, yp}));
  CHECK(free_vars(parse_term("(x'+y)'")) == vs({xp, y, yp}));
  CHECK(free_vars(parse_term("x'")) == vs({xp}));
}

TEST_CASE("free variables of formulas") {
  CHECK(free_vars(parse_formula("\\exists y x+(x^2+y)^2>=x^2+y")) == vs({x}));
  CHECK(free_vars(parse_formula("P(||)")).is_top());
  CHECK(free_vars(parse_formula("\\exists x P(||)")).is_top());  // superset stays Top
  CHECK(free_vars(parse_formula("<a> x>0")).is_top());
  CHECK(free_vars(parse_formula("<x:=1> x>0")) == vs({x}));  // no must-bound subtraction
  CHECK(free_vars(parse_formula("true")).is_empty());
}

TEST_CASE("bound variables") {
  CHECK(bound_vars(parse_game("{v:=2 ++ v:=x^2+1}^d ; {x'=v}")) == vs({v, x, xp}));
  CHECK(bound_vars(parse_game("?x>0")).is_empty());
  CHECK(bound_vars(parse_game("a")).is_top());
  CHECK(bound_vars(parse_game("x':=1")) == vs({xp}));
  CHECK(bound_vars(parse_game("{x:=1}*")) == vs({x}));
}

TEST_CASE("signatures") {
  SymbolSet s1 = signature(parse_formula("<a;b> P(||)"));
  CHECK(s1.games == std::set<std::string>{"a", "b"});
  CHECK(s1.predicationals == std::set<std::string>{"P"});
  CHECK(s1.functions.empty());
  CHECK(s1.predicates.empty());

  // grammar reading: the left side of the comparison is a term, so p is a
  // unary function head here, not a predicate
  SymbolSet s2 = signature(parse_formula("p(f())+0>=0"));
  CHECK(s2.functions == std::map<std::string, int>{{"p", 1}, {"f", 0}});
  CHECK(s2.predicates.empty());

  SymbolSet s3 = signature(parse_formula("p(f()) & 0>=0"));
  CHECK(s3.predicates == std::map<std::string, int>{{"p", 1}});
  CHECK(s3.functions == std::map<std::string, int>{{"f", 0}});

  CHECK(signature(parse_term("x+y")).empty());
  CHECK(signature(parse_term(".0+.1", ParseOptions{.allow_dots = true})).empty());
}

TEST_CASE("dual laws for FV and BV") {
  gen::Rng rng(555);
  gen::FormulaOpts fo;
  fo.games = {"a"};
  fo.odes = true;
  for (int i = 0; i < 500; ++i) {
    HybridGame g = gen::game(rng, 3, fo);
    CHECK(free_vars(HybridGame::dual(g)) == free_vars(g));
    CHECK(bound_vars(HybridGame::dual(g)) == bound_vars(g));
  }
}

TEST_CASE("coincidence for terms, sampled") {
  gen::Rng rng(808);
  gen::TermOpts to;
  to.primed_vars = true;
  to.fns = {{"f", 0}, {"g", 1}};
  Interpretation interp = gen::interpretation(rng, to.fns, {}, {});
  for (int i = 0; i < 300; ++i) {
    Term t = gen::term(rng, 3, to);
    State omega = gen::state(rng, gen::base_pool());
    VarSet fv = free_vars(t);
    State nu = omega;
    for (const Variable& var : gen::base_pool()) {
      if (!fv.contains(var)) nu.values[var] = Rational(rng.int_in(-9, 9));
      Variable pv = primed(var);
      if (!fv.contains(pv)) nu.values[pv] = Rational(rng.int_in(-9, 9));
    }
    nu.values[Variable{"junk", 0}] = Rational(7);
    auto a = eval_term(interp, omega, t);
    auto b = eval_term(interp, nu, t);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(*a == *b);
  }
}

TEST_CASE("coincidence for formulas, sampled") {
  gen::Rng rng(909);
  gen::FormulaOpts fo;
  fo.preds = {{"p", 1}};
  fo.term.fns = {{"f", 0}};
  Interpretation interp = gen::interpretation(rng, fo.term.fns, fo.preds, {});
  int informative = 0;
  for (int i = 0; i < 400; ++i) {
    Formula f = gen::formula(rng, 3, fo);
    State omega = gen::state(rng, gen::base_pool());
    VarSet fv = free_vars(f);
    if (fv.is_top()) continue;
    State nu = omega;
    for (const Variable& var : gen::base_pool()) {
      if (!fv.contains(var)) nu.values[var] = Rational(rng.int_in(-9, 9));
    }
    nu.values[Variable{"junk", 0}] = Rational(5);
    TruthValue3 a = eval_formula(interp, omega, f);
    TruthValue3 b = eval_formula(interp, nu, f);
    if (a == TruthValue3::Unknown || b == TruthValue3::Unknown) continue;
    CHECK(a == b);
    ++informative;
  }
  CHECK(informative > 100);
}
