#include <doctest.h>

#include <algorithm>

#include "dgl/semantics.hpp"
#include "gen.hpp"
#include "harness.hpp"

using namespace dgl;

namespace {
State st(std::initializer_list<std::pair<const char*, Rational>> vals) {
  State s;
  for (const auto& [name, r] : vals) {
    std::string n = name;
    int primes = 0;
    while (!n.empty() && n.back() == '\'') {
      ++primes;
      n.pop_back();
    }
    s.values[Variable{n, primes}] = r;
  }
  return s;
}
const Interpretation kEmpty;
}  // namespace

TEST_CASE("differential evaluation by partial derivatives") {
  CHECK(*eval_term(kEmpty, st({{"x", 3}, {"x'", 2}}), parse_term("(x^2)'")) == 12);
  CHECK(*eval_term(kEmpty, st({{"x", 0}}), parse_term("x+(4*2)^2")) == 64);
  Interpretation I;
  I.entries.set_function("f", 1, parse_term(".0+1", ParseOptions{.allow_dots = true}));
  CHECK(*eval_term(I, st({{"y", 5}}), parse_term("f(y)")) == 6);
  // differentials see through interpreted heads
  CHECK(*eval_term(I, st({{"x", 3}, {"x'", 2}}), parse_term("(f(x)*x)'")) ==
        Rational(2 * 3 + (3 + 1) * 2));
  // differential of a differential variable contributes nothing
  CHECK(*eval_term(kEmpty, st({{"x'", 2}}), parse_term("(x')'")) == 0);
}

namespace {
// syntactic degree bound in one variable
unsigned degree_bound(const Term& t) {
  return std::visit(detail::Overload{
                        [](const TermVar&) -> unsigned { return 1; },
                        [](const TermNumber&) -> unsigned { return 0; },
                        [](const TermFuncApp&) -> unsigned { return 0; },
                        [](const TermDot&) -> unsigned { return 0; },
                        [](const TermPlus& x) {
                          return std::max(degree_bound(x.lhs), degree_bound(x.rhs));
                        },
                        [](const TermTimes& x) { return degree_bound(x.lhs) + degree_bound(x.rhs); },
                        [](const TermDifferential&) -> unsigned { return 0; },
                        [](const TermMinus& x) {
                          return std::max(degree_bound(x.lhs), degree_bound(x.rhs));
                        },
                        [](const TermNeg& x) { return degree_bound(x.arg); },
                        [](const TermPower& x) { return degree_bound(x.base) * x.exponent; },
                    },
                    t.node().v);
}
}  // namespace

TEST_CASE("partial derivatives match the exact divided-difference oracle") {
  // Independent oracle: (p(a+h)-p(a))/h is a polynomial in h whose value at
  // h = 0 is the partial derivative at a. Sample it at deg+1 exact points and
  // interpolate at 0 with Lagrange weights; everything stays rational.
  gen::Rng rng(616);
  gen::TermOpts to;  // polynomial fragment only
  for (int round = 0; round < 60; ++round) {
    Term t = gen::term(rng, 3, to);
    Variable x = rng.pick(gen::base_pool());
    unsigned deg = degree_bound(t);
    if (deg == 0 || deg > 40) continue;
    Term d = partial_derivative(t, x);
    for (int k = 0; k < 3; ++k) {
      State s = gen::state(rng, gen::base_pool(), false);
      Rational fx = *eval_term(kEmpty, s, t);
      std::vector<Rational> hs, qs;
      for (unsigned j = 1; j <= deg; ++j) {
        Rational h(static_cast<long>(j));
        Rational fxh = *eval_term(kEmpty, s.with(x, s.get(x) + h), t);
        hs.push_back(h);
        qs.push_back((fxh - fx) / h);
      }
      Rational at0(0);
      for (size_t j = 0; j < hs.size(); ++j) {
        Rational w(1);
        for (size_t m = 0; m < hs.size(); ++m) {
          if (m == j) continue;
          w *= (Rational(0) - hs[m]) / (hs[j] - hs[m]);
        }
        at0 += qs[j] * w;
      }
      CHECK(*eval_term(kEmpty, s, d) == at0);
    }
  }
}

TEST_CASE("partial derivative examples") {
  CHECK(partial_derivative(parse_term("x*y"), Variable{"x", 0}) == parse_term("y"));
  CHECK(partial_derivative(parse_term("5"), Variable{"x", 0}) == Term::number(0));
  // 2*x up to arithmetic equivalence: compare by evaluation
  Term d = partial_derivative(parse_term("x^2"), Variable{"x", 0});
  gen::Rng rng(99);
  for (int i = 0; i < 100; ++i) {
    State s = gen::state(rng, {Variable{"x", 0}}, false);
    CHECK(*eval_term(kEmpty, s, d) == 2 * s.get(Variable{"x", 0}));
  }
  CHECK_THROWS_AS(partial_derivative(parse_term("f(x)"), Variable{"x", 0}), NonPolynomialError);
  CHECK_THROWS_AS(partial_derivative(parse_term("(x)'"), Variable{"x", 0}), NonPolynomialError);
}

TEST_CASE("three-valued formula evaluation") {
  CHECK(eval_formula(kEmpty, st({{"x", 1}}), parse_formula("<?x>0> x>0")) == TruthValue3::True);
  CHECK(eval_formula(kEmpty, st({{"x", 0}}), parse_formula("\\exists y x+(x^2+y)^2>=x^2+y")) ==
        TruthValue3::True);
  CHECK(eval_formula(kEmpty, State{}, parse_formula("\\forall z z>0")) == TruthValue3::False);
  // witness search never refutes an existential
  CHECK(eval_formula(kEmpty, State{}, parse_formula("\\exists z z>100")) == TruthValue3::Unknown);
  CHECK(eval_formula(kEmpty, State{}, parse_formula("\\forall z z*z>=0")) == TruthValue3::Unknown);
}

TEST_CASE("game evaluation: demonic choice, loops, duals, odes") {
  CHECK(eval_formula(kEmpty, State{}, parse_formula("<{x:=1 ++ x:=-1}^d> x>0")) ==
        TruthValue3::False);
  Budget depth4;
  depth4.loop_unroll_depth = 4;
  Budget depth1;
  depth1.loop_unroll_depth = 1;
  Formula reach = parse_formula("<{x:=x+1}*> x>0");
  CHECK(eval_formula(kEmpty, st({{"x", -2}}), reach, depth4) == TruthValue3::True);
  CHECK(eval_formula(kEmpty, st({{"x", -2}}), reach, depth1) == TruthValue3::Unknown);
  CHECK(eval_formula(kEmpty, State{}, parse_formula("<{x'=1}> x>0")) == TruthValue3::Unknown);
  CHECK(eval_game_win(kEmpty, st({{"x", 1}}), parse_game("?x>0 ; x:=x+1"),
                      parse_formula("x>=2")) == TruthValue3::True);
}

TEST_CASE("interpretations must be closed and acyclic") {
  Interpretation bad;
  bad.entries.set_predicate("p", 0, parse_formula("q()"));
  CHECK_THROWS_AS(bad.validate(), MissingInterpretation);
  Interpretation cyc;
  cyc.entries.set_function("f", 0, parse_term("g()"));
  cyc.entries.set_function("g", 0, parse_term("f()+1"));
  CHECK_THROWS_AS(cyc.validate(), MissingInterpretation);
  CHECK_THROWS_AS((void)eval_formula(kEmpty, State{}, parse_formula("p()")),
                  MissingInterpretation);
}

TEST_CASE("adjoint evaluation matches the §-style examples") {
  UniformSubstitution sigma = parse_substitution("{p(.) ~> x+.^2>=.}");
  State baked = st({{"x", 0}, {"y", 1}});
  CHECK(adjoint_eval(kEmpty, sigma, baked, parse_formula("p(4*y)")) == TruthValue3::True);
  // equals the evaluation of the applied formula
  Formula applied = std::get<Formula>(apply(sigma, parse_formula("p(4*y)")));
  CHECK(eval_formula(kEmpty, baked, applied) == TruthValue3::True);

  CHECK(adjoint_eval(kEmpty, UniformSubstitution{}, st({{"x", 2}}), parse_formula("x>0")) ==
        eval_formula(kEmpty, st({{"x", 2}}), parse_formula("x>0")));

  UniformSubstitution sfalse = parse_substitution("{a ~> ?false}");
  CHECK(adjoint_eval(kEmpty, sfalse, State{}, parse_formula("<a> true")) == TruthValue3::False);
}

TEST_CASE("determinacy by duality") {
  gen::Rng rng(717);
  gen::FormulaOpts fo;
  fo.odes = true;
  Budget budget;
  budget.loop_unroll_depth = 4;  // keeps nested unrollings tractable
  for (int i = 0; i < 500; ++i) {
    HybridGame g = gen::game(rng, 3, fo);
    Formula body = gen::formula(rng, 2, fo);
    State s = gen::state(rng, gen::base_pool());
    TruthValue3 dual =
        eval_formula(kEmpty, s, Formula::diamond(HybridGame::dual(g), body), budget);
    TruthValue3 complement =
        not3(eval_formula(kEmpty, s, Formula::diamond(g, Formula::not_(body)), budget));
    CHECK(dual == complement);
  }
}

TEST_CASE("unrolling depth refines monotonically") {
  gen::Rng rng(818);
  gen::FormulaOpts fo;
  for (int i = 0; i < 250; ++i) {
    HybridGame body = gen::game(rng, 2, fo);
    Formula target = gen::formula(rng, 2, fo);
    Formula f = Formula::diamond(HybridGame::repeat(body), target);
    State s = gen::state(rng, gen::base_pool());
    Budget lo, hi;
    lo.loop_unroll_depth = 2;
    hi.loop_unroll_depth = 6;
    TruthValue3 shallow = eval_formula(kEmpty, s, f, lo);
    TruthValue3 deep = eval_formula(kEmpty, s, f, hi);
    if (shallow != TruthValue3::Unknown) CHECK(shallow == deep);
  }
}

TEST_CASE("adjoint locality: the baked state matters only through FV(sigma)") {
  gen::Rng rng(919);
  gen::FormulaOpts fo;
  fo.preds = {{"p", 1}, {"q", 0}};
  fo.term.fns = {{"f", 0}};
  int informative = 0;
  for (int i = 0; i < 400; ++i) {
    UniformSubstitution sigma;
    gen::TermOpts repl;
    repl.vars = {Variable{"y", 0}};  // FV(sigma) subseteq {y}
    gen::TermOpts dotted = repl;
    dotted.dots = 1;
    sigma.set_function("f", 0, gen::term(rng, 2, repl));
    sigma.set_predicate("p", 1, Formula::geq(gen::term(rng, 2, dotted), Term::dot(0)));
    sigma.set_predicate("q", 0, Formula::gt(gen::term(rng, 1, repl), Term::number(0)));

    Formula f = gen::formula(rng, 3, fo);
    State current = gen::state(rng, gen::base_pool());
    State baked1 = gen::state(rng, gen::base_pool());
    State baked2 = baked1;
    for (const Variable& v : gen::base_pool())
      if (v.name != "y") baked2.values[v] = Rational(rng.int_in(-9, 9));

    TruthValue3 a = adjoint_eval_at(kEmpty, sigma, baked1, current, f);
    TruthValue3 b = adjoint_eval_at(kEmpty, sigma, baked2, current, f);
    if (a == TruthValue3::Unknown || b == TruthValue3::Unknown) continue;
    CHECK(a == b);
    ++informative;
  }
  CHECK(informative > 100);
}

TEST_CASE("uniform substitution lemma, sampled (unit volume)") {
  uslemma::Stats stats = uslemma::run(20250810, 1500);
  CHECK(stats.disagreements == 0);
  CHECK(stats.determinate * 100 >= stats.total * 70);
}

TEST_CASE("uniform substitution lemma for terms, sampled") {
  gen::Rng rng(1111);
  const std::vector<std::pair<std::string, int>> fns = {{"f", 0}, {"g", 1}};
  Interpretation interp = gen::interpretation(rng, fns, {}, {});
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    UniformSubstitution sigma;
    gen::TermOpts repl;
    repl.vars = rng.chance(50) ? std::vector<Variable>{Variable{"y", 0}} : std::vector<Variable>{};
    gen::TermOpts dotted = repl;
    dotted.dots = 1;
    if (rng.chance(80)) sigma.set_function("f", 0, gen::term(rng, 2, repl));
    if (rng.chance(80)) sigma.set_function("g", 1, gen::term(rng, 2, dotted));

    gen::TermOpts to;
    to.fns = fns;
    Term theta = gen::term(rng, 3, to);
    State omega = gen::state(rng, gen::base_pool());

    auto applied = apply(sigma, theta);
    if (std::holds_alternative<ClashError>(applied)) continue;
    auto lhs = eval_term(interp, omega, std::get<Term>(applied));
    auto rhs = adjoint_eval_term(interp, sigma, omega, theta);
    REQUIRE(lhs.has_value());
    REQUIRE(rhs.has_value());
    CHECK(*lhs == *rhs);
    ++checked;
  }
  CHECK(checked > 700);
}

TEST_CASE("state and interpretation files") {
  State s = parse_state("x = 3\nx' = -1/2  # comment\nv = 2.5\n");
  CHECK(s.get(Variable{"x", 0}) == 3);
  CHECK(s.get(Variable{"x", 1}) == Rational(-1, 2));
  CHECK(s.get(Variable{"v", 0}) == Rational(5, 2));
  CHECK(s.get(Variable{"unset", 0}) == 0);
  Interpretation i = parse_interpretation("{f(.) ~> .0*2 ;; p(.) ~> .>=0}");
  CHECK(*eval_term(i, State{}, parse_term("f(3)")) == 6);
  CHECK_THROWS_AS(parse_interpretation("{p() ~> q()>0}"), MissingInterpretation);
}
