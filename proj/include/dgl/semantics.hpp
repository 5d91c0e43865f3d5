#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dgl/print.hpp"
#include "dgl/usubst.hpp"

// Desk-scale denotational evaluator over exact rationals: the test oracle for
// the lemma-level properties. Three-valued: Unknown stands for budget
// exhaustion (loop unrolling, quantifier witness search) and for constructs
// the oracle does not decide (ODE games). The evaluator never answers a
// determinate True/False that the real semantics contradicts.

namespace dgl {

struct MissingInterpretation : DglError {
  explicit MissingInterpretation(const std::string& what)
      : DglError("no interpretation for " + what) {}
};
struct EvalError : DglError {
  explicit EvalError(const std::string& msg) : DglError(msg) {}
};
struct NonPolynomialError : DglError {
  explicit NonPolynomialError(const std::string& msg) : DglError(msg) {}
};

enum class TruthValue3 { True, False, Unknown };

inline TruthValue3 from_bool(bool b) { return b ? TruthValue3::True : TruthValue3::False; }
inline TruthValue3 not3(TruthValue3 v) {
  switch (v) {
    case TruthValue3::True: return TruthValue3::False;
    case TruthValue3::False: return TruthValue3::True;
    default: return TruthValue3::Unknown;
  }
}
inline TruthValue3 and3(TruthValue3 a, TruthValue3 b) {
  if (a == TruthValue3::False || b == TruthValue3::False) return TruthValue3::False;
  if (a == TruthValue3::True && b == TruthValue3::True) return TruthValue3::True;
  return TruthValue3::Unknown;
}
inline TruthValue3 or3(TruthValue3 a, TruthValue3 b) {
  if (a == TruthValue3::True || b == TruthValue3::True) return TruthValue3::True;
  if (a == TruthValue3::False && b == TruthValue3::False) return TruthValue3::False;
  return TruthValue3::Unknown;
}
inline std::string to_string(TruthValue3 v) {
  switch (v) {
    case TruthValue3::True: return "True";
    case TruthValue3::False: return "False";
    default: return "Unknown";
  }
}

// Finite-support state; unmapped variables are 0.
struct State {
  std::map<Variable, Rational> values;

  Rational get(const Variable& v) const {
    auto it = values.find(v);
    return it == values.end() ? Rational(0) : it->second;
  }
  State with(const Variable& v, Rational r) const {
    State s = *this;
    s.values[v] = std::move(r);
    return s;
  }
};

struct Budget {
  int loop_unroll_depth = 8;
  std::vector<Rational> quantifier_witnesses = {Rational(0),     Rational(1),  Rational(-1),
                                                Rational(2),     Rational(-2), Rational(1, 2),
                                                Rational(-1, 2)};
};

// Symbols are closed syntactically: every head maps to a concrete replacement
// (dots stand for the arguments), and replacements may only mention heads the
// interpretation also closes. validate() rejects dangling heads and cycles.
struct Interpretation {
  UniformSubstitution entries;

  void validate() const {
    std::set<std::string> done, active;
    for (const auto& [key, repl] : entries.functions())
      validate_head("f:" + key.first + "/" + std::to_string(key.second),
                    detail::sig_with_dots(repl).syms, done, active);
    for (const auto& [key, repl] : entries.predicates())
      validate_head("p:" + key.first + "/" + std::to_string(key.second),
                    detail::sig_with_dots(repl).syms, done, active);
    for (const auto& [head, repl] : entries.predicationals())
      validate_head("P:" + head, detail::sig_with_dots(repl).syms, done, active);
    for (const auto& [head, repl] : entries.games())
      validate_head("a:" + head, detail::sig_with_dots(repl).syms, done, active);
  }

 private:
  void validate_head(const std::string& id, const SymbolSet& uses, std::set<std::string>& done,
                     std::set<std::string>& active) const {
    if (done.count(id)) return;
    if (!active.insert(id).second)
      throw MissingInterpretation(id + " (cyclic interpretation)");
    for (const auto& [h, k] : uses.functions) {
      const Term* r = entries.function(h, k);
      if (!r) throw MissingInterpretation("function " + h + "/" + std::to_string(k));
      validate_head("f:" + h + "/" + std::to_string(k), detail::sig_with_dots(*r).syms, done, active);
    }
    for (const auto& [h, k] : uses.predicates) {
      const Formula* r = entries.predicate(h, k);
      if (!r) throw MissingInterpretation("predicate " + h + "/" + std::to_string(k));
      validate_head("p:" + h + "/" + std::to_string(k), detail::sig_with_dots(*r).syms, done, active);
    }
    for (const auto& h : uses.predicationals) {
      const Formula* r = entries.predicational(h);
      if (!r) throw MissingInterpretation("predicational " + h);
      validate_head("P:" + h, detail::sig_with_dots(*r).syms, done, active);
    }
    for (const auto& h : uses.games) {
      const HybridGame* r = entries.game(h);
      if (!r) throw MissingInterpretation("game symbol " + h);
      validate_head("a:" + h, detail::sig_with_dots(*r).syms, done, active);
    }
    active.erase(id);
    done.insert(id);
  }
};

// ---------------------------------------------------------------------------
// Symbolic differentiation of polynomial terms (Var/Number/Plus/Times and the
// Minus/Neg/Power sugar); everything else is rejected.

namespace detail {
inline bool is_polynomial(const Term& t) {
  return std::visit(Overload{
                        [](const TermVar&) { return true; },
                        [](const TermNumber&) { return true; },
                        [](const TermFuncApp&) { return false; },
                        [](const TermDot&) { return false; },
                        [](const TermPlus& x) { return is_polynomial(x.lhs) && is_polynomial(x.rhs); },
                        [](const TermTimes& x) { return is_polynomial(x.lhs) && is_polynomial(x.rhs); },
                        [](const TermDifferential&) { return false; },
                        [](const TermMinus& x) { return is_polynomial(x.lhs) && is_polynomial(x.rhs); },
                        [](const TermNeg& x) { return is_polynomial(x.arg); },
                        [](const TermPower& x) { return is_polynomial(x.base); },
                    },
                    t.node().v);
}

inline bool is_zero(const Term& t) {
  const TermNumber* n = t.get_if<TermNumber>();
  return n && n->value == 0;
}
inline bool is_one(const Term& t) {
  const TermNumber* n = t.get_if<TermNumber>();
  return n && n->value == 1;
}
inline Term sadd(Term a, Term b) {
  if (is_zero(a)) return b;
  if (is_zero(b)) return a;
  return Term::plus(std::move(a), std::move(b));
}
inline Term smul(Term a, Term b) {
  if (is_zero(a) || is_zero(b)) return Term::number(0);
  if (is_one(a)) return b;
  if (is_one(b)) return a;
  return Term::times(std::move(a), std::move(b));
}
}  // namespace detail

inline Term partial_derivative(const Term& t, const Variable& x) {
  using detail::sadd;
  using detail::smul;
  return std::visit(
      detail::Overload{
          [&](const TermVar& n) { return Term::number(n.var == x ? 1 : 0); },
          [&](const TermNumber&) { return Term::number(0); },
          [&](const TermFuncApp&) -> Term {
            throw NonPolynomialError("cannot differentiate function application " + print(t));
          },
          [&](const TermDot&) -> Term {
            throw NonPolynomialError("cannot differentiate reserved dot argument");
          },
          [&](const TermPlus& n) {
            return sadd(partial_derivative(n.lhs, x), partial_derivative(n.rhs, x));
          },
          [&](const TermTimes& n) {
            return sadd(smul(partial_derivative(n.lhs, x), n.rhs),
                        smul(n.lhs, partial_derivative(n.rhs, x)));
          },
          [&](const TermDifferential&) -> Term {
            throw NonPolynomialError("cannot differentiate nested differential " + print(t));
          },
          [&](const TermMinus& n) {
            return Term::minus(partial_derivative(n.lhs, x), partial_derivative(n.rhs, x));
          },
          [&](const TermNeg& n) { return Term::neg(partial_derivative(n.arg, x)); },
          [&](const TermPower& n) {
            if (n.exponent == 0) return Term::number(0);
            Term d = partial_derivative(n.base, x);
            Term coeff = Term::number(static_cast<long>(n.exponent));
            if (n.exponent == 1) return smul(coeff, d);
            Term lower = n.exponent == 2 ? n.base : Term::power(n.base, n.exponent - 1);
            return smul(smul(coeff, lower), d);
          },
      },
      t.node().v);
}

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

struct EvalEnv {
  const Interpretation& interp;
  const UniformSubstitution* sigma = nullptr;  // adjoint mode when non-null
  const State* baked = nullptr;                // replacement state in adjoint mode
  const Budget& budget;

  EvalEnv plain() const { return EvalEnv{interp, nullptr, nullptr, budget}; }
  bool adjoint() const { return sigma != nullptr; }
};

using DotFrame = const std::vector<Rational>*;
using Cont = std::function<TruthValue3(const State&)>;

std::optional<Rational> ev_term(const EvalEnv& env, const State& st, DotFrame dots, const Term& t);
TruthValue3 ev_formula(const EvalEnv& env, const State& st, DotFrame dots, const Formula& f);
TruthValue3 ev_game(const EvalEnv& env, const State& st, DotFrame dots, const HybridGame& g,
                    const Cont& cont);

// Inlines every interpreted function head (and bound dots) syntactically, so
// a differential can see the variable structure of the arguments.
inline Term inline_term(const Term& t, const Interpretation& I, const std::vector<Term>* dot_terms) {
  return std::visit(
      Overload{
          [&](const TermVar&) { return t; },
          [&](const TermNumber&) { return t; },
          [&](const TermFuncApp& x) {
            std::vector<Term> args;
            args.reserve(x.args.size());
            for (const Term& a : x.args) args.push_back(inline_term(a, I, dot_terms));
            const Term* body = I.entries.function(x.head, static_cast<int>(x.args.size()));
            if (!body)
              throw MissingInterpretation("function " + x.head + "/" +
                                          std::to_string(x.args.size()));
            return inline_term(*body, I, &args);
          },
          [&](const TermDot& x) {
            if (!dot_terms || x.index < 0 || static_cast<size_t>(x.index) >= dot_terms->size())
              throw EvalError("unbound dot argument ." + std::to_string(x.index));
            return (*dot_terms)[static_cast<size_t>(x.index)];
          },
          [&](const TermPlus& x) {
            return Term::plus(inline_term(x.lhs, I, dot_terms), inline_term(x.rhs, I, dot_terms));
          },
          [&](const TermTimes& x) {
            return Term::times(inline_term(x.lhs, I, dot_terms), inline_term(x.rhs, I, dot_terms));
          },
          [&](const TermDifferential& x) {
            return Term::differential(inline_term(x.arg, I, dot_terms));
          },
          [&](const TermMinus& x) {
            return Term::minus(inline_term(x.lhs, I, dot_terms), inline_term(x.rhs, I, dot_terms));
          },
          [&](const TermNeg& x) { return Term::neg(inline_term(x.arg, I, dot_terms)); },
          [&](const TermPower& x) {
            return Term::power(inline_term(x.base, I, dot_terms), x.exponent);
          },
      },
      t.node().v);
}

// Rewrites (u)' into sum over base free variables x of u: x' * du/dx.
// Fails (nullopt) when some differential is applied to a non-polynomial.
inline std::optional<Term> expand_differentials(const Term& t) {
  using R = std::optional<Term>;
  auto bin = [&](const Term& l, const Term& r, auto make) -> R {
    R a = expand_differentials(l);
    if (!a) return std::nullopt;
    R b = expand_differentials(r);
    if (!b) return std::nullopt;
    return make(*a, *b);
  };
  return std::visit(
      Overload{
          [&](const TermVar&) -> R { return t; },
          [&](const TermNumber&) -> R { return t; },
          [&](const TermFuncApp&) -> R { return std::nullopt; },
          [&](const TermDot&) -> R { return std::nullopt; },
          [&](const TermPlus& x) -> R { return bin(x.lhs, x.rhs, Term::plus); },
          [&](const TermTimes& x) -> R { return bin(x.lhs, x.rhs, Term::times); },
          [&](const TermMinus& x) -> R { return bin(x.lhs, x.rhs, Term::minus); },
          [&](const TermNeg& x) -> R {
            R a = expand_differentials(x.arg);
            if (!a) return std::nullopt;
            return Term::neg(*a);
          },
          [&](const TermPower& x) -> R {
            R a = expand_differentials(x.base);
            if (!a) return std::nullopt;
            return Term::power(*a, x.exponent);
          },
          [&](const TermDifferential& x) -> R {
            R a = expand_differentials(x.arg);
            if (!a || !is_polynomial(*a)) return std::nullopt;
            Term sum = Term::number(0);
            VarSet fv = free_vars(*a);
            for (const Variable& v : fv.finite()) {
              if (v.primes != 0) continue;
              sum = sadd(std::move(sum), smul(Term::var(primed(v)), partial_derivative(*a, v)));
            }
            return sum;
          },
      },
      t.node().v);
}

inline std::optional<Rational> ev_term(const EvalEnv& env, const State& st, DotFrame dots,
                                       const Term& t) {
  using R = std::optional<Rational>;
  auto bin = [&](const Term& l, const Term& r, auto op) -> R {
    R a = ev_term(env, st, dots, l);
    if (!a) return std::nullopt;
    R b = ev_term(env, st, dots, r);
    if (!b) return std::nullopt;
    return op(*a, *b);
  };
  return std::visit(
      Overload{
          [&](const TermVar& x) -> R { return st.get(x.var); },
          [&](const TermNumber& x) -> R { return x.value; },
          [&](const TermFuncApp& x) -> R {
            int arity = static_cast<int>(x.args.size());
            std::vector<Rational> ds;
            ds.reserve(x.args.size());
            for (const Term& a : x.args) {
              R v = ev_term(env, st, dots, a);
              if (!v) return std::nullopt;
              ds.push_back(*v);
            }
            if (env.adjoint()) {
              if (const Term* repl = env.sigma->function(x.head, arity))
                return ev_term(env.plain(), *env.baked, &ds, *repl);
            }
            if (const Term* repl = env.interp.entries.function(x.head, arity))
              return ev_term(env.plain(), st, &ds, *repl);
            throw MissingInterpretation("function " + x.head + "/" + std::to_string(arity));
          },
          [&](const TermDot& x) -> R {
            if (!dots || x.index < 0 || static_cast<size_t>(x.index) >= dots->size())
              throw EvalError("unbound dot argument ." + std::to_string(x.index));
            return (*dots)[static_cast<size_t>(x.index)];
          },
          [&](const TermPlus& x) -> R {
            return bin(x.lhs, x.rhs, [](const Rational& a, const Rational& b) { return a + b; });
          },
          [&](const TermTimes& x) -> R {
            return bin(x.lhs, x.rhs, [](const Rational& a, const Rational& b) { return a * b; });
          },
          [&](const TermMinus& x) -> R {
            return bin(x.lhs, x.rhs, [](const Rational& a, const Rational& b) { return a - b; });
          },
          [&](const TermNeg& x) -> R {
            R a = ev_term(env, st, dots, x.arg);
            if (!a) return std::nullopt;
            return Rational(-*a);
          },
          [&](const TermPower& x) -> R {
            R a = ev_term(env, st, dots, x.base);
            if (!a) return std::nullopt;
            return pow_nat(*a, x.exponent);
          },
          [&](const TermDifferential& x) -> R {
            if (env.adjoint()) {
              SymbolSet sig = signature(x.arg);
              for (const auto& [h, k] : sig.functions)
                if (env.sigma->function(h, k)) return std::nullopt;
            }
            std::vector<Term> dot_terms;
            if (dots)
              for (const Rational& d : *dots) dot_terms.push_back(Term::number(d));
            Term inlined = inline_term(x.arg, env.interp, dots ? &dot_terms : nullptr);
            std::optional<Term> expanded = expand_differentials(Term::differential(inlined));
            if (!expanded) return std::nullopt;
            return ev_term(env.plain(), st, nullptr, *expanded);
          },
      },
      t.node().v);
}

inline TruthValue3 ev_formula(const EvalEnv& env, const State& st, DotFrame dots, const Formula& f) {
  auto cmp = [&](const Term& l, const Term& r, auto op) {
    std::optional<Rational> a = ev_term(env, st, dots, l);
    if (!a) return TruthValue3::Unknown;
    std::optional<Rational> b = ev_term(env, st, dots, r);
    if (!b) return TruthValue3::Unknown;
    return from_bool(op(*a, *b));
  };
  auto ge = [](const Rational& a, const Rational& b) { return a >= b; };
  return std::visit(
      Overload{
          [&](const FormulaGeq& x) { return cmp(x.lhs, x.rhs, ge); },
          [&](const FormulaLeq& x) { return cmp(x.rhs, x.lhs, ge); },
          [&](const FormulaGt& x) {
            return cmp(x.lhs, x.rhs, [](const Rational& a, const Rational& b) { return a > b; });
          },
          [&](const FormulaLt& x) {
            return cmp(x.lhs, x.rhs, [](const Rational& a, const Rational& b) { return a < b; });
          },
          [&](const FormulaEq& x) {
            return cmp(x.lhs, x.rhs, [](const Rational& a, const Rational& b) { return a == b; });
          },
          [&](const FormulaNeq& x) {
            return cmp(x.lhs, x.rhs, [](const Rational& a, const Rational& b) { return a != b; });
          },
          [&](const FormulaPredApp& x) {
            int arity = static_cast<int>(x.args.size());
            std::vector<Rational> ds;
            ds.reserve(x.args.size());
            for (const Term& a : x.args) {
              std::optional<Rational> v = ev_term(env, st, dots, a);
              if (!v) return TruthValue3::Unknown;
              ds.push_back(*v);
            }
            if (env.adjoint()) {
              if (const Formula* repl = env.sigma->predicate(x.head, arity))
                return ev_formula(env.plain(), *env.baked, &ds, *repl);
            }
            if (const Formula* repl = env.interp.entries.predicate(x.head, arity))
              return ev_formula(env.plain(), st, &ds, *repl);
            throw MissingInterpretation("predicate " + x.head + "/" + std::to_string(arity));
          },
          [&](const FormulaPredicational& x) {
            // the <c>true encoding: a predicational reads the current state
            if (env.adjoint()) {
              if (const Formula* repl = env.sigma->predicational(x.head))
                return ev_formula(env.plain(), st, nullptr, *repl);
            }
            if (const Formula* repl = env.interp.entries.predicational(x.head))
              return ev_formula(env.plain(), st, nullptr, *repl);
            throw MissingInterpretation("predicational " + x.head);
          },
          [&](const FormulaNot& x) { return not3(ev_formula(env, st, dots, x.arg)); },
          [&](const FormulaAnd& x) {
            return and3(ev_formula(env, st, dots, x.lhs), ev_formula(env, st, dots, x.rhs));
          },
          [&](const FormulaOr& x) {
            return or3(ev_formula(env, st, dots, x.lhs), ev_formula(env, st, dots, x.rhs));
          },
          [&](const FormulaImply& x) {
            return or3(not3(ev_formula(env, st, dots, x.lhs)), ev_formula(env, st, dots, x.rhs));
          },
          [&](const FormulaEquiv& x) {
            TruthValue3 a = ev_formula(env, st, dots, x.lhs);
            TruthValue3 b = ev_formula(env, st, dots, x.rhs);
            if (a == TruthValue3::Unknown || b == TruthValue3::Unknown)
              return TruthValue3::Unknown;
            return from_bool(a == b);
          },
          [&](const FormulaExists& x) {
            // finite witness search: never answers False
            for (const Rational& w : env.budget.quantifier_witnesses)
              if (ev_formula(env, st.with(x.var, w), dots, x.body) == TruthValue3::True)
                return TruthValue3::True;
            for (const auto& [v, w] : st.values)
              if (ev_formula(env, st.with(x.var, w), dots, x.body) == TruthValue3::True)
                return TruthValue3::True;
            return TruthValue3::Unknown;
          },
          [&](const FormulaForall& x) {
            // dual search: never answers True
            for (const Rational& w : env.budget.quantifier_witnesses)
              if (ev_formula(env, st.with(x.var, w), dots, x.body) == TruthValue3::False)
                return TruthValue3::False;
            for (const auto& [v, w] : st.values)
              if (ev_formula(env, st.with(x.var, w), dots, x.body) == TruthValue3::False)
                return TruthValue3::False;
            return TruthValue3::Unknown;
          },
          [&](const FormulaDiamond& x) {
            Cont cont = [env, dots, body = x.body](const State& s) {
              return ev_formula(env, s, dots, body);
            };
            return ev_game(env, st, dots, x.game, cont);
          },
          [&](const FormulaBox& x) {
            Cont cont = [env, dots, body = x.body](const State& s) {
              return not3(ev_formula(env, s, dots, body));
            };
            return not3(ev_game(env, st, dots, x.game, cont));
          },
          [&](const FormulaTrue&) { return TruthValue3::True; },
          [&](const FormulaFalse&) { return TruthValue3::False; },
      },
      f.node().v);
}

inline TruthValue3 ev_game(const EvalEnv& env, const State& st, DotFrame dots, const HybridGame& g,
                           const Cont& cont) {
  return std::visit(
      Overload{
          [&](const GameSym& x) {
            // the game runs closed under the plain interpretation; only the
            // continuation keeps its (possibly adjoint) evaluation context
            if (env.adjoint()) {
              if (const HybridGame* repl = env.sigma->game(x.head))
                return ev_game(env.plain(), st, nullptr, *repl, cont);
            }
            if (const HybridGame* repl = env.interp.entries.game(x.head))
              return ev_game(env.plain(), st, nullptr, *repl, cont);
            throw MissingInterpretation("game symbol " + x.head);
          },
          [&](const GameAssign& x) {
            std::optional<Rational> v = ev_term(env, st, dots, x.value);
            if (!v) return TruthValue3::Unknown;
            return cont(st.with(x.var, *v));
          },
          [&](const GameOde&) { return TruthValue3::Unknown; },
          [&](const GameTest& x) {
            TruthValue3 c = ev_formula(env, st, dots, x.condition);
            if (c == TruthValue3::False) return TruthValue3::False;
            return and3(c, cont(st));
          },
          [&](const GameChoice& x) {
            TruthValue3 l = ev_game(env, st, dots, x.lhs, cont);
            if (l == TruthValue3::True) return TruthValue3::True;
            return or3(l, ev_game(env, st, dots, x.rhs, cont));
          },
          [&](const GameSeq& x) {
            Cont mid = [env, dots, rhs = x.rhs, &cont](const State& s) {
              return ev_game(env, s, dots, rhs, cont);
            };
            return ev_game(env, st, dots, x.lhs, mid);
          },
          [&](const GameRepeat& x) {
            // pre-fixpoint unrolling X_k = phi | <body> X_{k-1}; True as soon
            // as some approximant is, Unknown after the budget (never False)
            std::function<TruthValue3(int, const State&)> approx =
                [&](int k, const State& s) -> TruthValue3 {
              TruthValue3 here = cont(s);
              if (k == 0 || here == TruthValue3::True) return here;
              Cont deeper = [&approx, k](const State& s2) { return approx(k - 1, s2); };
              return or3(here, ev_game(env, s, dots, x.body, deeper));
            };
            for (int k = 0; k <= env.budget.loop_unroll_depth; ++k)
              if (approx(k, st) == TruthValue3::True) return TruthValue3::True;
            return TruthValue3::Unknown;
          },
          [&](const GameDual& x) {
            Cont inv = [&cont](const State& s) { return not3(cont(s)); };
            return not3(ev_game(env, st, dots, x.body, inv));
          },
      },
      g.node().v);
}

}  // namespace detail

inline std::optional<Rational> eval_term(const Interpretation& interp, const State& state,
                                         const Term& t) {
  Budget budget;
  detail::EvalEnv env{interp, nullptr, nullptr, budget};
  return detail::ev_term(env, state, nullptr, t);
}

inline TruthValue3 eval_formula(const Interpretation& interp, const State& state, const Formula& f,
                                const Budget& budget = Budget{}) {
  detail::EvalEnv env{interp, nullptr, nullptr, budget};
  return detail::ev_formula(env, state, nullptr, f);
}

inline TruthValue3 eval_game_win(const Interpretation& interp, const State& state,
                                 const HybridGame& g, const Formula& continuation,
                                 const Budget& budget = Budget{}) {
  detail::EvalEnv env{interp, nullptr, nullptr, budget};
  detail::Cont cont = [&env, &continuation](const State& s) {
    return detail::ev_formula(env, s, nullptr, continuation);
  };
  return detail::ev_game(env, state, nullptr, g, cont);
}

// Adjoint evaluation: heads in dom(sigma) evaluate through their replacements
// with dots bound to argument values from the current state, the replacement
// itself evaluated at the baked state; game and predicational replacements
// run at the current state. Heads outside dom(sigma) defer to the
// interpretation.
inline TruthValue3 adjoint_eval(const Interpretation& interp, const UniformSubstitution& sigma,
                                const State& baked, const Formula& f,
                                const Budget& budget = Budget{}) {
  detail::EvalEnv env{interp, &sigma, &baked, budget};
  return detail::ev_formula(env, baked, nullptr, f);
}

// Same, but starting evaluation in a current state different from the baked
// one (the adjoint interpretation object only depends on the baked state
// through the free variables of sigma's function and predicate replacements).
inline TruthValue3 adjoint_eval_at(const Interpretation& interp, const UniformSubstitution& sigma,
                                   const State& baked, const State& current, const Formula& f,
                                   const Budget& budget = Budget{}) {
  detail::EvalEnv env{interp, &sigma, &baked, budget};
  return detail::ev_formula(env, current, nullptr, f);
}

inline std::optional<Rational> adjoint_eval_term(const Interpretation& interp,
                                                 const UniformSubstitution& sigma,
                                                 const State& baked, const Term& t) {
  Budget budget;
  detail::EvalEnv env{interp, &sigma, &baked, budget};
  return detail::ev_term(env, baked, nullptr, t);
}

// ---------------------------------------------------------------------------
// File formats: states are "var = rational" lines, interpretations reuse the
// substitution syntax.

inline State parse_state(std::string_view text) {
  State st;
  size_t i = 0;
  int line_no = 1;
  while (i <= text.size()) {
    size_t end = text.find('\n', i);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(i, end - i);
    if (size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    size_t a = line.find_first_not_of(" \t\r");
    if (a != std::string_view::npos) {
      size_t b = line.find_last_not_of(" \t\r");
      std::string_view body = line.substr(a, b - a + 1);
      size_t eq = body.find('=');
      if (eq == std::string_view::npos)
        throw ParseError("state line must be 'var = rational'", line_no, 1);
      std::string_view lhs = body.substr(0, eq);
      std::string_view rhs = body.substr(eq + 1);
      while (!lhs.empty() && (lhs.back() == ' ' || lhs.back() == '\t')) lhs.remove_suffix(1);
      while (!rhs.empty() && (rhs.front() == ' ' || rhs.front() == '\t')) rhs.remove_prefix(1);
      int primes = 0;
      while (!lhs.empty() && lhs.back() == '\'') {
        ++primes;
        lhs.remove_suffix(1);
      }
      if (primes > 1) throw ParseError("variables with primes >= 2 are not supported", line_no, 1);
      if (lhs.empty() || !is_ident_start(lhs[0]))
        throw ParseError("bad variable name in state file", line_no, 1);
      for (char c : lhs)
        if (!is_ident_char(c)) throw ParseError("bad variable name in state file", line_no, 1);
      auto val = parse_rational(rhs);
      if (!val) throw ParseError("bad rational value in state file", line_no, 1);
      st.values[Variable{std::string(lhs), primes}] = *val;
    }
    if (end == text.size()) break;
    i = end + 1;
    ++line_no;
  }
  return st;
}

inline Interpretation parse_interpretation(std::string_view text) {
  Interpretation interp{parse_substitution(text)};
  interp.validate();
  return interp;
}

}  // namespace dgl
