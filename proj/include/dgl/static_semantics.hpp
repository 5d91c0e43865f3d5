#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "dgl/syntax.hpp"

// Syntactic free/bound-variable and signature computation. The sets computed
// here are sound supersets of the semantic static semantics: expressions only
// depend on their free variables, and games only write their bound variables.
// Game symbols read and write the entire state, which is what Top represents.

namespace dgl {

// A finite set of variables or Top (all variables, including every
// differential variable). Cofinite sets are never materialized: subtracting a
// finite set from Top widens to Top, which is sound because every consumer
// only needs an upper bound; subtracting Top from anything yields the empty
// set.
class VarSet {
 public:
  VarSet() = default;

  static VarSet empty() { return VarSet(); }
  static VarSet top() {
    VarSet s;
    s.top_ = true;
    return s;
  }
  static VarSet of(std::initializer_list<Variable> vs) {
    VarSet s;
    s.vars_.insert(vs.begin(), vs.end());
    return s;
  }
  static VarSet of_set(std::set<Variable> vs) {
    VarSet s;
    s.vars_ = std::move(vs);
    return s;
  }

  bool is_top() const { return top_; }
  bool is_empty() const { return !top_ && vars_.empty(); }
  bool contains(const Variable& v) const { return top_ || vars_.count(v) > 0; }

  VarSet unite(const VarSet& o) const {
    if (top_ || o.top_) return top();
    VarSet s = *this;
    s.vars_.insert(o.vars_.begin(), o.vars_.end());
    return s;
  }
  VarSet intersect(const VarSet& o) const {
    if (top_) return o;
    if (o.top_) return *this;
    VarSet s;
    for (const Variable& v : vars_)
      if (o.vars_.count(v)) s.vars_.insert(v);
    return s;
  }
  // this \ o; a Top minuend with a finite, nonempty subtrahend would be
  // cofinite, which the kernel never needs — that is an internal error.
  VarSet subtract(const VarSet& o) const {
    if (o.top_) return empty();
    if (top_) {
      if (o.vars_.empty()) return top();
      throw DglError("internal: cofinite variable set requested (Top minus finite)");
    }
    VarSet s;
    for (const Variable& v : vars_)
      if (!o.vars_.count(v)) s.vars_.insert(v);
    return s;
  }
  bool disjoint(const VarSet& o) const {
    if (is_empty() || o.is_empty()) return true;
    if (top_ || o.top_) return false;
    for (const Variable& v : vars_)
      if (o.vars_.count(v)) return false;
    return true;
  }

  const std::set<Variable>& finite() const {
    if (top_) throw DglError("internal: finite() on Top variable set");
    return vars_;
  }

  bool operator==(const VarSet& o) const { return top_ == o.top_ && vars_ == o.vars_; }

 private:
  bool top_ = false;
  std::set<Variable> vars_;
};

inline std::string to_string(const VarSet& s) {
  if (s.is_top()) return "ALL";
  std::string out;
  for (const Variable& v : s.finite()) {
    if (!out.empty()) out += ", ";
    out += to_string(v);
  }
  return out.empty() ? "{}" : out;
}

struct ArityError : DglError {
  explicit ArityError(const std::string& msg) : DglError(msg) {}
};

// Function, predicate, predicational, and game symbol heads of an expression.
// A head occurs with at most one arity; a conflict is an ill-formed tree.
struct SymbolSet {
  std::map<std::string, int> functions;
  std::map<std::string, int> predicates;
  std::set<std::string> predicationals;
  std::set<std::string> games;

  void add_function(const std::string& head, int arity) {
    auto [it, inserted] = functions.emplace(head, arity);
    if (!inserted && it->second != arity)
      throw ArityError("function symbol " + head + " used at arities " +
                       std::to_string(it->second) + " and " + std::to_string(arity));
  }
  void add_predicate(const std::string& head, int arity) {
    auto [it, inserted] = predicates.emplace(head, arity);
    if (!inserted && it->second != arity)
      throw ArityError("predicate symbol " + head + " used at arities " +
                       std::to_string(it->second) + " and " + std::to_string(arity));
  }
  void merge(const SymbolSet& o) {
    for (const auto& [h, k] : o.functions) add_function(h, k);
    for (const auto& [h, k] : o.predicates) add_predicate(h, k);
    predicationals.insert(o.predicationals.begin(), o.predicationals.end());
    games.insert(o.games.begin(), o.games.end());
  }
  bool empty() const {
    return functions.empty() && predicates.empty() && predicationals.empty() && games.empty();
  }
};

namespace detail {
// Signature plus the reserved dot heads occurring in an expression. The dots
// matter for admissibility checking of nested dot substitutions; the public
// signature() excludes them.
struct SigWithDots {
  SymbolSet syms;
  std::set<int> dots;
};

void collect_sig(const Term& t, SigWithDots& out);
void collect_sig(const Formula& f, SigWithDots& out);
void collect_sig(const HybridGame& g, SigWithDots& out);

inline void collect_sig(const Term& t, SigWithDots& out) {
  std::visit(Overload{
                 [&](const TermVar&) {},
                 [&](const TermNumber&) {},
                 [&](const TermFuncApp& x) {
                   out.syms.add_function(x.head, static_cast<int>(x.args.size()));
                   for (const Term& a : x.args) collect_sig(a, out);
                 },
                 [&](const TermDot& x) { out.dots.insert(x.index); },
                 [&](const TermPlus& x) {
                   collect_sig(x.lhs, out);
                   collect_sig(x.rhs, out);
                 },
                 [&](const TermTimes& x) {
                   collect_sig(x.lhs, out);
                   collect_sig(x.rhs, out);
                 },
                 [&](const TermDifferential& x) { collect_sig(x.arg, out); },
                 [&](const TermMinus& x) {
                   collect_sig(x.lhs, out);
                   collect_sig(x.rhs, out);
                 },
                 [&](const TermNeg& x) { collect_sig(x.arg, out); },
                 [&](const TermPower& x) { collect_sig(x.base, out); },
             },
             t.node().v);
}

inline void collect_sig(const HybridGame& g, SigWithDots& out) {
  std::visit(Overload{
                 [&](const GameSym& x) { out.syms.games.insert(x.head); },
                 [&](const GameAssign& x) { collect_sig(x.value, out); },
                 [&](const GameOde& x) {
                   collect_sig(x.rhs, out);
                   collect_sig(x.domain, out);
                 },
                 [&](const GameTest& x) { collect_sig(x.condition, out); },
                 [&](const GameChoice& x) {
                   collect_sig(x.lhs, out);
                   collect_sig(x.rhs, out);
                 },
                 [&](const GameSeq& x) {
                   collect_sig(x.lhs, out);
                   collect_sig(x.rhs, out);
                 },
                 [&](const GameRepeat& x) { collect_sig(x.body, out); },
                 [&](const GameDual& x) { collect_sig(x.body, out); },
             },
             g.node().v);
}

inline void collect_sig(const Formula& f, SigWithDots& out) {
  auto both = [&](const auto& x) {
    collect_sig(x.lhs, out);
    collect_sig(x.rhs, out);
  };
  std::visit(Overload{
                 [&](const FormulaGeq& x) { both(x); },
                 [&](const FormulaLeq& x) { both(x); },
                 [&](const FormulaGt& x) { both(x); },
                 [&](const FormulaLt& x) { both(x); },
                 [&](const FormulaEq& x) { both(x); },
                 [&](const FormulaNeq& x) { both(x); },
                 [&](const FormulaPredApp& x) {
                   out.syms.add_predicate(x.head, static_cast<int>(x.args.size()));
                   for (const Term& a : x.args) collect_sig(a, out);
                 },
                 [&](const FormulaPredicational& x) { out.syms.predicationals.insert(x.head); },
                 [&](const FormulaNot& x) { collect_sig(x.arg, out); },
                 [&](const FormulaAnd& x) { both(x); },
                 [&](const FormulaOr& x) { both(x); },
                 [&](const FormulaImply& x) { both(x); },
                 [&](const FormulaEquiv& x) { both(x); },
                 [&](const FormulaExists& x) { collect_sig(x.body, out); },
                 [&](const FormulaForall& x) { collect_sig(x.body, out); },
                 [&](const FormulaDiamond& x) {
                   collect_sig(x.game, out);
                   collect_sig(x.body, out);
                 },
                 [&](const FormulaBox& x) {
                   collect_sig(x.game, out);
                   collect_sig(x.body, out);
                 },
                 [&](const FormulaTrue&) {},
                 [&](const FormulaFalse&) {},
             },
             f.node().v);
}

template <class Expr>
SigWithDots sig_with_dots(const Expr& e) {
  SigWithDots out;
  collect_sig(e, out);
  return out;
}
}  // namespace detail

template <class Expr>
SymbolSet signature(const Expr& e) {
  return detail::sig_with_dots(e).syms;
}

// ---------------------------------------------------------------------------
// Free variables.
//
// FV((θ)') closes FV(θ) under priming of base variables: a differential term
// depends on every free variable of θ and on the differential twin of each
// base one.

VarSet free_vars(const Term& t);
VarSet free_vars(const Formula& f);
VarSet free_vars(const HybridGame& g);
VarSet bound_vars(const HybridGame& g);

inline VarSet free_vars(const Term& t) {
  using detail::Overload;
  return std::visit(
      Overload{
          [&](const TermVar& x) { return VarSet::of({x.var}); },
          [&](const TermNumber&) { return VarSet::empty(); },
          [&](const TermFuncApp& x) {
            VarSet s;
            for (const Term& a : x.args) s = s.unite(free_vars(a));
            return s;
          },
          [&](const TermDot&) { return VarSet::empty(); },
          [&](const TermPlus& x) { return free_vars(x.lhs).unite(free_vars(x.rhs)); },
          [&](const TermTimes& x) { return free_vars(x.lhs).unite(free_vars(x.rhs)); },
          [&](const TermDifferential& x) {
            VarSet inner = free_vars(x.arg);
            if (inner.is_top()) return inner;
            std::set<Variable> vs = inner.finite();
            for (const Variable& v : inner.finite())
              if (v.primes == 0) vs.insert(primed(v));
            return VarSet::of_set(std::move(vs));
          },
          [&](const TermMinus& x) { return free_vars(x.lhs).unite(free_vars(x.rhs)); },
          [&](const TermNeg& x) { return free_vars(x.arg); },
          [&](const TermPower& x) { return free_vars(x.base); },
      },
      t.node().v);
}

inline VarSet free_vars(const HybridGame& g) {
  using detail::Overload;
  return std::visit(
      Overload{
          [&](const GameSym&) { return VarSet::top(); },
          [&](const GameAssign& x) { return free_vars(x.value); },
          [&](const GameOde& x) {
            return VarSet::of({x.base}).unite(free_vars(x.rhs)).unite(free_vars(x.domain));
          },
          [&](const GameTest& x) { return free_vars(x.condition); },
          [&](const GameChoice& x) { return free_vars(x.lhs).unite(free_vars(x.rhs)); },
          [&](const GameSeq& x) { return free_vars(x.lhs).unite(free_vars(x.rhs)); },
          [&](const GameRepeat& x) { return free_vars(x.body); },
          [&](const GameDual& x) { return free_vars(x.body); },
      },
      g.node().v);
}

inline VarSet free_vars(const Formula& f) {
  using detail::Overload;
  auto cmp = [](const auto& x) { return free_vars(x.lhs).unite(free_vars(x.rhs)); };
  return std::visit(
      Overload{
          [&](const FormulaGeq& x) { return cmp(x); },
          [&](const FormulaLeq& x) { return cmp(x); },
          [&](const FormulaGt& x) { return cmp(x); },
          [&](const FormulaLt& x) { return cmp(x); },
          [&](const FormulaEq& x) { return cmp(x); },
          [&](const FormulaNeq& x) { return cmp(x); },
          [&](const FormulaPredApp& x) {
            VarSet s;
            for (const Term& a : x.args) s = s.unite(free_vars(a));
            return s;
          },
          [&](const FormulaPredicational&) { return VarSet::top(); },
          [&](const FormulaNot& x) { return free_vars(x.arg); },
          [&](const FormulaAnd& x) { return free_vars(x.lhs).unite(free_vars(x.rhs)); },
          [&](const FormulaOr& x) { return free_vars(x.lhs).unite(free_vars(x.rhs)); },
          [&](const FormulaImply& x) { return free_vars(x.lhs).unite(free_vars(x.rhs)); },
          [&](const FormulaEquiv& x) { return free_vars(x.lhs).unite(free_vars(x.rhs)); },
          [&](const FormulaExists& x) {
            VarSet inner = free_vars(x.body);
            if (inner.is_top()) return inner;  // sound superset, stays Top
            return inner.subtract(VarSet::of({x.var}));
          },
          [&](const FormulaForall& x) {
            VarSet inner = free_vars(x.body);
            if (inner.is_top()) return inner;
            return inner.subtract(VarSet::of({x.var}));
          },
          [&](const FormulaDiamond& x) { return free_vars(x.game).unite(free_vars(x.body)); },
          [&](const FormulaBox& x) { return free_vars(x.game).unite(free_vars(x.body)); },
          [&](const FormulaTrue&) { return VarSet::empty(); },
          [&](const FormulaFalse&) { return VarSet::empty(); },
      },
      f.node().v);
}

inline VarSet bound_vars(const HybridGame& g) {
  using detail::Overload;
  return std::visit(
      Overload{
          [&](const GameSym&) { return VarSet::top(); },
          [&](const GameAssign& x) { return VarSet::of({x.var}); },
          [&](const GameOde& x) { return VarSet::of({x.base, primed(x.base)}); },
          [&](const GameTest&) { return VarSet::empty(); },
          [&](const GameChoice& x) { return bound_vars(x.lhs).unite(bound_vars(x.rhs)); },
          [&](const GameSeq& x) { return bound_vars(x.lhs).unite(bound_vars(x.rhs)); },
          [&](const GameRepeat& x) { return bound_vars(x.body); },
          [&](const GameDual& x) { return bound_vars(x.body); },
      },
      g.node().v);
}

}  // namespace dgl
