#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dgl/parse.hpp"
#include "dgl/static_semantics.hpp"

// Uniform substitutions and their admissibility-checked application.
//
// A substitution maps symbol heads to replacements: function heads to terms,
// predicate heads to formulas (both may mention the reserved dot arguments
// .0 .. .k-1), predicational heads to formulas (no dots, applied verbatim with
// intended capture), and game heads to hybrid games. Application is
// Church-style: at every binder the substitution restricted to the symbols of
// the argument must introduce no free variable that the binder taboos,
// otherwise application aborts with a clash. Nested dot substitutions reuse
// the same application and the same checks.

namespace dgl {

struct ClashError {
  std::string head;      // entry whose replacement introduces the variable, e.g. "p/1"
  VarSet taboo;          // taboo set U at the binder
  Variable offending;    // witness in FV(sigma|Sigma(arg)) cap U
  std::string position;  // which binder tripped the check

  std::string message() const {
    return "clash: substitution for " + head + " introduces free variable " +
           to_string(offending) + " tabooed at " + position + " (taboo " + to_string(taboo) + ")";
  }
};

namespace detail {
struct ClashException {
  ClashError err;
};
}  // namespace detail

class UniformSubstitution {
 public:
  using FnKey = std::pair<std::string, int>;

  UniformSubstitution() = default;

  void set_function(const std::string& head, int arity, Term replacement) {
    validate_dots(free_dots(replacement), arity, head);
    insert_unique(fns_, FnKey{head, arity}, std::move(replacement), head + "/" + std::to_string(arity));
  }
  void set_predicate(const std::string& head, int arity, Formula replacement) {
    validate_dots(free_dots(replacement), arity, head);
    insert_unique(preds_, FnKey{head, arity}, std::move(replacement), head + "/" + std::to_string(arity));
  }
  void set_predicational(const std::string& head, Formula replacement) {
    if (!free_dots(replacement).empty())
      throw DglError("predicational replacement for " + head + " must not mention dots");
    insert_unique(predicationals_, head, std::move(replacement), head + "(||)");
  }
  void set_game(const std::string& head, HybridGame replacement) {
    if (!free_dots(replacement).empty())
      throw DglError("game replacement for " + head + " must not mention dots");
    insert_unique(games_, head, std::move(replacement), head);
  }

  const Term* function(const std::string& head, int arity) const {
    auto it = fns_.find(FnKey{head, arity});
    return it == fns_.end() ? nullptr : &it->second;
  }
  const Formula* predicate(const std::string& head, int arity) const {
    auto it = preds_.find(FnKey{head, arity});
    return it == preds_.end() ? nullptr : &it->second;
  }
  const Formula* predicational(const std::string& head) const {
    auto it = predicationals_.find(head);
    return it == predicationals_.end() ? nullptr : &it->second;
  }
  const HybridGame* game(const std::string& head) const {
    auto it = games_.find(head);
    return it == games_.end() ? nullptr : &it->second;
  }
  const Term* dot(int index) const {
    auto it = dots_.find(index);
    return it == dots_.end() ? nullptr : &it->second;
  }

  bool empty() const {
    return fns_.empty() && preds_.empty() && predicationals_.empty() && games_.empty() &&
           dots_.empty();
  }

  const std::map<FnKey, Term>& functions() const { return fns_; }
  const std::map<FnKey, Formula>& predicates() const { return preds_; }
  const std::map<std::string, Formula>& predicationals() const { return predicationals_; }
  const std::map<std::string, HybridGame>& games() const { return games_; }
  const std::map<int, Term>& dots() const { return dots_; }

  // {.i -> args[i]}, the inner substitution of Fig.-1-style argument plugging
  static UniformSubstitution dot_substitution(std::vector<Term> args) {
    UniformSubstitution s;
    for (size_t i = 0; i < args.size(); ++i) s.dots_.emplace(static_cast<int>(i), std::move(args[i]));
    return s;
  }

 private:
  template <class M, class K, class V>
  static void insert_unique(M& m, K key, V value, const std::string& shown) {
    auto [it, inserted] = m.emplace(std::move(key), std::move(value));
    (void)it;
    if (!inserted) throw DglError("duplicate substitution entry for " + shown);
  }
  template <class Expr>
  static std::set<int> free_dots(const Expr& e) {
    return detail::sig_with_dots(e).dots;
  }
  static void validate_dots(const std::set<int>& dots, int arity, const std::string& head) {
    for (int d : dots)
      if (d < 0 || d >= arity)
        throw DglError("replacement for " + head + " mentions ." + std::to_string(d) +
                       " but the head has arity " + std::to_string(arity));
  }

  std::map<FnKey, Term> fns_;
  std::map<FnKey, Formula> preds_;
  std::map<std::string, Formula> predicationals_;
  std::map<std::string, HybridGame> games_;
  std::map<int, Term> dots_;
};

// Free variables the substitution introduces: the union of the free variables
// of the function and predicate replacements whose heads occur in restrict_to.
// Game and predicational replacements contribute nothing (they see the whole
// state anyway).
namespace detail {
inline VarSet restricted_subst_free_vars(const UniformSubstitution& s, const SigWithDots& sig) {
  VarSet out;
  for (const auto& [key, repl] : s.functions()) {
    auto it = sig.syms.functions.find(key.first);
    if (it != sig.syms.functions.end() && it->second == key.second)
      out = out.unite(free_vars(repl));
  }
  for (const auto& [key, repl] : s.predicates()) {
    auto it = sig.syms.predicates.find(key.first);
    if (it != sig.syms.predicates.end() && it->second == key.second)
      out = out.unite(free_vars(repl));
  }
  for (const auto& [idx, repl] : s.dots()) {
    if (sig.dots.count(idx)) out = out.unite(free_vars(repl));
  }
  return out;
}
}  // namespace detail

inline VarSet subst_free_vars(const UniformSubstitution& s, const SymbolSet& restrict_to) {
  detail::SigWithDots sig;
  sig.syms = restrict_to;
  return detail::restricted_subst_free_vars(s, sig);
}

// FV(sigma) over every function and predicate entry, unrestricted.
inline VarSet subst_free_vars(const UniformSubstitution& s) {
  VarSet out;
  for (const auto& [key, repl] : s.functions()) out = out.unite(free_vars(repl));
  for (const auto& [key, repl] : s.predicates()) out = out.unite(free_vars(repl));
  for (const auto& [idx, repl] : s.dots()) out = out.unite(free_vars(repl));
  return out;
}

// ---------------------------------------------------------------------------
// Application (throws detail::ClashException internally, wrapped below)

namespace detail {

template <class Expr>
void check_admissible(const UniformSubstitution& s, const Expr& arg, const VarSet& taboo,
                      const std::string& position) {
  SigWithDots sig = sig_with_dots(arg);
  VarSet fv = restricted_subst_free_vars(s, sig);
  if (fv.disjoint(taboo)) return;

  Variable witness{"x", 0};
  if (!fv.is_top()) {
    for (const Variable& v : fv.finite())
      if (taboo.contains(v)) {
        witness = v;
        break;
      }
  } else if (!taboo.is_top() && !taboo.is_empty()) {
    witness = *taboo.finite().begin();
  }
  // attribute the clash to an entry whose replacement mentions the witness
  std::string head = "?";
  for (const auto& [key, repl] : s.functions()) {
    auto it = sig.syms.functions.find(key.first);
    if (it != sig.syms.functions.end() && it->second == key.second &&
        free_vars(repl).contains(witness)) {
      head = key.first + "/" + std::to_string(key.second);
      break;
    }
  }
  if (head == "?")
    for (const auto& [key, repl] : s.predicates()) {
      auto it = sig.syms.predicates.find(key.first);
      if (it != sig.syms.predicates.end() && it->second == key.second &&
          free_vars(repl).contains(witness)) {
        head = key.first + "/" + std::to_string(key.second);
        break;
      }
    }
  if (head == "?")
    for (const auto& [idx, repl] : s.dots()) {
      if (sig.dots.count(idx) && free_vars(repl).contains(witness)) {
        head = "." + std::to_string(idx);
        break;
      }
    }
  throw ClashException{ClashError{head, taboo, witness, position}};
}

Term usubst(const UniformSubstitution& s, const Term& t);
Formula usubst(const UniformSubstitution& s, const Formula& f);
HybridGame usubst(const UniformSubstitution& s, const HybridGame& g);

inline Term usubst(const UniformSubstitution& s, const Term& t) {
  return std::visit(
      Overload{
          [&](const TermVar&) { return t; },
          [&](const TermNumber&) { return t; },
          [&](const TermFuncApp& x) {
            std::vector<Term> args;
            args.reserve(x.args.size());
            for (const Term& a : x.args) args.push_back(usubst(s, a));
            if (const Term* repl = s.function(x.head, static_cast<int>(x.args.size()))) {
              UniformSubstitution inner = UniformSubstitution::dot_substitution(std::move(args));
              return usubst(inner, *repl);
            }
            return Term::func(x.head, std::move(args));
          },
          [&](const TermDot& x) {
            if (const Term* repl = s.dot(x.index)) return *repl;
            return t;
          },
          [&](const TermPlus& x) { return Term::plus(usubst(s, x.lhs), usubst(s, x.rhs)); },
          [&](const TermTimes& x) { return Term::times(usubst(s, x.lhs), usubst(s, x.rhs)); },
          [&](const TermDifferential& x) {
            check_admissible(s, x.arg, VarSet::top(), "differential");
            return Term::differential(usubst(s, x.arg));
          },
          [&](const TermMinus& x) { return Term::minus(usubst(s, x.lhs), usubst(s, x.rhs)); },
          [&](const TermNeg& x) { return Term::neg(usubst(s, x.arg)); },
          [&](const TermPower& x) { return Term::power(usubst(s, x.base), x.exponent); },
      },
      t.node().v);
}

inline HybridGame usubst(const UniformSubstitution& s, const HybridGame& g) {
  return std::visit(
      Overload{
          [&](const GameSym& x) {
            if (const HybridGame* repl = s.game(x.head)) return *repl;
            return g;
          },
          [&](const GameAssign& x) { return HybridGame::assign(x.var, usubst(s, x.value)); },
          [&](const GameOde& x) {
            VarSet taboo = VarSet::of({x.base, primed(x.base)});
            check_admissible(s, x.rhs, taboo, "differential equation");
            check_admissible(s, x.domain, taboo, "evolution domain");
            return HybridGame::ode(x.base, usubst(s, x.rhs), usubst(s, x.domain));
          },
          [&](const GameTest& x) { return HybridGame::test(usubst(s, x.condition)); },
          [&](const GameChoice& x) {
            return HybridGame::choice(usubst(s, x.lhs), usubst(s, x.rhs));
          },
          [&](const GameSeq& x) {
            HybridGame lhs = usubst(s, x.lhs);
            check_admissible(s, x.rhs, bound_vars(lhs), "sequential composition");
            return HybridGame::seq(std::move(lhs), usubst(s, x.rhs));
          },
          [&](const GameRepeat& x) {
            HybridGame body = usubst(s, x.body);
            check_admissible(s, x.body, bound_vars(body), "loop");
            return HybridGame::repeat(std::move(body));
          },
          [&](const GameDual& x) { return HybridGame::dual(usubst(s, x.body)); },
      },
      g.node().v);
}

inline Formula usubst(const UniformSubstitution& s, const Formula& f) {
  auto terms2 = [&](const auto& x, auto make) { return make(usubst(s, x.lhs), usubst(s, x.rhs)); };
  return std::visit(
      Overload{
          [&](const FormulaGeq& x) { return terms2(x, Formula::geq); },
          [&](const FormulaLeq& x) { return terms2(x, Formula::leq); },
          [&](const FormulaGt& x) { return terms2(x, Formula::gt); },
          [&](const FormulaLt& x) { return terms2(x, Formula::lt); },
          [&](const FormulaEq& x) { return terms2(x, Formula::eq); },
          [&](const FormulaNeq& x) { return terms2(x, Formula::neq); },
          [&](const FormulaPredApp& x) {
            std::vector<Term> args;
            args.reserve(x.args.size());
            for (const Term& a : x.args) args.push_back(usubst(s, a));
            if (const Formula* repl = s.predicate(x.head, static_cast<int>(x.args.size()))) {
              UniformSubstitution inner = UniformSubstitution::dot_substitution(std::move(args));
              return usubst(inner, *repl);
            }
            return Formula::pred(x.head, std::move(args));
          },
          [&](const FormulaPredicational& x) {
            // applied verbatim; capture is intended (the <c>true encoding)
            if (const Formula* repl = s.predicational(x.head)) return *repl;
            return f;
          },
          [&](const FormulaNot& x) { return Formula::not_(usubst(s, x.arg)); },
          [&](const FormulaAnd& x) {
            return Formula::and_(usubst(s, x.lhs), usubst(s, x.rhs));
          },
          [&](const FormulaOr& x) { return Formula::or_(usubst(s, x.lhs), usubst(s, x.rhs)); },
          [&](const FormulaImply& x) {
            return Formula::imply(usubst(s, x.lhs), usubst(s, x.rhs));
          },
          [&](const FormulaEquiv& x) {
            return Formula::equiv(usubst(s, x.lhs), usubst(s, x.rhs));
          },
          [&](const FormulaExists& x) {
            check_admissible(s, x.body, VarSet::of({x.var}), "quantifier binding " + to_string(x.var));
            return Formula::exists(x.var, usubst(s, x.body));
          },
          [&](const FormulaForall& x) {
            check_admissible(s, x.body, VarSet::of({x.var}), "quantifier binding " + to_string(x.var));
            return Formula::forall(x.var, usubst(s, x.body));
          },
          [&](const FormulaDiamond& x) {
            HybridGame game = usubst(s, x.game);
            check_admissible(s, x.body, bound_vars(game), "modality");
            return Formula::diamond(std::move(game), usubst(s, x.body));
          },
          [&](const FormulaBox& x) {
            HybridGame game = usubst(s, x.game);
            check_admissible(s, x.body, bound_vars(game), "modality");
            return Formula::box(std::move(game), usubst(s, x.body));
          },
          [&](const FormulaTrue&) { return f; },
          [&](const FormulaFalse&) { return f; },
      },
      f.node().v);
}

}  // namespace detail

template <class Expr>
std::variant<Expr, ClashError> apply(const UniformSubstitution& s, const Expr& e) {
  try {
    return detail::usubst(s, e);
  } catch (const detail::ClashException& c) {
    return c.err;
  }
}

// ---------------------------------------------------------------------------
// Uniform renaming: transposes x <-> y together with x' <-> y' everywhere,
// free and bound occurrences alike. Sound by the state-bijection argument;
// used to move an axiom's fixed bound variable to the variable of interest.

namespace detail {
inline Variable transpose(const Variable& v, const Variable& x, const Variable& y) {
  if (v.name == x.name) return Variable{y.name, v.primes};
  if (v.name == y.name) return Variable{x.name, v.primes};
  return v;
}

Term rename(const Term& t, const Variable& x, const Variable& y);
Formula rename(const Formula& f, const Variable& x, const Variable& y);
HybridGame rename(const HybridGame& g, const Variable& x, const Variable& y);

inline Term rename(const Term& t, const Variable& x, const Variable& y) {
  return std::visit(
      Overload{
          [&](const TermVar& n) { return Term::var(transpose(n.var, x, y)); },
          [&](const TermNumber&) { return t; },
          [&](const TermFuncApp& n) {
            std::vector<Term> args;
            args.reserve(n.args.size());
            for (const Term& a : n.args) args.push_back(rename(a, x, y));
            return Term::func(n.head, std::move(args));
          },
          [&](const TermDot&) { return t; },
          [&](const TermPlus& n) { return Term::plus(rename(n.lhs, x, y), rename(n.rhs, x, y)); },
          [&](const TermTimes& n) { return Term::times(rename(n.lhs, x, y), rename(n.rhs, x, y)); },
          [&](const TermDifferential& n) { return Term::differential(rename(n.arg, x, y)); },
          [&](const TermMinus& n) { return Term::minus(rename(n.lhs, x, y), rename(n.rhs, x, y)); },
          [&](const TermNeg& n) { return Term::neg(rename(n.arg, x, y)); },
          [&](const TermPower& n) { return Term::power(rename(n.base, x, y), n.exponent); },
      },
      t.node().v);
}

inline HybridGame rename(const HybridGame& g, const Variable& x, const Variable& y) {
  return std::visit(
      Overload{
          [&](const GameSym&) { return g; },
          [&](const GameAssign& n) {
            return HybridGame::assign(transpose(n.var, x, y), rename(n.value, x, y));
          },
          [&](const GameOde& n) {
            return HybridGame::ode(transpose(n.base, x, y), rename(n.rhs, x, y),
                                   rename(n.domain, x, y));
          },
          [&](const GameTest& n) { return HybridGame::test(rename(n.condition, x, y)); },
          [&](const GameChoice& n) {
            return HybridGame::choice(rename(n.lhs, x, y), rename(n.rhs, x, y));
          },
          [&](const GameSeq& n) {
            return HybridGame::seq(rename(n.lhs, x, y), rename(n.rhs, x, y));
          },
          [&](const GameRepeat& n) { return HybridGame::repeat(rename(n.body, x, y)); },
          [&](const GameDual& n) { return HybridGame::dual(rename(n.body, x, y)); },
      },
      g.node().v);
}

inline Formula rename(const Formula& f, const Variable& x, const Variable& y) {
  auto terms2 = [&](const auto& n, auto make) {
    return make(rename(n.lhs, x, y), rename(n.rhs, x, y));
  };
  return std::visit(
      Overload{
          [&](const FormulaGeq& n) { return terms2(n, Formula::geq); },
          [&](const FormulaLeq& n) { return terms2(n, Formula::leq); },
          [&](const FormulaGt& n) { return terms2(n, Formula::gt); },
          [&](const FormulaLt& n) { return terms2(n, Formula::lt); },
          [&](const FormulaEq& n) { return terms2(n, Formula::eq); },
          [&](const FormulaNeq& n) { return terms2(n, Formula::neq); },
          [&](const FormulaPredApp& n) {
            std::vector<Term> args;
            args.reserve(n.args.size());
            for (const Term& a : n.args) args.push_back(rename(a, x, y));
            return Formula::pred(n.head, std::move(args));
          },
          [&](const FormulaPredicational&) { return f; },
          [&](const FormulaNot& n) { return Formula::not_(rename(n.arg, x, y)); },
          [&](const FormulaAnd& n) {
            return Formula::and_(rename(n.lhs, x, y), rename(n.rhs, x, y));
          },
          [&](const FormulaOr& n) {
            return Formula::or_(rename(n.lhs, x, y), rename(n.rhs, x, y));
          },
          [&](const FormulaImply& n) {
            return Formula::imply(rename(n.lhs, x, y), rename(n.rhs, x, y));
          },
          [&](const FormulaEquiv& n) {
            return Formula::equiv(rename(n.lhs, x, y), rename(n.rhs, x, y));
          },
          [&](const FormulaExists& n) {
            return Formula::exists(transpose(n.var, x, y), rename(n.body, x, y));
          },
          [&](const FormulaForall& n) {
            return Formula::forall(transpose(n.var, x, y), rename(n.body, x, y));
          },
          [&](const FormulaDiamond& n) {
            return Formula::diamond(rename(n.game, x, y), rename(n.body, x, y));
          },
          [&](const FormulaBox& n) {
            return Formula::box(rename(n.game, x, y), rename(n.body, x, y));
          },
          [&](const FormulaTrue&) { return f; },
          [&](const FormulaFalse&) { return f; },
      },
      f.node().v);
}
}  // namespace detail

template <class Expr>
Expr uniform_rename(const Variable& x, const Variable& y, const Expr& e) {
  if (x.primes != 0 || y.primes != 0)
    throw DglError("uniform renaming expects base variables, got " + to_string(x) + ", " +
                   to_string(y));
  return detail::rename(e, x, y);
}

// ---------------------------------------------------------------------------
// Substitution text format: "{ entry (;; entry)* }" with entries
//   f() ~> term        f(.) ~> term       f(.0,.1) ~> term
//   p(.) ~> formula    P(||) ~> formula   a ~> game
// A nullary replacement that parses as a complete term becomes a function
// entry, otherwise it is parsed as a formula and becomes a predicate entry.

inline UniformSubstitution parse_substitution_at(Parser& p);

inline UniformSubstitution parse_substitution(std::string_view text) {
  Parser p = Parser::of(text, ParseOptions{.allow_dots = true});
  UniformSubstitution s = parse_substitution_at(p);
  p.expect_end();
  return s;
}

inline UniformSubstitution parse_substitution_at(Parser& p) {
  UniformSubstitution s;
  p.expect(TokKind::LBrace, "'{' opening the substitution");
  if (p.accept(TokKind::RBrace)) return s;
  for (;;) {
    const Token& head_tok = p.expect(TokKind::Ident, "a symbol head");
    if (head_tok.primes != 0) p.fail("substitution heads cannot be primed");
    std::string head = head_tok.text;

    if (p.peek().kind == TokKind::LParen && p.peek(1).kind == TokKind::DPipe) {
      p.accept(TokKind::LParen);
      p.accept(TokKind::DPipe);
      p.expect(TokKind::RParen, "')'");
      p.expect(TokKind::TildeArrow, "'~>'");
      s.set_predicational(head, p.p_formula());
    } else if (p.accept(TokKind::LParen)) {
      int arity = 0;
      if (!p.accept(TokKind::RParen)) {
        for (;;) {
          const Token& d = p.expect(TokKind::Dot, "'.' argument");
          if (d.dot_index != arity)
            p.fail("dot arguments must be .0, .1, ... in order");
          ++arity;
          if (!p.accept(TokKind::Comma)) break;
        }
        p.expect(TokKind::RParen, "')'");
      }
      p.expect(TokKind::TildeArrow, "'~>'");
      // function if the replacement parses as a complete term, else predicate
      size_t save = p.position();
      bool is_term = false;
      Term term_repl;
      try {
        term_repl = p.p_term();
        if (p.peek().kind == TokKind::DSemi || p.peek().kind == TokKind::RBrace) is_term = true;
      } catch (ParseError&) {
      }
      if (is_term) {
        s.set_function(head, arity, term_repl);
      } else {
        p.set_position(save);
        s.set_predicate(head, arity, p.p_formula());
      }
    } else {
      p.expect(TokKind::TildeArrow, "'~>'");
      s.set_game(head, p.p_game());
    }
    if (p.accept(TokKind::DSemi)) continue;
    p.expect(TokKind::RBrace, "'}' or ';;'");
    break;
  }
  return s;
}

}  // namespace dgl

#include "dgl/print.hpp"

namespace dgl {

inline std::string to_string(const UniformSubstitution& s) {
  std::string out = "{";
  bool first = true;
  auto sep = [&]() {
    if (!first) out += " ;; ";
    first = false;
  };
  auto dot_list = [](int arity) {
    if (arity == 0) return std::string("()");
    if (arity == 1) return std::string("(.)");
    std::string d = "(";
    for (int i = 0; i < arity; ++i) {
      if (i) d += ",";
      d += "." + std::to_string(i);
    }
    return d + ")";
  };
  for (const auto& [key, repl] : s.functions()) {
    sep();
    out += key.first + dot_list(key.second) + " ~> " + print(repl);
  }
  for (const auto& [key, repl] : s.predicates()) {
    sep();
    out += key.first + dot_list(key.second) + " ~> " + print(repl);
  }
  for (const auto& [head, repl] : s.predicationals()) {
    sep();
    out += head + "(||) ~> " + print(repl);
  }
  for (const auto& [head, repl] : s.games()) {
    sep();
    out += head + " ~> " + print(repl);
  }
  out += "}";
  return out;
}

}  // namespace dgl
