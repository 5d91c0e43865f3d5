#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dgl/rational.hpp"

// Abstract syntax for the three categories of differential game logic:
// terms, hybrid games, and formulas. All nodes are immutable values shared
// through shared_ptr, so copies are cheap and everything is safe to share
// across threads.
//
// Sugar nodes (Minus, Neg, Power, the non-Geq comparisons, Or, Imply, Equiv,
// Forall, Box) are preserved structurally for round-tripping; every semantic
// operation treats them by their expansion (see desugar below).

namespace dgl {

struct DglError : std::runtime_error {
  explicit DglError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Variable {
  std::string name;
  int primes = 0;  // 0 = x, 1 = x'; primes >= 2 are rejected at parse time

  bool operator==(const Variable&) const = default;
  auto operator<=>(const Variable&) const = default;
};

inline Variable base_var(std::string name) { return Variable{std::move(name), 0}; }
inline Variable primed(const Variable& v) { return Variable{v.name, v.primes + 1}; }

inline std::string to_string(const Variable& v) {
  std::string s = v.name;
  for (int i = 0; i < v.primes; ++i) s += '\'';
  return s;
}

struct TermNode;
struct FormulaNode;
struct GameNode;
class Term;
class Formula;
class HybridGame;

class Term {
 public:
  Term() = default;

  static Term var(Variable v);
  static Term var(std::string name, int primes = 0);
  static Term number(Rational value);
  static Term number(long value);
  static Term func(std::string head, std::vector<Term> args = {});
  static Term dot(int index = 0);
  static Term plus(Term lhs, Term rhs);
  static Term times(Term lhs, Term rhs);
  static Term differential(Term arg);
  static Term minus(Term lhs, Term rhs);
  static Term neg(Term arg);
  static Term power(Term base, unsigned exponent);

  const TermNode& node() const;
  template <class T>
  const T* get_if() const;
  bool ok() const { return node_ != nullptr; }

 private:
  explicit Term(std::shared_ptr<const TermNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const TermNode> node_;
};

class Formula {
 public:
  Formula() = default;

  static Formula geq(Term lhs, Term rhs);
  static Formula leq(Term lhs, Term rhs);
  static Formula gt(Term lhs, Term rhs);
  static Formula lt(Term lhs, Term rhs);
  static Formula eq(Term lhs, Term rhs);
  static Formula neq(Term lhs, Term rhs);
  static Formula pred(std::string head, std::vector<Term> args = {});
  static Formula predicational(std::string head);
  static Formula not_(Formula f);
  static Formula and_(Formula lhs, Formula rhs);
  static Formula or_(Formula lhs, Formula rhs);
  static Formula imply(Formula lhs, Formula rhs);
  static Formula equiv(Formula lhs, Formula rhs);
  static Formula exists(Variable var, Formula body);
  static Formula forall(Variable var, Formula body);
  static Formula diamond(HybridGame game, Formula body);
  static Formula box(HybridGame game, Formula body);
  static Formula truth();
  static Formula falsity();

  const FormulaNode& node() const;
  template <class T>
  const T* get_if() const;
  bool ok() const { return node_ != nullptr; }

 private:
  explicit Formula(std::shared_ptr<const FormulaNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const FormulaNode> node_;
};

class HybridGame {
 public:
  HybridGame() = default;

  static HybridGame sym(std::string head);
  static HybridGame assign(Variable var, Term value);
  // x' = rhs & domain; an absent domain is the constant-true formula
  static HybridGame ode(Variable base, Term rhs, Formula domain);
  static HybridGame test(Formula condition);
  static HybridGame choice(HybridGame lhs, HybridGame rhs);
  static HybridGame seq(HybridGame lhs, HybridGame rhs);
  static HybridGame repeat(HybridGame body);
  static HybridGame dual(HybridGame body);

  const GameNode& node() const;
  template <class T>
  const T* get_if() const;
  bool ok() const { return node_ != nullptr; }

 private:
  explicit HybridGame(std::shared_ptr<const GameNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const GameNode> node_;
};

// ---------------------------------------------------------------------------
// Node payloads

struct TermVar { Variable var; };
struct TermNumber { Rational value; };
struct TermFuncApp {
  std::string head;
  std::vector<Term> args;
};
struct TermDot { int index = 0; };
struct TermPlus { Term lhs, rhs; };
struct TermTimes { Term lhs, rhs; };
struct TermDifferential { Term arg; };
struct TermMinus { Term lhs, rhs; };  // sugar: a - b == a + (-1)*b
struct TermNeg { Term arg; };         // sugar: -a == (-1)*a
struct TermPower {                    // sugar: a^n == a*...*a, a^0 == 1
  Term base;
  unsigned exponent = 0;
};

struct GameSym { std::string head; };
struct GameAssign {
  Variable var;
  Term value;
};
struct GameOde {
  Variable base;  // primes == 0; the equation binds base and base'
  Term rhs;
  Formula domain;
};
struct GameTest { Formula condition; };
struct GameChoice { HybridGame lhs, rhs; };
struct GameSeq { HybridGame lhs, rhs; };
struct GameRepeat { HybridGame body; };
struct GameDual { HybridGame body; };

struct FormulaGeq { Term lhs, rhs; };
struct FormulaLeq { Term lhs, rhs; };  // sugar: a <= b == b >= a
struct FormulaGt { Term lhs, rhs; };   // sugar: a > b == !(b >= a)
struct FormulaLt { Term lhs, rhs; };   // sugar: a < b == !(a >= b)
struct FormulaEq { Term lhs, rhs; };   // sugar: a = b == a >= b & b >= a
struct FormulaNeq { Term lhs, rhs; };  // sugar: a != b == !(a = b)
struct FormulaPredApp {
  std::string head;
  std::vector<Term> args;
};
struct FormulaPredicational { std::string head; };
struct FormulaNot { Formula arg; };
struct FormulaAnd { Formula lhs, rhs; };
struct FormulaOr { Formula lhs, rhs; };     // sugar: !(!a & !b)
struct FormulaImply { Formula lhs, rhs; };  // sugar: !(a & !b)
struct FormulaEquiv { Formula lhs, rhs; };  // sugar: (a -> b) & (b -> a)
struct FormulaExists {
  Variable var;
  Formula body;
};
struct FormulaForall {  // sugar: !\exists x !p
  Variable var;
  Formula body;
};
struct FormulaDiamond {
  HybridGame game;
  Formula body;
};
struct FormulaBox {  // sugar: !<a>!p
  HybridGame game;
  Formula body;
};
struct FormulaTrue {};
struct FormulaFalse {};

struct TermNode {
  std::variant<TermVar, TermNumber, TermFuncApp, TermDot, TermPlus, TermTimes, TermDifferential,
               TermMinus, TermNeg, TermPower>
      v;
};
struct GameNode {
  std::variant<GameSym, GameAssign, GameOde, GameTest, GameChoice, GameSeq, GameRepeat, GameDual> v;
};
struct FormulaNode {
  std::variant<FormulaGeq, FormulaLeq, FormulaGt, FormulaLt, FormulaEq, FormulaNeq, FormulaPredApp,
               FormulaPredicational, FormulaNot, FormulaAnd, FormulaOr, FormulaImply, FormulaEquiv,
               FormulaExists, FormulaForall, FormulaDiamond, FormulaBox, FormulaTrue, FormulaFalse>
      v;
};

// ---------------------------------------------------------------------------
// Accessors and factories

inline const TermNode& Term::node() const {
  if (!node_) throw DglError("use of empty Term");
  return *node_;
}
template <class T>
const T* Term::get_if() const {
  return node_ ? std::get_if<T>(&node_->v) : nullptr;
}
inline const FormulaNode& Formula::node() const {
  if (!node_) throw DglError("use of empty Formula");
  return *node_;
}
template <class T>
const T* Formula::get_if() const {
  return node_ ? std::get_if<T>(&node_->v) : nullptr;
}
inline const GameNode& HybridGame::node() const {
  if (!node_) throw DglError("use of empty HybridGame");
  return *node_;
}
template <class T>
const T* HybridGame::get_if() const {
  return node_ ? std::get_if<T>(&node_->v) : nullptr;
}

namespace detail {
template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

template <class Node, class Alt>
std::shared_ptr<const Node> make_node(Alt alt) {
  return std::make_shared<const Node>(Node{std::move(alt)});
}
}  // namespace detail

inline Term Term::var(Variable v) { return Term(detail::make_node<TermNode>(TermVar{std::move(v)})); }
inline Term Term::var(std::string name, int primes) {
  return var(Variable{std::move(name), primes});
}
inline Term Term::number(Rational value) {
  return Term(detail::make_node<TermNode>(TermNumber{std::move(value)}));
}
inline Term Term::number(long value) { return number(Rational(value)); }
inline Term Term::func(std::string head, std::vector<Term> args) {
  return Term(detail::make_node<TermNode>(TermFuncApp{std::move(head), std::move(args)}));
}
inline Term Term::dot(int index) { return Term(detail::make_node<TermNode>(TermDot{index})); }
inline Term Term::plus(Term lhs, Term rhs) {
  return Term(detail::make_node<TermNode>(TermPlus{std::move(lhs), std::move(rhs)}));
}
inline Term Term::times(Term lhs, Term rhs) {
  return Term(detail::make_node<TermNode>(TermTimes{std::move(lhs), std::move(rhs)}));
}
inline Term Term::differential(Term arg) {
  return Term(detail::make_node<TermNode>(TermDifferential{std::move(arg)}));
}
inline Term Term::minus(Term lhs, Term rhs) {
  return Term(detail::make_node<TermNode>(TermMinus{std::move(lhs), std::move(rhs)}));
}
inline Term Term::neg(Term arg) { return Term(detail::make_node<TermNode>(TermNeg{std::move(arg)})); }
inline Term Term::power(Term base, unsigned exponent) {
  return Term(detail::make_node<TermNode>(TermPower{std::move(base), exponent}));
}

inline HybridGame HybridGame::sym(std::string head) {
  return HybridGame(detail::make_node<GameNode>(GameSym{std::move(head)}));
}
inline HybridGame HybridGame::assign(Variable var, Term value) {
  return HybridGame(detail::make_node<GameNode>(GameAssign{std::move(var), std::move(value)}));
}
inline HybridGame HybridGame::ode(Variable base, Term rhs, Formula domain) {
  if (base.primes != 0) throw DglError("ODE base variable must be unprimed: " + to_string(base));
  return HybridGame(
      detail::make_node<GameNode>(GameOde{std::move(base), std::move(rhs), std::move(domain)}));
}
inline HybridGame HybridGame::test(Formula condition) {
  return HybridGame(detail::make_node<GameNode>(GameTest{std::move(condition)}));
}
inline HybridGame HybridGame::choice(HybridGame lhs, HybridGame rhs) {
  return HybridGame(detail::make_node<GameNode>(GameChoice{std::move(lhs), std::move(rhs)}));
}
inline HybridGame HybridGame::seq(HybridGame lhs, HybridGame rhs) {
  return HybridGame(detail::make_node<GameNode>(GameSeq{std::move(lhs), std::move(rhs)}));
}
inline HybridGame HybridGame::repeat(HybridGame body) {
  return HybridGame(detail::make_node<GameNode>(GameRepeat{std::move(body)}));
}
inline HybridGame HybridGame::dual(HybridGame body) {
  return HybridGame(detail::make_node<GameNode>(GameDual{std::move(body)}));
}

inline Formula Formula::geq(Term lhs, Term rhs) {
  return Formula(detail::make_node<FormulaNode>(FormulaGeq{std::move(lhs), std::move(rhs)}));
}
inline Formula Formula::leq(Term lhs, Term rhs) {
  return Formula(detail::make_node<FormulaNode>(FormulaLeq{std::move(lhs), std::move(rhs)}));
}
inline Formula Formula::gt(Term lhs, Term rhs) {
  return Formula(detail::make_node<FormulaNode>(FormulaGt{std::move(lhs), std::move(rhs)}));
}
inline Formula Formula::lt(Term lhs, Term rhs) {
  return Formula(detail::make_node<FormulaNode>(FormulaLt{std::move(lhs), std::move(rhs)}));
}
inline Formula Formula::eq(Term lhs, Term rhs) {
  return Formula(detail::make_node<FormulaNode>(FormulaEq{std::move(lhs), std::move(rhs)}));
}
inline Formula Formula::neq(Term lhs, Term rhs) {
  return Formula(detail::make_node<FormulaNode>(FormulaNeq{std::move(lhs), std::move(rhs)}));
}
inline Formula Formula::pred(std::string head, std::vector<Term> args) {
  return Formula(detail::make_node<FormulaNode>(FormulaPredApp{std::move(head), std::move(args)}));
}
inline Formula Formula::predicational(std::string head) {
  return Formula(detail::make_node<FormulaNode>(FormulaPredicational{std::move(head)}));
}
inline Formula Formula::not_(Formula f) {
  return Formula(detail::make_node<FormulaNode>(FormulaNot{std::move(f)}));
}
inline Formula Formula::and_(Formula lhs, Formula rhs) {
  return Formula(detail::make_node<FormulaNode>(FormulaAnd{std::move(lhs), std::move(rhs)}));
}
inline Formula Formula::or_(Formula lhs, Formula rhs) {
  return Formula(detail::make_node<FormulaNode>(FormulaOr{std::move(lhs), std::move(rhs)}));
}
inline Formula Formula::imply(Formula lhs, Formula rhs) {
  return Formula(detail::make_node<FormulaNode>(FormulaImply{std::move(lhs), std::move(rhs)}));
}
inline Formula Formula::equiv(Formula lhs, Formula rhs) {
  return Formula(detail::make_node<FormulaNode>(FormulaEquiv{std::move(lhs), std::move(rhs)}));
}
inline Formula Formula::exists(Variable var, Formula body) {
  return Formula(detail::make_node<FormulaNode>(FormulaExists{std::move(var), std::move(body)}));
}
inline Formula Formula::forall(Variable var, Formula body) {
  return Formula(detail::make_node<FormulaNode>(FormulaForall{std::move(var), std::move(body)}));
}
inline Formula Formula::diamond(HybridGame game, Formula body) {
  return Formula(detail::make_node<FormulaNode>(FormulaDiamond{std::move(game), std::move(body)}));
}
inline Formula Formula::box(HybridGame game, Formula body) {
  return Formula(detail::make_node<FormulaNode>(FormulaBox{std::move(game), std::move(body)}));
}
inline Formula Formula::truth() { return Formula(detail::make_node<FormulaNode>(FormulaTrue{})); }
inline Formula Formula::falsity() { return Formula(detail::make_node<FormulaNode>(FormulaFalse{})); }

// ---------------------------------------------------------------------------
// Structural equality

bool operator==(const Term& a, const Term& b);
bool operator==(const Formula& a, const Formula& b);
bool operator==(const HybridGame& a, const HybridGame& b);
inline bool operator!=(const Term& a, const Term& b) { return !(a == b); }
inline bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }
inline bool operator!=(const HybridGame& a, const HybridGame& b) { return !(a == b); }

namespace detail {
inline bool term_vec_eq(const std::vector<Term>& a, const std::vector<Term>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!(a[i] == b[i])) return false;
  return true;
}
}  // namespace detail

inline bool operator==(const Term& a, const Term& b) {
  const auto& na = a.node().v;
  const auto& nb = b.node().v;
  if (na.index() != nb.index()) return false;
  return std::visit(
      detail::Overload{
          [&](const TermVar& x) { return x.var == std::get<TermVar>(nb).var; },
          [&](const TermNumber& x) { return x.value == std::get<TermNumber>(nb).value; },
          [&](const TermFuncApp& x) {
            const auto& y = std::get<TermFuncApp>(nb);
            return x.head == y.head && detail::term_vec_eq(x.args, y.args);
          },
          [&](const TermDot& x) { return x.index == std::get<TermDot>(nb).index; },
          [&](const TermPlus& x) {
            const auto& y = std::get<TermPlus>(nb);
            return x.lhs == y.lhs && x.rhs == y.rhs;
          },
          [&](const TermTimes& x) {
            const auto& y = std::get<TermTimes>(nb);
            return x.lhs == y.lhs && x.rhs == y.rhs;
          },
          [&](const TermDifferential& x) { return x.arg == std::get<TermDifferential>(nb).arg; },
          [&](const TermMinus& x) {
            const auto& y = std::get<TermMinus>(nb);
            return x.lhs == y.lhs && x.rhs == y.rhs;
          },
          [&](const TermNeg& x) { return x.arg == std::get<TermNeg>(nb).arg; },
          [&](const TermPower& x) {
            const auto& y = std::get<TermPower>(nb);
            return x.exponent == y.exponent && x.base == y.base;
          },
      },
      na);
}

inline bool operator==(const HybridGame& a, const HybridGame& b) {
  const auto& na = a.node().v;
  const auto& nb = b.node().v;
  if (na.index() != nb.index()) return false;
  return std::visit(
      detail::Overload{
          [&](const GameSym& x) { return x.head == std::get<GameSym>(nb).head; },
          [&](const GameAssign& x) {
            const auto& y = std::get<GameAssign>(nb);
            return x.var == y.var && x.value == y.value;
          },
          [&](const GameOde& x) {
            const auto& y = std::get<GameOde>(nb);
            return x.base == y.base && x.rhs == y.rhs && x.domain == y.domain;
          },
          [&](const GameTest& x) { return x.condition == std::get<GameTest>(nb).condition; },
          [&](const GameChoice& x) {
            const auto& y = std::get<GameChoice>(nb);
            return x.lhs == y.lhs && x.rhs == y.rhs;
          },
          [&](const GameSeq& x) {
            const auto& y = std::get<GameSeq>(nb);
            return x.lhs == y.lhs && x.rhs == y.rhs;
          },
          [&](const GameRepeat& x) { return x.body == std::get<GameRepeat>(nb).body; },
          [&](const GameDual& x) { return x.body == std::get<GameDual>(nb).body; },
      },
      na);
}

inline bool operator==(const Formula& a, const Formula& b) {
  const auto& na = a.node().v;
  const auto& nb = b.node().v;
  if (na.index() != nb.index()) return false;
  auto cmp2 = [](const auto& x, const auto& y) { return x.lhs == y.lhs && x.rhs == y.rhs; };
  return std::visit(
      detail::Overload{
          [&](const FormulaGeq& x) { return cmp2(x, std::get<FormulaGeq>(nb)); },
          [&](const FormulaLeq& x) { return cmp2(x, std::get<FormulaLeq>(nb)); },
          [&](const FormulaGt& x) { return cmp2(x, std::get<FormulaGt>(nb)); },
          [&](const FormulaLt& x) { return cmp2(x, std::get<FormulaLt>(nb)); },
          [&](const FormulaEq& x) { return cmp2(x, std::get<FormulaEq>(nb)); },
          [&](const FormulaNeq& x) { return cmp2(x, std::get<FormulaNeq>(nb)); },
          [&](const FormulaPredApp& x) {
            const auto& y = std::get<FormulaPredApp>(nb);
            return x.head == y.head && detail::term_vec_eq(x.args, y.args);
          },
          [&](const FormulaPredicational& x) {
            return x.head == std::get<FormulaPredicational>(nb).head;
          },
          [&](const FormulaNot& x) { return x.arg == std::get<FormulaNot>(nb).arg; },
          [&](const FormulaAnd& x) { return cmp2(x, std::get<FormulaAnd>(nb)); },
          [&](const FormulaOr& x) { return cmp2(x, std::get<FormulaOr>(nb)); },
          [&](const FormulaImply& x) { return cmp2(x, std::get<FormulaImply>(nb)); },
          [&](const FormulaEquiv& x) { return cmp2(x, std::get<FormulaEquiv>(nb)); },
          [&](const FormulaExists& x) {
            const auto& y = std::get<FormulaExists>(nb);
            return x.var == y.var && x.body == y.body;
          },
          [&](const FormulaForall& x) {
            const auto& y = std::get<FormulaForall>(nb);
            return x.var == y.var && x.body == y.body;
          },
          [&](const FormulaDiamond& x) {
            const auto& y = std::get<FormulaDiamond>(nb);
            return x.game == y.game && x.body == y.body;
          },
          [&](const FormulaBox& x) {
            const auto& y = std::get<FormulaBox>(nb);
            return x.game == y.game && x.body == y.body;
          },
          [&](const FormulaTrue&) { return true; },
          [&](const FormulaFalse&) { return true; },
      },
      na);
}

// ---------------------------------------------------------------------------
// Sugar expansion. The result uses only the primitive constructors:
// Var/Number/FuncApp/Dot/Plus/Times/Differential for terms,
// Geq/PredApp/Predicational/Not/And/Exists/Diamond/True/False for formulas,
// and all eight game constructors.

Term desugar(const Term& t);
Formula desugar(const Formula& f);
HybridGame desugar(const HybridGame& g);

inline Term desugar(const Term& t) {
  return std::visit(
      detail::Overload{
          [&](const TermVar&) { return t; },
          [&](const TermNumber&) { return t; },
          [&](const TermFuncApp& x) {
            std::vector<Term> args;
            args.reserve(x.args.size());
            for (const Term& a : x.args) args.push_back(desugar(a));
            return Term::func(x.head, std::move(args));
          },
          [&](const TermDot&) { return t; },
          [&](const TermPlus& x) { return Term::plus(desugar(x.lhs), desugar(x.rhs)); },
          [&](const TermTimes& x) { return Term::times(desugar(x.lhs), desugar(x.rhs)); },
          [&](const TermDifferential& x) { return Term::differential(desugar(x.arg)); },
          [&](const TermMinus& x) {
            return Term::plus(desugar(x.lhs), Term::times(Term::number(-1), desugar(x.rhs)));
          },
          [&](const TermNeg& x) { return Term::times(Term::number(-1), desugar(x.arg)); },
          [&](const TermPower& x) {
            if (x.exponent == 0) return Term::number(1);
            Term base = desugar(x.base);
            Term acc = base;
            for (unsigned i = 1; i < x.exponent; ++i) acc = Term::times(acc, base);
            return acc;
          },
      },
      t.node().v);
}

inline HybridGame desugar(const HybridGame& g) {
  return std::visit(
      detail::Overload{
          [&](const GameSym&) { return g; },
          [&](const GameAssign& x) { return HybridGame::assign(x.var, desugar(x.value)); },
          [&](const GameOde& x) { return HybridGame::ode(x.base, desugar(x.rhs), desugar(x.domain)); },
          [&](const GameTest& x) { return HybridGame::test(desugar(x.condition)); },
          [&](const GameChoice& x) { return HybridGame::choice(desugar(x.lhs), desugar(x.rhs)); },
          [&](const GameSeq& x) { return HybridGame::seq(desugar(x.lhs), desugar(x.rhs)); },
          [&](const GameRepeat& x) { return HybridGame::repeat(desugar(x.body)); },
          [&](const GameDual& x) { return HybridGame::dual(desugar(x.body)); },
      },
      g.node().v);
}

inline Formula desugar(const Formula& f) {
  auto imp = [](Formula a, Formula b) {
    return Formula::not_(Formula::and_(std::move(a), Formula::not_(std::move(b))));
  };
  return std::visit(
      detail::Overload{
          [&](const FormulaGeq& x) { return Formula::geq(desugar(x.lhs), desugar(x.rhs)); },
          [&](const FormulaLeq& x) { return Formula::geq(desugar(x.rhs), desugar(x.lhs)); },
          [&](const FormulaGt& x) {
            return Formula::not_(Formula::geq(desugar(x.rhs), desugar(x.lhs)));
          },
          [&](const FormulaLt& x) {
            return Formula::not_(Formula::geq(desugar(x.lhs), desugar(x.rhs)));
          },
          [&](const FormulaEq& x) {
            Term l = desugar(x.lhs), r = desugar(x.rhs);
            return Formula::and_(Formula::geq(l, r), Formula::geq(r, l));
          },
          [&](const FormulaNeq& x) {
            Term l = desugar(x.lhs), r = desugar(x.rhs);
            return Formula::not_(Formula::and_(Formula::geq(l, r), Formula::geq(r, l)));
          },
          [&](const FormulaPredApp& x) {
            std::vector<Term> args;
            args.reserve(x.args.size());
            for (const Term& a : x.args) args.push_back(desugar(a));
            return Formula::pred(x.head, std::move(args));
          },
          [&](const FormulaPredicational&) { return f; },
          [&](const FormulaNot& x) { return Formula::not_(desugar(x.arg)); },
          [&](const FormulaAnd& x) { return Formula::and_(desugar(x.lhs), desugar(x.rhs)); },
          [&](const FormulaOr& x) {
            return Formula::not_(
                Formula::and_(Formula::not_(desugar(x.lhs)), Formula::not_(desugar(x.rhs))));
          },
          [&](const FormulaImply& x) { return imp(desugar(x.lhs), desugar(x.rhs)); },
          [&](const FormulaEquiv& x) {
            Formula l = desugar(x.lhs), r = desugar(x.rhs);
            return Formula::and_(imp(l, r), imp(r, l));
          },
          [&](const FormulaExists& x) { return Formula::exists(x.var, desugar(x.body)); },
          [&](const FormulaForall& x) {
            return Formula::not_(Formula::exists(x.var, Formula::not_(desugar(x.body))));
          },
          [&](const FormulaDiamond& x) { return Formula::diamond(desugar(x.game), desugar(x.body)); },
          [&](const FormulaBox& x) {
            return Formula::not_(Formula::diamond(desugar(x.game), Formula::not_(desugar(x.body))));
          },
          [&](const FormulaTrue&) { return f; },
          [&](const FormulaFalse&) { return f; },
      },
      f.node().v);
}

}  // namespace dgl
