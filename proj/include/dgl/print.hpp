#pragma once

#include <string>

#include "dgl/syntax.hpp"

// Pretty-printer with minimal parenthesization under the grammar's
// precedence table. parse(print(e)) is structurally identical to e for every
// well-formed AST. Terms print without spaces; formula connectives print with
// single spaces; game combinators ";" and "++" print with single spaces.

namespace dgl {

namespace printing {

// higher value = binds tighter
inline constexpr int kSum = 1, kProd = 2, kUnary = 3, kPost = 4, kAtomT = 5;
inline constexpr int kChoice = 1, kSeq = 2, kGPost = 3, kGAtom = 4;
inline constexpr int kEquiv = 1, kImply = 2, kOr = 3, kAnd = 4, kLit = 5;

std::string term_prec(const Term& t, int min_prec);
std::string game_prec(const HybridGame& g, int min_prec);
std::string formula_prec(const Formula& f, int min_prec);

inline std::string number_text(const Rational& r) {
  auto s = format_decimal(r);
  if (!s) throw DglError("rational " + format_rational(r) + " has no exact decimal literal");
  return *s;
}

inline std::string wrap(bool need, const std::string& s, char open = '(', char close = ')') {
  if (!need) return s;
  return std::string(1, open) + s + std::string(1, close);
}

inline std::string term_prec(const Term& t, int min_prec) {
  using detail::Overload;
  return std::visit(
      Overload{
          [&](const TermVar& x) { return to_string(x.var); },
          [&](const TermNumber& x) {
            // negative literals bind like unary minus
            int prec = x.value < 0 ? kUnary : kAtomT;
            return wrap(prec < min_prec, number_text(x.value));
          },
          [&](const TermFuncApp& x) {
            std::string s = x.head + "(";
            for (size_t i = 0; i < x.args.size(); ++i) {
              if (i) s += ",";
              s += term_prec(x.args[i], 0);
            }
            return s + ")";
          },
          [&](const TermDot& x) {
            return x.index == 0 ? std::string(".") : "." + std::to_string(x.index);
          },
          [&](const TermPlus& x) {
            return wrap(kSum < min_prec,
                        term_prec(x.lhs, kSum) + "+" + term_prec(x.rhs, kSum + 1));
          },
          [&](const TermMinus& x) {
            return wrap(kSum < min_prec,
                        term_prec(x.lhs, kSum) + "-" + term_prec(x.rhs, kSum + 1));
          },
          [&](const TermTimes& x) {
            return wrap(kProd < min_prec,
                        term_prec(x.lhs, kProd) + "*" + term_prec(x.rhs, kProd + 1));
          },
          [&](const TermNeg& x) {
            // parenthesize a literal operand so "-(5)" does not re-read as -5
            bool lit = x.arg.get_if<TermNumber>() != nullptr;
            std::string inner = lit ? "(" + term_prec(x.arg, 0) + ")" : term_prec(x.arg, kUnary);
            return wrap(kUnary < min_prec, "-" + inner);
          },
          [&](const TermPower& x) {
            return wrap(kPost < min_prec,
                        term_prec(x.base, kAtomT) + "^" + std::to_string(x.exponent));
          },
          [&](const TermDifferential& x) {
            return wrap(kPost < min_prec, "(" + term_prec(x.arg, 0) + ")'");
          },
      },
      t.node().v);
}

inline std::string game_prec(const HybridGame& g, int min_prec) {
  using detail::Overload;
  return std::visit(
      Overload{
          [&](const GameSym& x) { return x.head; },
          [&](const GameAssign& x) { return to_string(x.var) + ":=" + term_prec(x.value, 0); },
          [&](const GameOde& x) {
            std::string s = "{" + to_string(x.base) + "'=" + term_prec(x.rhs, 0);
            if (!x.domain.get_if<FormulaTrue>()) s += " & " + formula_prec(x.domain, 0);
            return s + "}";
          },
          [&](const GameTest& x) { return "?" + formula_prec(x.condition, 0); },
          [&](const GameChoice& x) {
            return wrap(kChoice < min_prec,
                        game_prec(x.lhs, kChoice) + " ++ " + game_prec(x.rhs, kChoice + 1), '{', '}');
          },
          [&](const GameSeq& x) {
            return wrap(kSeq < min_prec,
                        game_prec(x.lhs, kSeq) + " ; " + game_prec(x.rhs, kSeq + 1), '{', '}');
          },
          [&](const GameRepeat& x) {
            return wrap(kGPost < min_prec, game_prec(x.body, kGPost) + "*", '{', '}');
          },
          [&](const GameDual& x) {
            return wrap(kGPost < min_prec, game_prec(x.body, kGPost) + "^d", '{', '}');
          },
      },
      g.node().v);
}

inline bool is_comparison(const Formula& f) {
  return f.get_if<FormulaGeq>() || f.get_if<FormulaLeq>() || f.get_if<FormulaGt>() ||
         f.get_if<FormulaLt>() || f.get_if<FormulaEq>() || f.get_if<FormulaNeq>();
}

// Quantifier bodies that are bare comparisons are printed parenthesized;
// everything lit-shaped (modalities, negations, atoms) prints bare.
inline std::string binder_body(const Formula& body) {
  if (is_comparison(body)) return "(" + formula_prec(body, 0) + ")";
  return formula_prec(body, kLit);
}

inline std::string formula_prec(const Formula& f, int min_prec) {
  using detail::Overload;
  auto cmp = [&](const Term& l, const char* op, const Term& r) {
    return wrap(kLit < min_prec, term_prec(l, 0) + op + term_prec(r, 0));
  };
  return std::visit(
      Overload{
          [&](const FormulaGeq& x) { return cmp(x.lhs, ">=", x.rhs); },
          [&](const FormulaLeq& x) { return cmp(x.lhs, "<=", x.rhs); },
          [&](const FormulaGt& x) { return cmp(x.lhs, ">", x.rhs); },
          [&](const FormulaLt& x) { return cmp(x.lhs, "<", x.rhs); },
          [&](const FormulaEq& x) { return cmp(x.lhs, "=", x.rhs); },
          [&](const FormulaNeq& x) { return cmp(x.lhs, "!=", x.rhs); },
          [&](const FormulaPredApp& x) {
            std::string s = x.head + "(";
            for (size_t i = 0; i < x.args.size(); ++i) {
              if (i) s += ",";
              s += term_prec(x.args[i], 0);
            }
            return s + ")";
          },
          [&](const FormulaPredicational& x) { return x.head + "(||)"; },
          [&](const FormulaNot& x) { return wrap(kLit < min_prec, "!" + formula_prec(x.arg, kLit)); },
          [&](const FormulaAnd& x) {
            return wrap(kAnd < min_prec,
                        formula_prec(x.lhs, kAnd) + " & " + formula_prec(x.rhs, kAnd + 1));
          },
          [&](const FormulaOr& x) {
            return wrap(kOr < min_prec,
                        formula_prec(x.lhs, kOr) + " | " + formula_prec(x.rhs, kOr + 1));
          },
          [&](const FormulaImply& x) {
            return wrap(kImply < min_prec,
                        formula_prec(x.lhs, kOr) + " -> " + formula_prec(x.rhs, kImply));
          },
          [&](const FormulaEquiv& x) {
            return wrap(kEquiv < min_prec,
                        formula_prec(x.lhs, kEquiv) + " <-> " + formula_prec(x.rhs, kEquiv + 1));
          },
          [&](const FormulaExists& x) {
            return wrap(kLit < min_prec, "\\exists " + to_string(x.var) + " " + binder_body(x.body));
          },
          [&](const FormulaForall& x) {
            return wrap(kLit < min_prec, "\\forall " + to_string(x.var) + " " + binder_body(x.body));
          },
          [&](const FormulaDiamond& x) {
            return wrap(kLit < min_prec,
                        "<" + game_prec(x.game, 0) + "> " + formula_prec(x.body, kLit));
          },
          [&](const FormulaBox& x) {
            return wrap(kLit < min_prec,
                        "[" + game_prec(x.game, 0) + "] " + formula_prec(x.body, kLit));
          },
          [&](const FormulaTrue&) { return std::string("true"); },
          [&](const FormulaFalse&) { return std::string("false"); },
      },
      f.node().v);
}

}  // namespace printing

inline std::string print(const Term& t) { return printing::term_prec(t, 0); }
inline std::string print(const Formula& f) { return printing::formula_prec(f, 0); }
inline std::string print(const HybridGame& g) { return printing::game_prec(g, 0); }

}  // namespace dgl
