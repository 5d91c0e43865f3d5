#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dgl/syntax.hpp"

// Concrete grammar (ASCII), one parser for all three categories:
//
//   term    := sum;  sum := prod (("+"|"-") prod)*;  prod := unary ("*" unary)*
//   unary   := "-" unary | post;  post := atom ["^" NAT] ["'"]
//   atom    := NUMBER | IDENT ["'"] | IDENT "(" [term ("," term)*] ")"
//            | "." [NAT] | "(" term ")"
//   game    := choice;  choice := seq ("++" seq)*;  seq := gpost (";" gpost)*
//   gpost   := gatom ("*" | "^d")*
//   gatom   := IDENT | IDENT ["'"] ":=" term | "?" formula
//            | "{" IDENT "'" "=" term ["&" formula] "}" | "{" game "}"
//   formula := equiv;  equiv := impl ("<->" impl)*;  impl := disj ["->" impl]
//   disj    := conj ("|" conj)*;  conj := lit ("&" lit)*
//   lit     := "!" lit | "\exists" IDENT lit | "\forall" IDENT lit
//            | "<" game ">" lit | "[" game "]" lit | cmp | "true" | "false"
//            | IDENT "(||)" | IDENT "(" [term ("," term)*] ")" | "(" formula ")"
//   cmp     := term (">="|"<="|">"|"<"|"="|"!=") term
//
// "#" starts a comment running to end of line. The reserved dot tokens
// "." ".0" ".1" ... only parse when ParseOptions.allow_dots is set (they are
// legal in substitution replacements, never in user expressions).

namespace dgl {

struct ParseError : DglError {
  int line = 0, col = 0;
  ParseError(const std::string& msg, int line_, int col_)
      : DglError(msg + " (line " + std::to_string(line_) + ", column " + std::to_string(col_) + ")"),
        line(line_),
        col(col_) {}
};

enum class TokKind {
  Ident,    // carries primes (0 or 1)
  Number,   // nonnegative rational literal
  Dot,      // "." or ".N"
  Plus, Minus, Star, Caret, Prime,
  LParen, RParen, LBrace, RBrace, LBrack, RBrack,
  Comma, Semi, DSemi, ChoiceOp, DualOp, AssignOp, Quest,
  Lt, Gt, Le, Ge, EqCmp, Neq, Bang, Amp, Pipe, DPipe,
  Imply, Equiv, Exists, Forall, Colon, TildeArrow,
  End,
};

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  Rational num;
  int dot_index = 0;
  int primes = 0;
  int line = 1, col = 1;
};

inline bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
inline bool is_ident_char(char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9') || c == '_';
}
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto push = [&](TokKind k, std::string text, int l, int c) {
    Token t;
    t.kind = k;
    t.text = std::move(text);
    t.line = l;
    t.col = c;
    out.push_back(std::move(t));
  };
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (src[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  while (i < src.size()) {
    char c = src[i];
    int l = line, cl = col;
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (is_ident_start(c)) {
      size_t j = i;
      while (j < src.size() && is_ident_char(src[j])) ++j;
      std::string name(src.substr(i, j - i));
      int primes = 0;
      while (j < src.size() && src[j] == '\'') {
        ++primes;
        ++j;
      }
      if (primes > 1) throw ParseError("variables with primes >= 2 are not supported", l, cl);
      Token t;
      t.kind = TokKind::Ident;
      t.text = std::move(name);
      t.primes = primes;
      t.line = l;
      t.col = cl;
      out.push_back(std::move(t));
      advance(j - i);
      continue;
    }
    if (is_digit(c)) {
      size_t j = i;
      while (j < src.size() && is_digit(src[j])) ++j;
      if (j < src.size() && src[j] == '.' && j + 1 < src.size() && is_digit(src[j + 1])) {
        ++j;
        while (j < src.size() && is_digit(src[j])) ++j;
      }
      std::string text(src.substr(i, j - i));
      auto r = parse_rational(text);
      if (!r) throw ParseError("bad number literal '" + text + "'", l, cl);
      Token t;
      t.kind = TokKind::Number;
      t.text = std::move(text);
      t.num = *r;
      t.line = l;
      t.col = cl;
      out.push_back(std::move(t));
      advance(j - i);
      continue;
    }
    if (c == '.') {
      size_t j = i + 1;
      int idx = 0;
      bool have = false;
      while (j < src.size() && is_digit(src[j])) {
        idx = idx * 10 + (src[j] - '0');
        have = true;
        ++j;
      }
      Token t;
      t.kind = TokKind::Dot;
      t.text = std::string(src.substr(i, j - i));
      t.dot_index = have ? idx : 0;
      t.line = l;
      t.col = cl;
      out.push_back(std::move(t));
      advance(j - i);
      continue;
    }
    if (c == '\\') {
      size_t j = i + 1;
      while (j < src.size() && is_ident_char(src[j])) ++j;
      std::string kw(src.substr(i + 1, j - i - 1));
      if (kw == "exists")
        push(TokKind::Exists, "\\exists", l, cl);
      else if (kw == "forall")
        push(TokKind::Forall, "\\forall", l, cl);
      else
        throw ParseError("unknown keyword '\\" + kw + "'", l, cl);
      advance(j - i);
      continue;
    }
    auto two = [&](char a, char b) {
      return c == a && i + 1 < src.size() && src[i + 1] == b;
    };
    if (c == '<' && i + 2 < src.size() && src[i + 1] == '-' && src[i + 2] == '>') {
      push(TokKind::Equiv, "<->", l, cl);
      advance(3);
    } else if (two('<', '=')) {
      push(TokKind::Le, "<=", l, cl);
      advance(2);
    } else if (two('>', '=')) {
      push(TokKind::Ge, ">=", l, cl);
      advance(2);
    } else if (two('-', '>')) {
      push(TokKind::Imply, "->", l, cl);
      advance(2);
    } else if (two('!', '=')) {
      push(TokKind::Neq, "!=", l, cl);
      advance(2);
    } else if (two('+', '+')) {
      push(TokKind::ChoiceOp, "++", l, cl);
      advance(2);
    } else if (two(';', ';')) {
      push(TokKind::DSemi, ";;", l, cl);
      advance(2);
    } else if (two('|', '|')) {
      push(TokKind::DPipe, "||", l, cl);
      advance(2);
    } else if (two(':', '=')) {
      push(TokKind::AssignOp, ":=", l, cl);
      advance(2);
    } else if (two('~', '>')) {
      push(TokKind::TildeArrow, "~>", l, cl);
      advance(2);
    } else if (two('^', 'd') && (i + 2 >= src.size() || !is_ident_char(src[i + 2]))) {
      push(TokKind::DualOp, "^d", l, cl);
      advance(2);
    } else {
      TokKind k;
      switch (c) {
        case '+': k = TokKind::Plus; break;
        case '-': k = TokKind::Minus; break;
        case '*': k = TokKind::Star; break;
        case '^': k = TokKind::Caret; break;
        case '\'': k = TokKind::Prime; break;
        case '(': k = TokKind::LParen; break;
        case ')': k = TokKind::RParen; break;
        case '{': k = TokKind::LBrace; break;
        case '}': k = TokKind::RBrace; break;
        case '[': k = TokKind::LBrack; break;
        case ']': k = TokKind::RBrack; break;
        case ',': k = TokKind::Comma; break;
        case ';': k = TokKind::Semi; break;
        case '?': k = TokKind::Quest; break;
        case '<': k = TokKind::Lt; break;
        case '>': k = TokKind::Gt; break;
        case '=': k = TokKind::EqCmp; break;
        case '!': k = TokKind::Bang; break;
        case '&': k = TokKind::Amp; break;
        case '|': k = TokKind::Pipe; break;
        case ':': k = TokKind::Colon; break;
        default:
          throw ParseError(std::string("unexpected character '") + c + "'", l, cl);
      }
      push(k, std::string(1, c), l, cl);
      advance(1);
    }
  }
  Token end;
  end.kind = TokKind::End;
  end.line = line;
  end.col = col;
  out.push_back(std::move(end));
  return out;
}

struct ParseOptions {
  bool allow_dots = false;
};

// Backtracking recursive-descent parser over a pre-lexed token stream.
// Alternatives are tried in grammar order; the error reported on overall
// failure is the one from the furthest position reached.
class Parser {
 public:
  Parser(std::vector<Token> toks, ParseOptions opts = {})
      : toks_(std::move(toks)), opts_(opts) {}

  static Parser of(std::string_view src, ParseOptions opts = {}) {
    return Parser(tokenize(src), opts);
  }

  Term term() {
    Term t = p_term();
    expect_end();
    return t;
  }
  Formula formula() {
    Formula f = p_formula();
    expect_end();
    return f;
  }
  HybridGame game() {
    HybridGame g = p_game();
    expect_end();
    return g;
  }

  // Prefix entry points for embedding expressions in larger file formats.
  Term p_term() { return p_sum(); }
  Formula p_formula() { return p_equiv(); }
  HybridGame p_game() { return p_choice(); }

  const Token& peek(size_t ahead = 0) const {
    size_t k = pos_ + ahead;
    return k < toks_.size() ? toks_[k] : toks_.back();
  }
  bool at_end() const { return peek().kind == TokKind::End; }
  size_t position() const { return pos_; }
  void set_position(size_t p) { pos_ = p; }

  bool accept(TokKind k) {
    if (peek().kind == k) {
      ++pos_;
      return true;
    }
    return false;
  }
  const Token& expect(TokKind k, const std::string& what) {
    if (peek().kind != k) fail("expected " + what);
    return toks_[pos_++];
  }
  void expect_end() {
    if (!at_end()) fail("unexpected trailing input");
  }
  [[noreturn]] void fail(const std::string& msg) {
    const Token& t = peek();
    std::string shown = t.kind == TokKind::End ? "end of input" : "'" + t.text + "'";
    if (pos_ >= far_pos_) {
      far_pos_ = pos_;
      far_msg_ = msg + ", found " + shown;
      far_line_ = t.line;
      far_col_ = t.col;
    }
    throw ParseError(far_msg_, far_line_, far_col_);
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  ParseOptions opts_;
  bool app_before_cmp_ = false;
  size_t far_pos_ = 0;
  std::string far_msg_;
  int far_line_ = 1, far_col_ = 1;

  // --- terms ---------------------------------------------------------------

  Term p_sum() {
    Term t = p_prod();
    for (;;) {
      size_t save = pos_;
      if (accept(TokKind::Plus)) {
        try {
          t = Term::plus(t, p_prod());
        } catch (ParseError&) {
          pos_ = save;
          break;
        }
      } else if (accept(TokKind::Minus)) {
        try {
          t = Term::minus(t, p_prod());
        } catch (ParseError&) {
          pos_ = save;
          break;
        }
      } else {
        break;
      }
    }
    return t;
  }

  Term p_prod() {
    Term t = p_unary();
    for (;;) {
      size_t save = pos_;
      if (!accept(TokKind::Star)) break;
      try {
        t = Term::times(t, p_unary());
      } catch (ParseError&) {
        pos_ = save;
        break;
      }
    }
    return t;
  }

  Term p_unary() {
    if (accept(TokKind::Minus)) {
      // A bare numeric literal directly under unary minus folds into a
      // negative Number so that negative constants round-trip.
      if (peek().kind == TokKind::Number && peek(1).kind != TokKind::Caret &&
          peek(1).kind != TokKind::Prime) {
        Rational v = peek().num;
        ++pos_;
        return Term::number(Rational(-v));
      }
      return Term::neg(p_unary());
    }
    return p_post();
  }

  Term p_post() {
    Term t = p_atom();
    if (peek().kind == TokKind::Caret) {
      size_t save = pos_;
      ++pos_;
      if (peek().kind == TokKind::Number && denominator(peek().num) == 1 && peek().num >= 0 &&
          peek().num <= 1000000) {
        unsigned e = static_cast<unsigned>(numerator(peek().num).convert_to<unsigned long>());
        ++pos_;
        t = Term::power(t, e);
      } else {
        pos_ = save;
      }
    }
    if (accept(TokKind::Prime)) t = Term::differential(t);
    return t;
  }

  Term p_atom() {
    const Token& t = peek();
    switch (t.kind) {
      case TokKind::Number: {
        ++pos_;
        return Term::number(t.num);
      }
      case TokKind::Ident: {
        std::string name = t.text;
        int primes = t.primes;
        ++pos_;
        if (primes == 0 && peek().kind == TokKind::LParen) {
          ++pos_;
          std::vector<Term> args;
          if (peek().kind != TokKind::RParen) {
            args.push_back(p_term());
            while (accept(TokKind::Comma)) args.push_back(p_term());
          }
          expect(TokKind::RParen, "')'");
          return Term::func(std::move(name), std::move(args));
        }
        return Term::var(std::move(name), primes);
      }
      case TokKind::Dot: {
        if (!opts_.allow_dots) fail("reserved '.' argument is not allowed here");
        int idx = t.dot_index;
        ++pos_;
        return Term::dot(idx);
      }
      case TokKind::LParen: {
        ++pos_;
        Term inner = p_term();
        expect(TokKind::RParen, "')'");
        return inner;
      }
      default:
        fail("expected a term");
    }
  }

  // --- games ---------------------------------------------------------------

  HybridGame p_choice() {
    HybridGame g = p_gseq();
    for (;;) {
      size_t save = pos_;
      if (!accept(TokKind::ChoiceOp)) break;
      try {
        g = HybridGame::choice(g, p_gseq());
      } catch (ParseError&) {
        pos_ = save;
        break;
      }
    }
    return g;
  }

  HybridGame p_gseq() {
    HybridGame g = p_gpost();
    for (;;) {
      size_t save = pos_;
      if (!accept(TokKind::Semi)) break;
      try {
        g = HybridGame::seq(g, p_gpost());
      } catch (ParseError&) {
        pos_ = save;
        break;
      }
    }
    return g;
  }

  HybridGame p_gpost() {
    HybridGame g = p_gatom();
    for (;;) {
      if (accept(TokKind::Star))
        g = HybridGame::repeat(g);
      else if (accept(TokKind::DualOp))
        g = HybridGame::dual(g);
      else
        break;
    }
    return g;
  }

  HybridGame p_gatom() {
    const Token& t = peek();
    switch (t.kind) {
      case TokKind::Quest: {
        ++pos_;
        return HybridGame::test(p_formula());
      }
      case TokKind::Ident: {
        std::string name = t.text;
        int primes = t.primes;
        ++pos_;
        if (accept(TokKind::AssignOp))
          return HybridGame::assign(Variable{std::move(name), primes}, p_term());
        if (primes != 0) fail("game symbols cannot be primed");
        return HybridGame::sym(std::move(name));
      }
      case TokKind::LBrace: {
        // "{x' = rhs [& domain]}" is an ODE; anything else is a braced group.
        if (peek(1).kind == TokKind::Ident && peek(1).primes == 1 &&
            peek(2).kind == TokKind::EqCmp) {
          ++pos_;
          Variable base{peek().text, 0};
          ++pos_;
          ++pos_;  // '='
          Term rhs = p_term();
          Formula domain = Formula::truth();
          if (accept(TokKind::Amp)) domain = p_formula();
          expect(TokKind::RBrace, "'}'");
          return HybridGame::ode(std::move(base), std::move(rhs), std::move(domain));
        }
        ++pos_;
        HybridGame inner = p_game();
        expect(TokKind::RBrace, "'}'");
        return inner;
      }
      default:
        fail("expected a game");
    }
  }

  // --- formulas ------------------------------------------------------------

  Formula p_equiv() {
    Formula f = p_impl();
    for (;;) {
      size_t save = pos_;
      if (!accept(TokKind::Equiv)) break;
      try {
        f = Formula::equiv(f, p_impl());
      } catch (ParseError&) {
        pos_ = save;
        break;
      }
    }
    return f;
  }

  Formula p_impl() {
    Formula f = p_disj();
    size_t save = pos_;
    if (accept(TokKind::Imply)) {
      try {
        return Formula::imply(f, p_impl());
      } catch (ParseError&) {
        pos_ = save;
      }
    }
    return f;
  }

  Formula p_disj() {
    Formula f = p_conj();
    for (;;) {
      size_t save = pos_;
      if (!accept(TokKind::Pipe)) break;
      try {
        f = Formula::or_(f, p_conj());
      } catch (ParseError&) {
        pos_ = save;
        break;
      }
    }
    return f;
  }

  Formula p_conj() {
    Formula f = p_lit();
    for (;;) {
      size_t save = pos_;
      if (!accept(TokKind::Amp)) break;
      try {
        f = Formula::and_(f, p_lit());
      } catch (ParseError&) {
        pos_ = save;
        break;
      }
    }
    return f;
  }

  Variable p_quant_var() {
    const Token& t = expect(TokKind::Ident, "a variable");
    return Variable{t.text, t.primes};
  }

  Formula p_lit() {
    switch (peek().kind) {
      case TokKind::Bang: {
        ++pos_;
        return Formula::not_(p_lit());
      }
      case TokKind::Exists: {
        ++pos_;
        Variable v = p_quant_var();
        return Formula::exists(std::move(v), p_lit());
      }
      case TokKind::Forall: {
        ++pos_;
        Variable v = p_quant_var();
        return Formula::forall(std::move(v), p_lit());
      }
      case TokKind::Lt: {
        // A test inside the game may greedily read the closing '>' as a
        // comparison (as in "<?q()> p()"). First try the grammar-order parse;
        // if the modality then fails to close, retry with predicate
        // applications preferred over comparisons inside the game.
        size_t save = pos_;
        ++pos_;
        try {
          HybridGame g = p_game();
          expect(TokKind::Gt, "'>' closing the modality");
          return Formula::diamond(std::move(g), p_lit());
        } catch (ParseError&) {
          pos_ = save;
        }
        ++pos_;
        bool saved_order = app_before_cmp_;
        app_before_cmp_ = true;
        HybridGame g = [&] {
          try {
            HybridGame inner = p_game();
            app_before_cmp_ = saved_order;
            return inner;
          } catch (...) {
            app_before_cmp_ = saved_order;
            throw;
          }
        }();
        expect(TokKind::Gt, "'>' closing the modality");
        return Formula::diamond(std::move(g), p_lit());
      }
      case TokKind::LBrack: {
        ++pos_;
        HybridGame g = p_game();
        expect(TokKind::RBrack, "']' closing the modality");
        return Formula::box(std::move(g), p_lit());
      }
      default:
        break;
    }
    if (app_before_cmp_) {
      if (std::optional<Formula> f = try_atom_formula()) return *f;
      if (std::optional<Formula> f = try_cmp()) return *f;
    } else {
      if (std::optional<Formula> f = try_cmp()) return *f;
      if (std::optional<Formula> f = try_atom_formula()) return *f;
    }
    if (accept(TokKind::LParen)) {
      Formula inner = p_formula();
      expect(TokKind::RParen, "')'");
      return inner;
    }
    fail("expected a formula");
  }

  std::optional<Formula> try_cmp() {
    size_t save = pos_;
    try {
      Term lhs = p_term();
      TokKind op = peek().kind;
      switch (op) {
        case TokKind::Ge: ++pos_; return Formula::geq(lhs, p_term());
        case TokKind::Le: ++pos_; return Formula::leq(lhs, p_term());
        case TokKind::Gt: ++pos_; return Formula::gt(lhs, p_term());
        case TokKind::Lt: ++pos_; return Formula::lt(lhs, p_term());
        case TokKind::EqCmp: ++pos_; return Formula::eq(lhs, p_term());
        case TokKind::Neq: ++pos_; return Formula::neq(lhs, p_term());
        default:
          fail("expected a comparison operator");
      }
    } catch (ParseError&) {
      pos_ = save;
    }
    return std::nullopt;
  }

  std::optional<Formula> try_atom_formula() {
    if (peek().kind != TokKind::Ident) return std::nullopt;
    std::string name = peek().text;
    int primes = peek().primes;
    if (primes != 0) return std::nullopt;
    if (name == "true") {
      ++pos_;
      return Formula::truth();
    }
    if (name == "false") {
      ++pos_;
      return Formula::falsity();
    }
    if (peek(1).kind != TokKind::LParen) return std::nullopt;
    if (peek(2).kind == TokKind::DPipe && peek(3).kind == TokKind::RParen) {
      pos_ += 4;
      return Formula::predicational(std::move(name));
    }
    size_t save = pos_;
    pos_ += 2;
    try {
      std::vector<Term> args;
      if (peek().kind != TokKind::RParen) {
        args.push_back(p_term());
        while (accept(TokKind::Comma)) args.push_back(p_term());
      }
      expect(TokKind::RParen, "')'");
      return Formula::pred(std::move(name), std::move(args));
    } catch (ParseError&) {
      pos_ = save;
    }
    return std::nullopt;
  }
};

inline Term parse_term(std::string_view src, ParseOptions opts = {}) {
  return Parser::of(src, opts).term();
}
inline Formula parse_formula(std::string_view src, ParseOptions opts = {}) {
  return Parser::of(src, opts).formula();
}
inline HybridGame parse_game(std::string_view src, ParseOptions opts = {}) {
  return Parser::of(src, opts).game();
}

}  // namespace dgl
