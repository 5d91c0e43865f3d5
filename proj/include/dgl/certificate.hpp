#pragma once

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dgl/axioms.hpp"
#include "dgl/semantics.hpp"
#include "dgl/usubst.hpp"

// Proof certificates: a line-structured derivation whose steps are axiom
// lookup, uniform substitution (us), uniform renaming (ur), rule
// instantiation (usr), modus ponens (mp), universal generalization (gen),
// propositional consequence (prop), and real-arithmetic obligations (ra).
// The checker derives each line from earlier lines only; nothing enters the
// derived map except through one of these step kinds.

namespace dgl {

struct PropOverflow : DglError {
  explicit PropOverflow(size_t n)
      : DglError("propositional abstraction has " + std::to_string(n) + " atoms (limit 24)") {}
};
struct UnsupportedConstruct : DglError {
  explicit UnsupportedConstruct(const std::string& what)
      : DglError("not first-order real arithmetic: " + what) {}
};

// ---------------------------------------------------------------------------
// Propositional reasoning over abstracted atoms.
//
// Formulas are first brought into a normal form: sugar expanded, then double
// negations collapsed everywhere (including inside quantified and modal
// subformulas). Maximal non-propositional subformulas of the normal form are
// the atoms, identified up to structural equality. Collapsing !! keeps the
// abstraction sound (it is an equivalence, three-valued included) and lets
// dualities like \forall x !p == !\exists x p connect to their unnegated
// counterparts.

namespace detail {
Formula nn_collapse(const Formula& f);
HybridGame nn_collapse(const HybridGame& g);

inline HybridGame nn_collapse(const HybridGame& g) {
  return std::visit(
      Overload{
          [&](const GameSym&) { return g; },
          [&](const GameAssign&) { return g; },
          [&](const GameOde& x) {
            return HybridGame::ode(x.base, x.rhs, nn_collapse(x.domain));
          },
          [&](const GameTest& x) { return HybridGame::test(nn_collapse(x.condition)); },
          [&](const GameChoice& x) {
            return HybridGame::choice(nn_collapse(x.lhs), nn_collapse(x.rhs));
          },
          [&](const GameSeq& x) { return HybridGame::seq(nn_collapse(x.lhs), nn_collapse(x.rhs)); },
          [&](const GameRepeat& x) { return HybridGame::repeat(nn_collapse(x.body)); },
          [&](const GameDual& x) { return HybridGame::dual(nn_collapse(x.body)); },
      },
      g.node().v);
}

// operates on desugared formulas
inline Formula nn_collapse(const Formula& f) {
  return std::visit(
      Overload{
          [&](const FormulaNot& x) {
            Formula inner = nn_collapse(x.arg);
            if (const FormulaNot* nn = inner.get_if<FormulaNot>()) return nn->arg;
            return Formula::not_(inner);
          },
          [&](const FormulaAnd& x) { return Formula::and_(nn_collapse(x.lhs), nn_collapse(x.rhs)); },
          [&](const FormulaExists& x) { return Formula::exists(x.var, nn_collapse(x.body)); },
          [&](const FormulaDiamond& x) {
            return Formula::diamond(nn_collapse(x.game), nn_collapse(x.body));
          },
          [&](const auto&) { return f; },
      },
      f.node().v);
}
}  // namespace detail

inline Formula prop_normal(const Formula& f) { return detail::nn_collapse(desugar(f)); }

namespace detail {
inline bool is_prop_connective(const Formula& f) {
  return f.get_if<FormulaNot>() || f.get_if<FormulaAnd>() || f.get_if<FormulaTrue>() ||
         f.get_if<FormulaFalse>();
}

inline void collect_atoms(const Formula& nf, std::vector<Formula>& atoms) {
  if (const FormulaNot* x = nf.get_if<FormulaNot>()) {
    collect_atoms(x->arg, atoms);
    return;
  }
  if (const FormulaAnd* x = nf.get_if<FormulaAnd>()) {
    collect_atoms(x->lhs, atoms);
    collect_atoms(x->rhs, atoms);
    return;
  }
  if (nf.get_if<FormulaTrue>() || nf.get_if<FormulaFalse>()) return;
  for (const Formula& a : atoms)
    if (a == nf) return;
  atoms.push_back(nf);
}

inline bool prop_eval(const Formula& nf, const std::vector<Formula>& atoms,
                      const std::vector<bool>& vals) {
  if (const FormulaNot* x = nf.get_if<FormulaNot>()) return !prop_eval(x->arg, atoms, vals);
  if (const FormulaAnd* x = nf.get_if<FormulaAnd>())
    return prop_eval(x->lhs, atoms, vals) && prop_eval(x->rhs, atoms, vals);
  if (nf.get_if<FormulaTrue>()) return true;
  if (nf.get_if<FormulaFalse>()) return false;
  for (size_t i = 0; i < atoms.size(); ++i)
    if (atoms[i] == nf) return vals[i];
  throw DglError("internal: atom lost during propositional abstraction");
}
}  // namespace detail

// true iff (/\ hyps -> goal) is a propositional tautology over the atoms
inline bool prop_tautology(const Formula& goal, const std::vector<Formula>& hyps) {
  std::vector<Formula> n_hyps;
  n_hyps.reserve(hyps.size());
  for (const Formula& h : hyps) n_hyps.push_back(prop_normal(h));
  Formula n_goal = prop_normal(goal);

  std::vector<Formula> atoms;
  for (const Formula& h : n_hyps) detail::collect_atoms(h, atoms);
  detail::collect_atoms(n_goal, atoms);
  if (atoms.size() > 24) throw PropOverflow(atoms.size());

  const size_t n = atoms.size();
  std::vector<bool> vals(n);
  for (unsigned long long mask = 0; mask < (1ull << n); ++mask) {
    for (size_t i = 0; i < n; ++i) vals[i] = (mask >> i) & 1;
    bool hyps_hold = true;
    for (const Formula& h : n_hyps)
      if (!detail::prop_eval(h, atoms, vals)) {
        hyps_hold = false;
        break;
      }
    if (hyps_hold && !detail::prop_eval(n_goal, atoms, vals)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// SMT-LIB 2 emission for the real-arithmetic backend: declares the free
// variables as Real constants, asserts the negation, checks satisfiability.
// The solver answer "unsat" certifies validity of the original formula.

namespace detail {
inline std::string smt_symbol(const Variable& v) {
  if (v.primes == 0) return v.name;
  return "|" + to_string(v) + "|";
}

inline std::string smt_numeral(const Rational& r) {
  if (r < 0) return "(- " + smt_numeral(Rational(-r)) + ")";
  if (denominator(r) == 1) return numerator(r).str() + ".0";
  return "(/ " + numerator(r).str() + ".0 " + denominator(r).str() + ".0)";
}

inline std::string smt_term(const Term& t) {
  return std::visit(
      Overload{
          [&](const TermVar& x) { return smt_symbol(x.var); },
          [&](const TermNumber& x) { return smt_numeral(x.value); },
          [&](const TermFuncApp& x) -> std::string {
            throw UnsupportedConstruct("function symbol " + x.head);
          },
          [&](const TermDot&) -> std::string { throw UnsupportedConstruct("dot argument"); },
          [&](const TermPlus& x) { return "(+ " + smt_term(x.lhs) + " " + smt_term(x.rhs) + ")"; },
          [&](const TermTimes& x) { return "(* " + smt_term(x.lhs) + " " + smt_term(x.rhs) + ")"; },
          [&](const TermDifferential&) -> std::string {
            throw UnsupportedConstruct("differential");
          },
          [&](const TermMinus& x) { return "(- " + smt_term(x.lhs) + " " + smt_term(x.rhs) + ")"; },
          [&](const TermNeg& x) { return "(- " + smt_term(x.arg) + ")"; },
          [&](const TermPower& x) {
            if (x.exponent == 0) return std::string("1.0");
            std::string base = smt_term(x.base);
            std::string s = base;
            for (unsigned i = 1; i < x.exponent; ++i) s = "(* " + s + " " + base + ")";
            return s;
          },
      },
      t.node().v);
}

inline std::string smt_formula(const Formula& f) {
  auto cmp = [&](const char* op, const Term& l, const Term& r) {
    return "(" + std::string(op) + " " + smt_term(l) + " " + smt_term(r) + ")";
  };
  return std::visit(
      Overload{
          [&](const FormulaGeq& x) { return cmp(">=", x.lhs, x.rhs); },
          [&](const FormulaLeq& x) { return cmp("<=", x.lhs, x.rhs); },
          [&](const FormulaGt& x) { return cmp(">", x.lhs, x.rhs); },
          [&](const FormulaLt& x) { return cmp("<", x.lhs, x.rhs); },
          [&](const FormulaEq& x) { return cmp("=", x.lhs, x.rhs); },
          [&](const FormulaNeq& x) { return "(not " + cmp("=", x.lhs, x.rhs) + ")"; },
          [&](const FormulaPredApp& x) -> std::string {
            throw UnsupportedConstruct("predicate symbol " + x.head);
          },
          [&](const FormulaPredicational& x) -> std::string {
            throw UnsupportedConstruct("predicational " + x.head);
          },
          [&](const FormulaNot& x) { return "(not " + smt_formula(x.arg) + ")"; },
          [&](const FormulaAnd& x) {
            return "(and " + smt_formula(x.lhs) + " " + smt_formula(x.rhs) + ")";
          },
          [&](const FormulaOr& x) {
            return "(or " + smt_formula(x.lhs) + " " + smt_formula(x.rhs) + ")";
          },
          [&](const FormulaImply& x) {
            return "(=> " + smt_formula(x.lhs) + " " + smt_formula(x.rhs) + ")";
          },
          [&](const FormulaEquiv& x) {
            return "(= " + smt_formula(x.lhs) + " " + smt_formula(x.rhs) + ")";
          },
          [&](const FormulaExists& x) {
            return "(exists ((" + smt_symbol(x.var) + " Real)) " + smt_formula(x.body) + ")";
          },
          [&](const FormulaForall& x) {
            return "(forall ((" + smt_symbol(x.var) + " Real)) " + smt_formula(x.body) + ")";
          },
          [&](const FormulaDiamond&) -> std::string { throw UnsupportedConstruct("modality"); },
          [&](const FormulaBox&) -> std::string { throw UnsupportedConstruct("modality"); },
          [&](const FormulaTrue&) { return std::string("true"); },
          [&](const FormulaFalse&) { return std::string("false"); },
      },
      f.node().v);
}
}  // namespace detail

inline std::string smt_emit(const Formula& f) {
  VarSet fv = free_vars(f);  // finite: predicationals/games are rejected below anyway
  std::string body = detail::smt_formula(f);
  std::string script = "(set-logic NRA)\n";
  if (!fv.is_top())
    for (const Variable& v : fv.finite())
      script += "(declare-const " + detail::smt_symbol(v) + " Real)\n";
  script += "(assert (not " + body + "))\n(check-sat)\n";
  return script;
}

// Runs an external command template with the script on standard input and
// returns its standard output (first line is sat/unsat/unknown).
inline std::string run_smt_command(const std::string& command, const std::string& script) {
  namespace fs = std::filesystem;
  std::string base = (fs::temp_directory_path() / "dgl_smt_XXXXXX").string();
  std::vector<char> tmpl(base.begin(), base.end());
  tmpl.push_back('\0');
  int fd = mkstemp(tmpl.data());
  if (fd < 0) throw DglError("cannot create temporary file for SMT script");
  std::string in_path(tmpl.data());
  {
    std::ofstream out(in_path);
    out << script;
  }
  close(fd);
  std::string out_path = in_path + ".out";
  std::string full = "( " + command + " ) < " + in_path + " > " + out_path + " 2>/dev/null";
  int rc = std::system(full.c_str());
  (void)rc;  // the answer text decides, not the exit code
  std::string answer;
  {
    std::ifstream in(out_path);
    std::stringstream ss;
    ss << in.rdbuf();
    answer = ss.str();
  }
  std::error_code ec;
  fs::remove(in_path, ec);
  fs::remove(out_path, ec);
  return answer;
}

// ---------------------------------------------------------------------------
// Certificates

enum class RaBackend { Ground, Smt, Assume };

struct CertStep {
  enum class Kind { Axiom, Us, Ur, Usr, Mp, Gen, Prop, Ra };
  std::string label;
  Kind kind;
  std::string name;               // axiom or rule name
  UniformSubstitution subst;      // us, usr
  Variable var_a, var_b;          // ur: x y; gen: var_a
  std::vector<std::string> refs;  // cited labels
  Formula formula;                // prop and ra goals
  int line_no = 0;
};

struct ProofCertificate {
  std::vector<CertStep> steps;
  Formula claimed;
};

struct CheckResult {
  enum class Status { Verified, VerifiedModuloArithmetic, Rejected };
  Status status = Status::Rejected;
  Formula final_formula;             // set unless rejected
  std::vector<Formula> obligations;  // assume backend
  std::string rejected_label;
  std::string reason_code;  // clash | mismatch | arity | unknown-ref | prop-overflow | ra-failed
  std::string reason_detail;

  bool ok() const { return status != Status::Rejected; }
};

namespace detail {
inline std::string trim(std::string_view s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

inline bool valid_label(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!is_ident_char(c) && c != '-') return false;
  return true;
}

// splits off a brace-balanced {...} chunk starting at the first '{'
inline std::pair<std::string, std::string> split_braced(const std::string& s, int line_no) {
  size_t start = s.find('{');
  if (start == std::string::npos)
    throw ParseError("expected '{' starting a substitution", line_no, 1);
  int depth = 0;
  for (size_t i = start; i < s.size(); ++i) {
    if (s[i] == '{') ++depth;
    if (s[i] == '}') {
      --depth;
      if (depth == 0)
        return {s.substr(start, i - start + 1), trim(std::string_view(s).substr(i + 1))};
    }
  }
  throw ParseError("unbalanced '{' in substitution", line_no, 1);
}

inline std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

inline Variable parse_cert_variable(const std::string& word, int line_no) {
  std::string name = word;
  int primes = 0;
  while (!name.empty() && name.back() == '\'') {
    ++primes;
    name.pop_back();
  }
  if (name.empty() || !is_ident_start(name[0]) || primes > 1)
    throw ParseError("bad variable '" + word + "'", line_no, 1);
  for (char c : name)
    if (!is_ident_char(c)) throw ParseError("bad variable '" + word + "'", line_no, 1);
  return Variable{name, primes};
}
}  // namespace detail

inline ProofCertificate parse_certificate(std::string_view text) {
  ProofCertificate cert;
  bool have_claim = false;
  std::set<std::string> labels;

  size_t i = 0;
  int line_no = 0;
  while (i <= text.size()) {
    size_t end = text.find('\n', i);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(i, end - i);
    ++line_no;
    size_t next = end == text.size() ? text.size() + 1 : end + 1;
    i = next;

    if (size_t hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::string line = detail::trim(raw);
    if (line.empty()) continue;
    if (have_claim) throw ParseError("content after qed line", line_no, 1);

    size_t colon = line.find(':');
    if (colon == std::string::npos) throw ParseError("expected '<label>:'", line_no, 1);
    std::string label = detail::trim(std::string_view(line).substr(0, colon));
    std::string rest = detail::trim(std::string_view(line).substr(colon + 1));
    if (!detail::valid_label(label)) throw ParseError("bad label '" + label + "'", line_no, 1);

    if (label == "qed") {
      cert.claimed = Parser::of(rest).formula();
      have_claim = true;
      continue;
    }
    if (!labels.insert(label).second)
      throw ParseError("duplicate label '" + label + "'", line_no, 1);

    size_t sp = rest.find_first_of(" \t");
    std::string op = sp == std::string::npos ? rest : rest.substr(0, sp);
    std::string args = sp == std::string::npos ? "" : detail::trim(std::string_view(rest).substr(sp));

    CertStep step;
    step.label = label;
    step.line_no = line_no;

    if (op == "axiom") {
      step.kind = CertStep::Kind::Axiom;
      std::vector<std::string> words = detail::split_words(args);
      if (words.size() != 1) throw ParseError("usage: axiom <name>", line_no, 1);
      step.name = words[0];
    } else if (op == "us") {
      step.kind = CertStep::Kind::Us;
      auto [subst_text, tail] = detail::split_braced(args, line_no);
      step.subst = parse_substitution(subst_text);
      std::vector<std::string> words = detail::split_words(tail);
      if (words.size() != 1) throw ParseError("usage: us <subst> <label>", line_no, 1);
      step.refs = {words[0]};
    } else if (op == "ur") {
      step.kind = CertStep::Kind::Ur;
      std::vector<std::string> words = detail::split_words(args);
      if (words.size() != 3) throw ParseError("usage: ur <var> <var> <label>", line_no, 1);
      step.var_a = detail::parse_cert_variable(words[0], line_no);
      step.var_b = detail::parse_cert_variable(words[1], line_no);
      step.refs = {words[2]};
    } else if (op == "usr") {
      step.kind = CertStep::Kind::Usr;
      auto [subst_text, tail] = detail::split_braced(args, line_no);
      step.subst = parse_substitution(subst_text);
      std::vector<std::string> words = detail::split_words(tail);
      if (words.empty()) throw ParseError("usage: usr <subst> <rule> <label>*", line_no, 1);
      step.name = words[0];
      step.refs.assign(words.begin() + 1, words.end());
    } else if (op == "mp") {
      step.kind = CertStep::Kind::Mp;
      std::vector<std::string> words = detail::split_words(args);
      if (words.size() != 2) throw ParseError("usage: mp <label> <label>", line_no, 1);
      step.refs = words;
    } else if (op == "gen") {
      step.kind = CertStep::Kind::Gen;
      std::vector<std::string> words = detail::split_words(args);
      if (words.size() != 2) throw ParseError("usage: gen <var> <label>", line_no, 1);
      step.var_a = detail::parse_cert_variable(words[0], line_no);
      step.refs = {words[1]};
    } else if (op == "prop") {
      step.kind = CertStep::Kind::Prop;
      std::string formula_part, labels_part;
      if (size_t from = args.rfind(" from "); from != std::string::npos) {
        formula_part = args.substr(0, from);
        labels_part = args.substr(from + 6);
      } else if (args.ends_with(" from")) {
        formula_part = args.substr(0, args.size() - 5);
      } else {
        throw ParseError("usage: prop <formula> from <label>*", line_no, 1);
      }
      step.formula = Parser::of(formula_part).formula();
      step.refs = detail::split_words(labels_part);
    } else if (op == "ra") {
      step.kind = CertStep::Kind::Ra;
      step.formula = Parser::of(args).formula();
    } else {
      throw ParseError("unknown step kind '" + op + "'", line_no, 1);
    }
    cert.steps.push_back(std::move(step));
  }
  if (!have_claim) throw ParseError("certificate has no qed line", line_no, 1);
  if (cert.steps.empty()) throw ParseError("certificate has no steps", line_no, 1);
  return cert;
}

inline ProofCertificate parse_certificate_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DglError("cannot open certificate file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_certificate(ss.str());
}

namespace detail {
// matches lhs as "ante -> ?" modulo sugar expansion and !!-collapse,
// returning the consequent as written
inline std::optional<Formula> consume_implication(const Formula& impl_like, const Formula& ante) {
  auto matches = [&](const Formula& a) { return prop_normal(a) == prop_normal(ante); };
  if (const FormulaImply* x = impl_like.get_if<FormulaImply>())
    if (matches(x->lhs)) return x->rhs;
  if (const FormulaOr* x = impl_like.get_if<FormulaOr>())
    if (const FormulaNot* n = x->lhs.get_if<FormulaNot>())
      if (matches(n->arg)) return x->rhs;
  if (const FormulaNot* n = impl_like.get_if<FormulaNot>())
    if (const FormulaAnd* c = n->arg.get_if<FormulaAnd>())
      if (const FormulaNot* nb = c->rhs.get_if<FormulaNot>())
        if (matches(c->lhs)) return nb->arg;
  return std::nullopt;
}

inline bool is_quantifier_free_arithmetic(const Formula& f) {
  Formula d = desugar(f);
  bool ok = true;
  std::function<void(const Formula&)> walk = [&](const Formula& g) {
    std::visit(Overload{
                   [&](const FormulaGeq&) {},
                   [&](const FormulaNot& x) { walk(x.arg); },
                   [&](const FormulaAnd& x) {
                     walk(x.lhs);
                     walk(x.rhs);
                   },
                   [&](const FormulaTrue&) {},
                   [&](const FormulaFalse&) {},
                   [&](const auto&) { ok = false; },
               },
               g.node().v);
  };
  walk(d);
  return ok && signature(f).empty();
}
}  // namespace detail

inline CheckResult check_certificate(const ProofCertificate& cert, RaBackend backend,
                                     const std::string& smt_command = "",
                                     const AxiomBase& base = axiom_base()) {
  CheckResult result;
  std::map<std::string, Formula> derived;

  auto reject = [&](const CertStep& step, const std::string& code, const std::string& detail_msg) {
    result.status = CheckResult::Status::Rejected;
    result.rejected_label = step.label;
    result.reason_code = code;
    result.reason_detail = detail_msg;
    return result;
  };

  Formula last;
  for (const CertStep& step : cert.steps) {
    Formula out;
    auto lookup = [&](const std::string& label) -> const Formula* {
      auto it = derived.find(label);
      return it == derived.end() ? nullptr : &it->second;
    };

    switch (step.kind) {
      case CertStep::Kind::Axiom: {
        if (!base.has_axiom(step.name))
          return reject(step, "unknown-ref", "no axiom named " + step.name);
        out = base.axiom(step.name);
        break;
      }
      case CertStep::Kind::Us: {
        const Formula* src = lookup(step.refs[0]);
        if (!src) return reject(step, "unknown-ref", "no line " + step.refs[0]);
        auto applied = apply(step.subst, *src);
        if (const ClashError* clash = std::get_if<ClashError>(&applied))
          return reject(step, "clash", clash->message());
        out = std::get<Formula>(applied);
        break;
      }
      case CertStep::Kind::Ur: {
        const Formula* src = lookup(step.refs[0]);
        if (!src) return reject(step, "unknown-ref", "no line " + step.refs[0]);
        try {
          out = uniform_rename(step.var_a, step.var_b, *src);
        } catch (const DglError& e) {
          return reject(step, "mismatch", e.what());
        }
        break;
      }
      case CertStep::Kind::Usr: {
        if (!base.has_rule(step.name))
          return reject(step, "unknown-ref", "no rule named " + step.name);
        const Rule& rule = base.rule(step.name);
        VarSet fv = subst_free_vars(step.subst);
        if (!fv.is_empty())
          return reject(step, "mismatch",
                        "usr requires FV(sigma) = {}, but sigma introduces " + to_string(fv));
        if (rule.premises.size() != step.refs.size())
          return reject(step, "mismatch",
                        "rule " + step.name + " has " + std::to_string(rule.premises.size()) +
                            " premises, " + std::to_string(step.refs.size()) + " cited");
        for (size_t i = 0; i < rule.premises.size(); ++i) {
          const Formula* cited = lookup(step.refs[i]);
          if (!cited) return reject(step, "unknown-ref", "no line " + step.refs[i]);
          auto inst = apply(step.subst, rule.premises[i]);
          if (const ClashError* clash = std::get_if<ClashError>(&inst))
            return reject(step, "clash", clash->message());
          if (!(std::get<Formula>(inst) == *cited))
            return reject(step, "mismatch",
                          "premise " + std::to_string(i + 1) + " of " + step.name +
                              " instantiates to a different formula than line " + step.refs[i]);
        }
        auto concl = apply(step.subst, rule.conclusion);
        if (const ClashError* clash = std::get_if<ClashError>(&concl))
          return reject(step, "clash", clash->message());
        out = std::get<Formula>(concl);
        break;
      }
      case CertStep::Kind::Mp: {
        const Formula* minor = lookup(step.refs[0]);
        if (!minor) return reject(step, "unknown-ref", "no line " + step.refs[0]);
        const Formula* major = lookup(step.refs[1]);
        if (!major) return reject(step, "unknown-ref", "no line " + step.refs[1]);
        std::optional<Formula> consequent = detail::consume_implication(*major, *minor);
        if (!consequent)
          return reject(step, "mismatch",
                        "line " + step.refs[1] + " is not an implication from line " + step.refs[0]);
        out = *consequent;
        break;
      }
      case CertStep::Kind::Gen: {
        const Formula* src = lookup(step.refs[0]);
        if (!src) return reject(step, "unknown-ref", "no line " + step.refs[0]);
        out = Formula::forall(step.var_a, *src);
        break;
      }
      case CertStep::Kind::Prop: {
        std::vector<Formula> hyps;
        for (const std::string& r : step.refs) {
          const Formula* h = lookup(r);
          if (!h) return reject(step, "unknown-ref", "no line " + r);
          hyps.push_back(*h);
        }
        try {
          if (!prop_tautology(step.formula, hyps))
            return reject(step, "mismatch", "goal is not a propositional consequence");
        } catch (const PropOverflow& e) {
          return reject(step, "prop-overflow", e.what());
        }
        out = step.formula;
        break;
      }
      case CertStep::Kind::Ra: {
        switch (backend) {
          case RaBackend::Ground: {
            if (!detail::is_quantifier_free_arithmetic(step.formula))
              return reject(step, "ra-failed",
                            "ground backend needs closed quantifier-free arithmetic");
            if (!free_vars(step.formula).is_empty())
              return reject(step, "ra-failed", "ground backend needs a closed formula");
            Interpretation empty;
            if (eval_formula(empty, State{}, step.formula) != TruthValue3::True)
              return reject(step, "ra-failed", "formula evaluates to false");
            break;
          }
          case RaBackend::Smt: {
            if (smt_command.empty())
              return reject(step, "ra-failed", "no SMT command configured (DGL_SMT_CMD)");
            std::string script;
            try {
              script = smt_emit(step.formula);
            } catch (const UnsupportedConstruct& e) {
              return reject(step, "ra-failed", e.what());
            }
            std::string answer = run_smt_command(smt_command, script);
            std::istringstream first(answer);
            std::string verdict;
            first >> verdict;
            if (verdict != "unsat")
              return reject(step, "ra-failed",
                            "solver answered '" + (verdict.empty() ? "<nothing>" : verdict) + "'");
            break;
          }
          case RaBackend::Assume:
            result.obligations.push_back(step.formula);
            break;
        }
        out = step.formula;
        break;
      }
    }

    try {
      (void)signature(out);  // well-formedness: consistent arities in the derived line
    } catch (const ArityError& e) {
      return reject(step, "arity", e.what());
    }
    derived.emplace(step.label, out);
    last = out;
  }

  if (!(cert.claimed == last)) {
    CertStep qed;
    qed.label = "qed";
    return reject(qed, "mismatch", "claimed formula differs from the last derived line");
  }
  result.status = result.obligations.empty() ? CheckResult::Status::Verified
                                             : CheckResult::Status::VerifiedModuloArithmetic;
  result.final_formula = last;
  return result;
}

}  // namespace dgl
