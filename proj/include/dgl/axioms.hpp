#pragma once

#include <map>
#include <string>
#include <vector>

#include "dgl/parse.hpp"

// The concrete axiom base: finitely many ordinary dGL formulas plus four
// axiomatic rules, fixed at construction. P, Q are predicationals; p, q
// predicates at the arity shown; f a nullary function; a, b game symbols;
// x, t variables. These are formulas, not schemata: instantiation happens
// exclusively through uniform substitution and uniform renaming.

namespace dgl {

struct UnknownAxiom : DglError {
  explicit UnknownAxiom(const std::string& name) : DglError("unknown axiom: " + name) {}
};
struct UnknownRule : DglError {
  explicit UnknownRule(const std::string& name) : DglError("unknown rule: " + name) {}
};

struct Rule {
  std::vector<Formula> premises;
  Formula conclusion;
};

class AxiomBase {
 public:
  AxiomBase() {
    add("box", "[a] P(||) <-> !<a> !P(||)");
    add("assign", "<x:=f()> p(x) <-> p(f())");
    add("DS", "<{x'=f()}> p(x) <-> \\exists t (t>=0 & <x:=x+f()*t> p(x))");
    add("test", "<?q()> p() <-> q() & p()");
    add("choice", "<a ++ b> P(||) <-> <a> P(||) | <b> P(||)");
    add("compose", "<a;b> P(||) <-> <a><b> P(||)");
    add("iterate", "<{a}*> P(||) <-> P(||) | <a><{a}*> P(||)");
    add("dual", "<{a}^d> P(||) <-> !<a> !P(||)");
    add("K-forall", "\\forall x (P(||) -> Q(||)) -> (\\forall x P(||) -> \\forall x Q(||))");
    add("V-forall", "p() -> \\forall x p()");
    add("inst", "\\forall x p(x) -> p(f())");

    add_rule("M", {"P(||) -> Q(||)"}, "<a> P(||) -> <a> Q(||)");
    add_rule("FP", {"P(||) | <a> Q(||) -> Q(||)"}, "<{a}*> P(||) -> Q(||)");
    add_rule("MP", {"p()", "p() -> q()"}, "q()");
    add_rule("gen", {"p(x)"}, "\\forall x p(x)");
  }

  const Formula& axiom(const std::string& name) const {
    auto it = axioms_.find(name);
    if (it == axioms_.end()) throw UnknownAxiom(name);
    return it->second;
  }
  bool has_axiom(const std::string& name) const { return axioms_.count(name) > 0; }

  const Rule& rule(const std::string& name) const {
    auto it = rules_.find(name);
    if (it == rules_.end()) throw UnknownRule(name);
    return it->second;
  }
  bool has_rule(const std::string& name) const { return rules_.count(name) > 0; }

  // source-order listing of names with their verbatim source text
  const std::vector<std::pair<std::string, std::string>>& axiom_listing() const {
    return axiom_listing_;
  }
  const std::vector<std::pair<std::string, std::string>>& rule_listing() const {
    return rule_listing_;
  }

 private:
  void add(const std::string& name, const std::string& source) {
    axioms_.emplace(name, parse_formula(source));
    axiom_listing_.emplace_back(name, source);
  }
  void add_rule(const std::string& name, std::vector<std::string> premises,
                const std::string& conclusion) {
    Rule r;
    std::string shown;
    for (const std::string& p : premises) {
      r.premises.push_back(parse_formula(p));
      if (!shown.empty()) shown += " ,, ";
      shown += p;
    }
    r.conclusion = parse_formula(conclusion);
    rules_.emplace(name, std::move(r));
    rule_listing_.emplace_back(name, shown + "  |-  " + conclusion);
  }

  std::map<std::string, Formula> axioms_;
  std::map<std::string, Rule> rules_;
  std::vector<std::pair<std::string, std::string>> axiom_listing_;
  std::vector<std::pair<std::string, std::string>> rule_listing_;
};

inline const AxiomBase& axiom_base() {
  static const AxiomBase base;
  return base;
}

}  // namespace dgl
