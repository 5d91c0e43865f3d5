#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "dgl/certificate.hpp"
#include "gen.hpp"
#include "harness.hpp"

using namespace dgl;

TEST_CASE("axiom lookup returns the stored formulas") {
  const AxiomBase& base = axiom_base();
  CHECK(base.axiom("test") == parse_formula("<?q()> p() <-> q() & p()"));
  CHECK(base.axiom("iterate") == parse_formula("<{a}*> P(||) <-> P(||) | <a><{a}*> P(||)"));
  CHECK(base.axiom("assign") == parse_formula("<x:=f()> p(x) <-> p(f())"));
  CHECK_THROWS_AS(base.axiom("nosuch"), UnknownAxiom);
  CHECK(base.rule("MP").premises.size() == 2);
  CHECK(base.rule("M").conclusion == parse_formula("<a> P(||) -> <a> Q(||)"));
}

TEST_CASE("propositional consequence with abstracted atoms") {
  CHECK(prop_tautology(parse_formula("q() & p() -> p()"), {}));
  CHECK(prop_tautology(parse_formula("<a>x>0"),
                       {parse_formula("<a>x>0 <-> y>0"), parse_formula("y>0")}));
  CHECK_FALSE(prop_tautology(parse_formula("x>0"), {}));
  // box desugars to a reflexive tautology
  CHECK(prop_tautology(axiom_base().axiom("box"), {}));
  // double negation inside a binder is collapsed for atom identification
  CHECK(prop_tautology(parse_formula("\\forall t !(x>0) <-> !\\exists t x>0"), {}));
  // distinct quantified bodies stay distinct atoms
  CHECK_FALSE(prop_tautology(parse_formula("\\exists t x>0"), {parse_formula("\\exists t x>=0")}));
}

TEST_CASE("prop overflow beyond 24 atoms") {
  std::vector<Formula> hyps;
  Formula goal = Formula::falsity();
  for (int i = 0; i < 26; ++i)
    hyps.push_back(Formula::gt(Term::var("x" + std::to_string(i)), Term::number(0)));
  Formula conj = hyps[0];
  for (size_t i = 1; i < hyps.size(); ++i) conj = Formula::and_(conj, hyps[i]);
  CHECK_THROWS_AS(prop_tautology(conj, {}), PropOverflow);
}

TEST_CASE("smt emission") {
  std::string script = smt_emit(parse_formula("x>0 -> x>=0"));
  CHECK(script.find("(set-logic NRA)") != std::string::npos);
  CHECK(script.find("(declare-const x Real)") != std::string::npos);
  CHECK(script.find("(assert (not (=> (> x 0.0) (>= x 0.0))))") != std::string::npos);
  CHECK(script.find("(check-sat)") != std::string::npos);

  std::string binder = smt_emit(parse_formula("\\exists t (t>=0 & x+2*t>0)"));
  CHECK(binder.find("(exists ((t Real))") != std::string::npos);
  CHECK(binder.find("(declare-const x Real)") != std::string::npos);
  CHECK(binder.find("(declare-const t Real)") == std::string::npos);

  CHECK_THROWS_AS(smt_emit(parse_formula("<a>x>0")), UnsupportedConstruct);
  CHECK_THROWS_AS(smt_emit(parse_formula("p(x)")), UnsupportedConstruct);
  CHECK(smt_emit(parse_formula("x'>=1/2")).find("|x'|") != std::string::npos);
}

TEST_CASE("two-step certificates reproduce the worked instances") {
  ProofCertificate compose = parse_certificate(
      "l1: axiom compose\n"
      "l2: us {a ~> {v:=2 ++ v:=x^2+1}^d ;; b ~> {x'=v} ;; P(||) ~> x>0} l1\n"
      "qed: <{v:=2 ++ v:=x^2+1}^d ; {x'=v}> x>0 <-> <{v:=2 ++ v:=x^2+1}^d> <{x'=v}> x>0\n");
  CheckResult r1 = check_certificate(compose, RaBackend::Ground);
  CHECK(r1.status == CheckResult::Status::Verified);

  ProofCertificate dual = parse_certificate(
      "l1: axiom dual\n"
      "l2: us {a ~> v:=2 ++ v:=x^2+1 ;; P(||) ~> <{x'=v}> x>0} l1\n"
      "qed: <{v:=2 ++ v:=x^2+1}^d> <{x'=v}> x>0 <-> !<v:=2 ++ v:=x^2+1> !<{x'=v}> x>0\n");
  CheckResult r2 = check_certificate(dual, RaBackend::Ground);
  CHECK(r2.status == CheckResult::Status::Verified);
}

TEST_CASE("certificate rejections carry label and reason code") {
  // clash
  CheckResult clash = check_certificate(parse_certificate("l1: axiom DS\n"
                                                          "l2: us {f() ~> x} l1\n"
                                                          "qed: true\n"),
                                        RaBackend::Ground);
  CHECK(clash.status == CheckResult::Status::Rejected);
  CHECK(clash.rejected_label == "l2");
  CHECK(clash.reason_code == "clash");

  // unknown axiom and unknown line
  CheckResult ua = check_certificate(parse_certificate("l1: axiom nosuch\nqed: true\n"),
                                     RaBackend::Ground);
  CHECK(ua.reason_code == "unknown-ref");
  CheckResult ul = check_certificate(parse_certificate("l1: gen x l0\nqed: true\n"),
                                     RaBackend::Ground);
  CHECK(ul.reason_code == "unknown-ref");

  // usr side condition FV(sigma) = {}
  CheckResult usr = check_certificate(
      parse_certificate("l1: prop x>0 -> x>0 from\n"
                        "l2: usr {p() ~> x>0 ;; q() ~> x>0} MP l1 l1\n"
                        "qed: x>0\n"),
      RaBackend::Ground);
  CHECK(usr.status == CheckResult::Status::Rejected);
  CHECK(usr.rejected_label == "l2");
  CHECK(usr.reason_detail.find("FV(sigma)") != std::string::npos);

  // mp mismatch
  CheckResult mp = check_certificate(parse_certificate("l1: axiom test\n"
                                                       "l2: mp l1 l1\n"
                                                       "qed: true\n"),
                                     RaBackend::Ground);
  CHECK(mp.rejected_label == "l2");
  CHECK(mp.reason_code == "mismatch");

  // claimed formula must match the final line
  CheckResult qed = check_certificate(parse_certificate("l1: axiom test\nqed: true\n"),
                                      RaBackend::Ground);
  CHECK(qed.rejected_label == "qed");
  CHECK(qed.reason_code == "mismatch");
}

TEST_CASE("mp peels a matching implication") {
  CheckResult r = check_certificate(
      parse_certificate("h1: ra 1>=0\n"
                        "h2: prop 1>=0 -> 2>=0 | 1>=0 from\n"
                        "h3: mp h1 h2\n"
                        "qed: 2>=0 | 1>=0\n"),
      RaBackend::Ground);
  CHECK(r.status == CheckResult::Status::Verified);
  CHECK(r.final_formula == parse_formula("2>=0 | 1>=0"));
}

TEST_CASE("gen universally generalizes a derived line") {
  CheckResult r = check_certificate(parse_certificate("l1: ra 0>=0\n"
                                                      "l2: gen z l1\n"
                                                      "qed: \\forall z 0>=0\n"),
                                    RaBackend::Ground);
  CHECK(r.status == CheckResult::Status::Verified);
}

TEST_CASE("ra backends") {
  ProofCertificate ground_ok = parse_certificate("l1: ra 2*3>=5\nqed: 2*3>=5\n");
  CHECK(check_certificate(ground_ok, RaBackend::Ground).status == CheckResult::Status::Verified);

  ProofCertificate ground_false = parse_certificate("l1: ra 1>=2\nqed: 1>=2\n");
  CHECK(check_certificate(ground_false, RaBackend::Ground).reason_code == "ra-failed");

  ProofCertificate open = parse_certificate("l1: ra x>=0 -> x>=0\nqed: x>=0 -> x>=0\n");
  CHECK(check_certificate(open, RaBackend::Ground).reason_code == "ra-failed");

  CheckResult assume = check_certificate(open, RaBackend::Assume);
  CHECK(assume.status == CheckResult::Status::VerifiedModuloArithmetic);
  REQUIRE(assume.obligations.size() == 1);
  CHECK(assume.obligations[0] == parse_formula("x>=0 -> x>=0"));

  // smt backend through a mock solver command
  CheckResult smt_ok = check_certificate(open, RaBackend::Smt, "echo unsat");
  CHECK(smt_ok.status == CheckResult::Status::Verified);
  CheckResult smt_sat = check_certificate(open, RaBackend::Smt, "echo sat");
  CHECK(smt_sat.reason_code == "ra-failed");
  CheckResult smt_missing = check_certificate(open, RaBackend::Smt, "");
  CHECK(smt_missing.reason_code == "ra-failed");
  // the script actually reaches the command's standard input
  CheckResult smt_script = check_certificate(open, RaBackend::Smt,
                                             "grep -q '(check-sat)' && echo unsat");
  CHECK(smt_script.status == CheckResult::Status::Verified);
}

TEST_CASE("the bundled certificate checks modulo one arithmetic obligation") {
  ProofCertificate cert = parse_certificate_file("examples/sec5.dgp");
  CheckResult r = check_certificate(cert, RaBackend::Assume);
  REQUIRE(r.status == CheckResult::Status::VerifiedModuloArithmetic);
  REQUIRE(r.obligations.size() == 1);
  CHECK(r.obligations[0] ==
        parse_formula(
            "x > -1 -> !(!\\exists t (t>=0 & x+2*t>0) | !\\exists t (t>=0 & x+(x^2+1)*t>0))"));
  CHECK(r.final_formula == parse_formula("x > -1 -> <{{v:=2 ++ v:=x^2+1}^d}; {x'=v}> x>0"));

  // deterministic: identical input, identical result
  CheckResult again = check_certificate(cert, RaBackend::Assume);
  CHECK(again.status == r.status);
  CHECK(again.obligations.size() == r.obligations.size());
  CHECK(again.final_formula == r.final_formula);

  // under the smt backend the single obligation goes to the solver
  CheckResult smt = check_certificate(cert, RaBackend::Smt, "echo unsat");
  CHECK(smt.status == CheckResult::Status::Verified);
}

TEST_CASE("non-creativity: mutated certificates are rejected, never reinterpreted") {
  // every line of the bundled certificate depends on the ones before it;
  // perturbing any single step must yield Rejected, not a different theorem
  std::ifstream in("examples/sec5.dgp");
  REQUIRE(in.good());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);

  auto run_mutated = [&](size_t skip) {
    std::string text;
    for (size_t i = 0; i < lines.size(); ++i) {
      if (i == skip) continue;
      text += lines[i];
      text += "\n";
    }
    try {
      return check_certificate(parse_certificate(text), RaBackend::Assume).status;
    } catch (const ParseError&) {
      return CheckResult::Status::Rejected;
    }
  };

  int mutated = 0;
  for (size_t i = 0; i < lines.size(); ++i) {
    std::string t = lines[i];
    if (t.empty() || t[0] == '#') continue;
    if (t.substr(0, 3) == "qed") continue;
    ++mutated;
    CHECK(run_mutated(i) == CheckResult::Status::Rejected);
  }
  CHECK(mutated >= 30);
}

TEST_CASE("axiom base sampling, unit volume") {
  gen::Rng rng(42);
  for (const std::string& name : axiom_sampling::axiom_names()) {
    axiom_sampling::Outcome out = axiom_sampling::sample_axiom(rng, name, 150);
    INFO("axiom " << name);
    CHECK(out.instances > 50);
    CHECK(out.false_hits == 0);
  }
}

TEST_CASE("rules M and FP sampling, unit volume") {
  gen::Rng rng(43);
  axiom_sampling::RuleOutcome m = axiom_sampling::sample_rule_m(rng, 150);
  CHECK(m.usable > 10);
  CHECK(m.violations == 0);
  axiom_sampling::RuleOutcome fp = axiom_sampling::sample_rule_fp(rng, 150);
  CHECK(fp.usable > 10);
  CHECK(fp.violations == 0);
}
