// Acceptance suite: one pass/fail line per criterion, exact expectations
// pinned in code. Exits nonzero if any criterion fails.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>

#include "dgl/certificate.hpp"
#include "dgl/cli.hpp"
#include "harness.hpp"

using namespace dgl;

namespace {

int failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void report(int criterion, bool ok, const std::string& what, double secs, double limit) {
  bool in_time = limit <= 0 || secs <= limit;
  bool pass = ok && in_time;
  if (!pass) ++failures;
  std::printf("%s criterion %d: %s (%.2fs%s)\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
              secs, in_time ? "" : ", over time budget");
}

template <class T>
bool got_clash(const std::variant<T, ClashError>& r) {
  return std::holds_alternative<ClashError>(r);
}

}  // namespace

// 1. The motivating substitution instance, both the sound and the clashing variant.
static void criterion1() {
  Timer t;
  UniformSubstitution ok_subst = parse_substitution("{p(.) ~> x+.^2>=.}");
  Formula phi = parse_formula("p(4*y) -> \\exists y p(x^2+y)");
  auto applied = apply(ok_subst, phi);
  bool ok = !got_clash(applied) &&
            std::get<Formula>(applied) ==
                parse_formula("x+(4*y)^2>=4*y -> \\exists y (x+(x^2+y)^2>=x^2+y)");

  auto clashed = apply(parse_substitution("{p(.) ~> y+.^2>=.}"), phi);
  ok = ok && got_clash(clashed) && std::get<ClashError>(clashed).offending == Variable{"y", 0};
  report(1, ok, "motivating substitution instance and its clash variant", t.seconds(), 1.0);
}

// 2. Two-step US certificates over compose and dual reproduce the displayed instances.
static void criterion2() {
  Timer t;
  CheckResult compose = check_certificate(
      parse_certificate(
          "l1: axiom compose\n"
          "l2: us {a ~> {v:=2 ++ v:=x^2+1}^d ;; b ~> {x'=v} ;; P(||) ~> x>0} l1\n"
          "qed: <{v:=2 ++ v:=x^2+1}^d ; {x'=v}> x>0 <-> <{v:=2 ++ v:=x^2+1}^d> <{x'=v}> x>0\n"),
      RaBackend::Ground);
  CheckResult dual = check_certificate(
      parse_certificate(
          "l1: axiom dual\n"
          "l2: us {a ~> v:=2 ++ v:=x^2+1 ;; P(||) ~> <{x'=v}> x>0} l1\n"
          "qed: <{v:=2 ++ v:=x^2+1}^d> <{x'=v}> x>0 <-> !<v:=2 ++ v:=x^2+1> !<{x'=v}> x>0\n"),
      RaBackend::Ground);
  bool ok = compose.status == CheckResult::Status::Verified &&
            dual.status == CheckResult::Status::Verified;
  report(2, ok, "two-step certificates reproduce both displayed instances", t.seconds(), 1.0);
}

// 3. The bundled end-to-end certificate: one arithmetic obligation under assume,
//    Verified under smt when a solver is configured.
static void criterion3() {
  Timer t;
  ProofCertificate cert = parse_certificate_file("examples/sec5.dgp");
  CheckResult assume = check_certificate(cert, RaBackend::Assume);
  Formula expected_goal = parse_formula("x > -1 -> <{{v:=2 ++ v:=x^2+1}^d}; {x'=v}> x>0");
  Formula expected_obligation = parse_formula(
      "x > -1 -> !(!\\exists t (t>=0 & x+2*t>0) | !\\exists t (t>=0 & x+(x^2+1)*t>0))");
  bool ok = assume.status == CheckResult::Status::VerifiedModuloArithmetic &&
            assume.obligations.size() == 1 && assume.obligations[0] == expected_obligation &&
            assume.final_formula == expected_goal;
  double secs = t.seconds();

  std::string note = "bundled certificate: one obligation under assume";
  const char* smt_cmd = std::getenv("DGL_SMT_CMD");
  if (smt_cmd && *smt_cmd) {
    CheckResult smt = check_certificate(cert, RaBackend::Smt, smt_cmd);
    ok = ok && smt.status == CheckResult::Status::Verified;
    note += "; Verified under smt";
  } else {
    note += "; smt leg skipped (no DGL_SMT_CMD configured)";
  }
  report(3, ok, note, secs, 5.0);
}

// 4. Clash soundness of DS: f() -> x rejected with taboo {x, x'}, f() -> v accepted.
static void criterion4() {
  Timer t;
  const Formula& ds = axiom_base().axiom("DS");
  auto bad = apply(parse_substitution("{f() ~> x}"), ds);
  bool ok = got_clash(bad);
  if (ok) {
    const ClashError& c = std::get<ClashError>(bad);
    ok = c.taboo == VarSet::of({Variable{"x", 0}, Variable{"x", 1}}) &&
         c.offending == Variable{"x", 0};
  }
  auto good = apply(parse_substitution("{f() ~> v}"), ds);
  ok = ok && !got_clash(good) &&
       std::get<Formula>(good) ==
           parse_formula("<{x'=v}> p(x) <-> \\exists t (t>=0 & <x:=x+v*t> p(x))");
  report(4, ok, "DS instantiation clashes on bound x, accepts fresh v", t.seconds(), 1.0);
}

// 5. usr requires FV(sigma) = {} for function/predicate heads; predicationals pass.
static void criterion5() {
  Timer t;
  CheckResult rejected = check_certificate(
      parse_certificate("l1: prop x>0 -> x>0 from\n"
                        "l2: usr {p() ~> x>0 ;; q() ~> x>0} MP l1 l1\n"
                        "qed: x>0\n"),
      RaBackend::Ground);
  CheckResult accepted = check_certificate(
      parse_certificate(
          "l1: prop x>0 -> x>0 from\n"
          "l2: usr {a ~> ?true ;; P(||) ~> x>0 ;; Q(||) ~> x>0} M l1\n"
          "qed: <?true> x>0 -> <?true> x>0\n"),
      RaBackend::Ground);
  bool ok = rejected.status == CheckResult::Status::Rejected && rejected.rejected_label == "l2" &&
            accepted.status == CheckResult::Status::Verified;
  report(5, ok, "usr rejects free variables in predicate heads, accepts predicationals",
         t.seconds(), 1.0);
}

// 6. Uniform substitution lemma differential test at full volume.
static void criterion6() {
  Timer t;
  uslemma::Stats stats = uslemma::run(202508, 10000);
  bool ok = stats.disagreements == 0 && stats.determinate * 100 >= stats.total * 70;
  report(6, ok,
         "US lemma, 10000 samples: " + std::to_string(stats.determinate) + " determinate, " +
             std::to_string(stats.disagreements) + " disagreements",
         t.seconds(), 60.0);
}

// 7. Static-semantics property suites at >= 1000 cases each.
static void criterion7() {
  Timer t;
  properties::Tally ct = properties::coincidence_terms(71, 1000);
  properties::Tally cf = properties::coincidence_formulas(72, 1000);
  properties::Tally be = properties::bound_effect(73, 1000);
  properties::Tally mo = properties::monotonicity(74, 1000);
  properties::Tally dl = properties::dual_laws(75, 1000);
  bool ok = ct.informative >= 1000 && ct.failures == 0 && cf.informative >= 1000 &&
            cf.failures == 0 && be.informative >= 1000 && be.failures == 0 &&
            mo.informative >= 1000 && mo.failures == 0 && dl.informative >= 1000 &&
            dl.failures == 0;
  report(7, ok,
         "coincidence/bound-effect/monotonicity/dual-law suites, 1000+ cases each, failures " +
             std::to_string(ct.failures + cf.failures + be.failures + mo.failures + dl.failures),
         t.seconds(), 60.0);
}

// 8. Axiom and rule sampling soundness.
static void criterion8() {
  Timer t;
  gen::Rng rng(88);
  bool ok = true;
  std::string detail;
  for (const std::string& name : axiom_sampling::axiom_names()) {
    axiom_sampling::Outcome out = axiom_sampling::sample_axiom(rng, name, 1000);
    if (out.instances < 1000 || out.false_hits != 0) {
      ok = false;
      detail += " " + name + "(" + std::to_string(out.instances) + " inst, " +
                std::to_string(out.false_hits) + " false)";
    }
  }
  axiom_sampling::RuleOutcome m = axiom_sampling::sample_rule_m(rng, 400);
  axiom_sampling::RuleOutcome fp = axiom_sampling::sample_rule_fp(rng, 400);
  ok = ok && m.usable > 20 && m.violations == 0 && fp.usable > 20 && fp.violations == 0;
  report(8, ok, "axiom base and rules M/FP sampling, no false instance" + detail, t.seconds(),
         0.0);
}

// 9. Parser round trip at full volume.
static void criterion9() {
  Timer t;
  int failures9 = properties::roundtrip_failures(909090, 10000);
  report(9, failures9 == 0,
         "round trip on 10000 random ASTs per category, failures " + std::to_string(failures9),
         t.seconds(), 30.0);
}

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  if (failures == 0)
    std::printf("acceptance: all criteria passed\n");
  else
    std::printf("acceptance: %d criteria FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
