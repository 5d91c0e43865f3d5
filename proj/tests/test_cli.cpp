#include <doctest.h>

#include <sstream>

#include "dgl/cli.hpp"

namespace {
struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = dgl::cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}
}  // namespace

TEST_CASE("subst subcommand matches the worked example") {
  Run r = cli({"subst", "-s", "{p(.) ~> x+.^2>=.}", "-c", "formula",
               "p(4*y) -> \\exists y p(x^2+y)"});
  CHECK(r.code == 0);
  CHECK(r.out == "x+(4*y)^2>=4*y -> \\exists y (x+(x^2+y)^2>=x^2+y)\n");

  Run clash = cli({"subst", "-s", "{p(.) ~> y+.^2>=.}", "-c", "formula",
                   "p(4*y) -> \\exists y p(x^2+y)"});
  CHECK(clash.code == 1);
  CHECK(clash.out.find("y") != std::string::npos);
  CHECK(clash.out.find("clash") != std::string::npos);
}

TEST_CASE("parse echoes normalized text and rejects bad input with exit 2") {
  Run r = cli({"parse", "-c", "formula", "x + (4*y)^2 >= 4*y"});
  CHECK(r.code == 0);
  CHECK(r.out == "x+(4*y)^2>=4*y\n");
  Run bad = cli({"parse", "-c", "term", "x +"});
  CHECK(bad.code == 2);
  Run dots = cli({"parse", "-c", "term", ".0+1"});
  CHECK(dots.code == 2);  // reserved dots never parse from the user entry point
}

TEST_CASE("fv, bv, sig subcommands") {
  Run fv = cli({"fv", "-c", "term", "(x*y)'"});
  CHECK(fv.code == 0);
  CHECK(fv.out == "x, x', y, y'\n");
  Run top = cli({"fv", "-c", "game", "a"});
  CHECK(top.out == "ALL\n");
  Run bv = cli({"bv", "{v:=2 ++ v:=x^2+1}^d ; {x'=v}"});
  CHECK(bv.out == "v, x, x'\n");
  Run sig = cli({"sig", "<a;b> P(||)"});
  CHECK(sig.code == 0);
  CHECK(sig.out.find("games: a, b") != std::string::npos);
  CHECK(sig.out.find("predicationals: P") != std::string::npos);
}

TEST_CASE("json output carries the same payload") {
  Run r = cli({"--format", "json", "subst", "-s", "{p(.) ~> x+.^2>=.}", "-c", "formula",
               "p(4*y) -> \\exists y p(x^2+y)"});
  CHECK(r.code == 0);
  CHECK(r.out ==
        "{\"command\":\"subst\",\"ok\":true,"
        "\"result\":\"x+(4*y)^2>=4*y -> \\\\exists y (x+(x^2+y)^2>=x^2+y)\"}\n");

  Run fv = cli({"--format", "json", "fv", "-c", "term", "(x*y)'"});
  CHECK(fv.out == "{\"command\":\"fv\",\"vars\":[\"x\",\"x'\",\"y\",\"y'\"]}\n");

  Run ev = cli({"--format", "json", "eval", "x>=0"});
  CHECK(ev.out == "{\"command\":\"eval\",\"value\":\"True\"}\n");
}

TEST_CASE("check subcommand exit codes") {
  Run assume = cli({"check", "examples/sec5.dgp", "--ra", "assume", "--allow-assume"});
  CHECK(assume.code == 3);
  CHECK(assume.out.find("VerifiedModuloArithmetic") != std::string::npos);
  CHECK(assume.out.find("obligation: x>-1 -> !(!\\exists t (t>=0 & x+2*t>0) | "
                        "!\\exists t (t>=0 & x+(x^2+1)*t>0))") != std::string::npos);

  Run guard = cli({"check", "examples/sec5.dgp", "--ra", "assume"});
  CHECK(guard.code == 2);  // assume backend requires --allow-assume

  Run ground = cli({"check", "examples/sec5.dgp", "--ra", "ground"});
  CHECK(ground.code == 1);  // the obligation is not closed, so ground rejects
  CHECK(ground.out.find("Rejected") != std::string::npos);
}

TEST_CASE("eval subcommand with budgets and inline state") {
  Run t = cli({"eval", "-w", "x = -2", "--depth", "4", "<{x:=x+1}*> x>0"});
  CHECK(t.code == 0);
  CHECK(t.out == "True\n");
  Run u = cli({"eval", "-w", "x = -2", "--depth", "1", "<{x:=x+1}*> x>0"});
  CHECK(u.out == "Unknown\n");
  Run w = cli({"eval", "--witness", "100", "\\exists z z>99"});
  CHECK(w.out == "True\n");
  Run i = cli({"eval", "-I", "{f(.) ~> .0+1}", "f(1)>=2"});
  CHECK(i.out == "True\n");
}

TEST_CASE("axioms subcommand lists the base verbatim") {
  Run r = cli({"axioms"});
  CHECK(r.code == 0);
  CHECK(r.out.find("test: <?q()> p() <-> q() & p()") != std::string::npos);
  CHECK(r.out.find("iterate: <{a}*> P(||) <-> P(||) | <a><{a}*> P(||)") != std::string::npos);
  CHECK(r.out.find("DS: <{x'=f()}> p(x) <-> \\exists t (t>=0 & <x:=x+f()*t> p(x))") !=
        std::string::npos);
  CHECK(r.out.find("rule M: P(||) -> Q(||)  |-  <a> P(||) -> <a> Q(||)") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"subst", "-c", "formula", "x>0"}).code == 2);  // missing -s
  CHECK(cli({}).code == 2);
}
