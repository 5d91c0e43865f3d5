#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dgl/certificate.hpp"
#include "dgl/semantics.hpp"

// Command-line driver. Kept in the library so the dispatch logic is unit
// testable; tools/dgl.cpp is a two-line main.
//
// Exit codes: 0 success / Verified, 1 Rejected or clash, 2 parse or usage
// error, 3 VerifiedModuloArithmetic.

namespace dgl::cli {

using json = nlohmann::ordered_json;

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DglError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string load_inline_or_file(const std::string& arg) {
  if (!arg.empty() && arg[0] == '{') return arg;
  return slurp(arg);
}

inline json varset_json(const VarSet& s) {
  if (s.is_top()) return json("ALL");
  json arr = json::array();
  for (const Variable& v : s.finite()) arr.push_back(to_string(v));
  return arr;
}

inline json symbolset_json(const SymbolSet& s) {
  json out = json::object();
  json fns = json::object();
  for (const auto& [h, k] : s.functions) fns[h] = k;
  json preds = json::object();
  for (const auto& [h, k] : s.predicates) preds[h] = k;
  out["functions"] = fns;
  out["predicates"] = preds;
  out["predicationals"] = json::array();
  for (const auto& h : s.predicationals) out["predicationals"].push_back(h);
  out["games"] = json::array();
  for (const auto& h : s.games) out["games"].push_back(h);
  return out;
}

inline std::string symbolset_text(const SymbolSet& s) {
  std::string out;
  auto line = [&](const std::string& what, const std::string& items) {
    if (items.empty()) return;
    if (!out.empty()) out += "\n";
    out += what + ": " + items;
  };
  std::string fns;
  for (const auto& [h, k] : s.functions) fns += (fns.empty() ? "" : ", ") + h + "/" + std::to_string(k);
  std::string preds;
  for (const auto& [h, k] : s.predicates)
    preds += (preds.empty() ? "" : ", ") + h + "/" + std::to_string(k);
  std::string pls;
  for (const auto& h : s.predicationals) pls += (pls.empty() ? "" : ", ") + h;
  std::string games;
  for (const auto& h : s.games) games += (games.empty() ? "" : ", ") + h;
  line("functions", fns);
  line("predicates", preds);
  line("predicationals", pls);
  line("games", games);
  return out.empty() ? "none" : out;
}

enum class Category { Term, Game, Formula, Auto };

struct Parsed {
  Category cat;
  Term term;
  Formula formula;
  HybridGame game;
};

inline Parsed parse_any(const std::string& text, Category want) {
  Parsed p;
  auto as_formula = [&]() {
    p.cat = Category::Formula;
    p.formula = parse_formula(text);
    (void)signature(p.formula);
  };
  auto as_term = [&]() {
    p.cat = Category::Term;
    p.term = parse_term(text);
    (void)signature(p.term);
  };
  auto as_game = [&]() {
    p.cat = Category::Game;
    p.game = parse_game(text);
    (void)signature(p.game);
  };
  switch (want) {
    case Category::Term: as_term(); return p;
    case Category::Game: as_game(); return p;
    case Category::Formula: as_formula(); return p;
    case Category::Auto: break;
  }
  try {
    as_formula();
    return p;
  } catch (const ParseError&) {
  }
  try {
    as_term();
    return p;
  } catch (const ParseError&) {
  }
  as_game();
  return p;
}

inline Category category_of(const std::string& name) {
  if (name == "term") return Category::Term;
  if (name == "game") return Category::Game;
  if (name == "formula") return Category::Formula;
  if (name == "auto") return Category::Auto;
  throw CLI::ValidationError("-c", "category must be term, game, or formula");
}

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"dgl - uniform substitution kernel for differential game logic"};
  app.require_subcommand(1);
  std::string format = "text";
  app.add_option("--format", format, "output format: text or json")
      ->check(CLI::IsMember({"text", "json"}));

  std::string cat_name = "auto", expr, subst_arg, cert_path, interp_arg, state_arg, ra_name = "ground";
  bool allow_assume = false;
  int depth = -1;
  std::vector<std::string> witnesses;

  CLI::App* cmd_parse = app.add_subcommand("parse", "parse an expression and print it normalized");
  cmd_parse->add_option("-c,--category", cat_name, "term | game | formula");
  cmd_parse->add_option("expr", expr, "expression text")->required();

  CLI::App* cmd_fv = app.add_subcommand("fv", "free variables of an expression");
  cmd_fv->add_option("-c,--category", cat_name, "term | game | formula");
  cmd_fv->add_option("expr", expr)->required();

  CLI::App* cmd_bv = app.add_subcommand("bv", "bound variables of a game");
  cmd_bv->add_option("expr", expr)->required();

  CLI::App* cmd_sig = app.add_subcommand("sig", "signature (symbol heads) of an expression");
  cmd_sig->add_option("-c,--category", cat_name, "term | game | formula");
  cmd_sig->add_option("expr", expr)->required();

  CLI::App* cmd_subst = app.add_subcommand("subst", "apply a uniform substitution");
  cmd_subst->add_option("-s,--subst", subst_arg, "substitution, inline {...} or a file")->required();
  cmd_subst->add_option("-c,--category", cat_name, "term | game | formula");
  cmd_subst->add_option("expr", expr)->required();

  CLI::App* cmd_check = app.add_subcommand("check", "check a proof certificate (.dgp)");
  cmd_check->add_option("file", cert_path, "certificate file")->required();
  cmd_check->add_option("--ra", ra_name, "real-arithmetic backend: ground | smt | assume")
      ->check(CLI::IsMember({"ground", "smt", "assume"}));
  cmd_check->add_flag("--allow-assume", allow_assume, "permit the assume backend");

  CLI::App* cmd_eval = app.add_subcommand("eval", "evaluate a formula in the semantics oracle");
  cmd_eval->add_option("-I,--interpretation", interp_arg, "interpretation, inline {...} or a file");
  cmd_eval->add_option("-w,--state", state_arg, "state file ('var = rational' lines) or inline");
  cmd_eval->add_option("--depth", depth, "loop unrolling depth");
  cmd_eval->add_option("--witness", witnesses, "extra quantifier witness (rational), repeatable");
  cmd_eval->add_option("expr", expr)->required();

  CLI::App* cmd_axioms = app.add_subcommand("axioms", "list the axiom base verbatim");

  try {
    std::vector<const char*> argv;
    argv.push_back("dgl");
    for (const std::string& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help and friends
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  bool json_mode = format == "json";

  try {
    if (cmd_parse->parsed()) {
      Parsed p = parse_any(expr, category_of(cat_name));
      std::string shown = p.cat == Category::Term    ? print(p.term)
                          : p.cat == Category::Game ? print(p.game)
                                                     : print(p.formula);
      const char* kind = p.cat == Category::Term ? "term" : p.cat == Category::Game ? "game" : "formula";
      if (json_mode)
        out << json{{"command", "parse"}, {"category", kind}, {"result", shown}}.dump() << "\n";
      else
        out << shown << "\n";
      return 0;
    }

    if (cmd_fv->parsed()) {
      Parsed p = parse_any(expr, category_of(cat_name));
      VarSet fv = p.cat == Category::Term    ? free_vars(p.term)
                  : p.cat == Category::Game ? free_vars(p.game)
                                             : free_vars(p.formula);
      if (json_mode)
        out << json{{"command", "fv"}, {"vars", varset_json(fv)}}.dump() << "\n";
      else
        out << to_string(fv) << "\n";
      return 0;
    }

    if (cmd_bv->parsed()) {
      HybridGame g = parse_game(expr);
      (void)signature(g);
      VarSet bv = bound_vars(g);
      if (json_mode)
        out << json{{"command", "bv"}, {"vars", varset_json(bv)}}.dump() << "\n";
      else
        out << to_string(bv) << "\n";
      return 0;
    }

    if (cmd_sig->parsed()) {
      Parsed p = parse_any(expr, category_of(cat_name));
      SymbolSet sig = p.cat == Category::Term    ? signature(p.term)
                      : p.cat == Category::Game ? signature(p.game)
                                                 : signature(p.formula);
      if (json_mode)
        out << json{{"command", "sig"}, {"signature", symbolset_json(sig)}}.dump() << "\n";
      else
        out << symbolset_text(sig) << "\n";
      return 0;
    }

    if (cmd_subst->parsed()) {
      UniformSubstitution sigma = parse_substitution(load_inline_or_file(subst_arg));
      Parsed p = parse_any(expr, category_of(cat_name));
      auto report_clash = [&](const ClashError& clash) {
        if (json_mode)
          out << json{{"command", "subst"},
                      {"ok", false},
                      {"clash",
                       {{"head", clash.head},
                        {"taboo", varset_json(clash.taboo)},
                        {"variable", to_string(clash.offending)},
                        {"position", clash.position}}}}
                     .dump()
              << "\n";
        else
          out << clash.message() << "\n";
        return 1;
      };
      auto report_ok = [&](const std::string& shown) {
        if (json_mode)
          out << json{{"command", "subst"}, {"ok", true}, {"result", shown}}.dump() << "\n";
        else
          out << shown << "\n";
        return 0;
      };
      if (p.cat == Category::Term) {
        auto r = apply(sigma, p.term);
        if (const ClashError* c = std::get_if<ClashError>(&r)) return report_clash(*c);
        return report_ok(print(std::get<Term>(r)));
      }
      if (p.cat == Category::Game) {
        auto r = apply(sigma, p.game);
        if (const ClashError* c = std::get_if<ClashError>(&r)) return report_clash(*c);
        return report_ok(print(std::get<HybridGame>(r)));
      }
      auto r = apply(sigma, p.formula);
      if (const ClashError* c = std::get_if<ClashError>(&r)) return report_clash(*c);
      return report_ok(print(std::get<Formula>(r)));
    }

    if (cmd_check->parsed()) {
      RaBackend backend = ra_name == "ground" ? RaBackend::Ground
                          : ra_name == "smt"  ? RaBackend::Smt
                                              : RaBackend::Assume;
      if (backend == RaBackend::Assume && !allow_assume) {
        err << "error: --ra assume requires --allow-assume\n";
        return 2;
      }
      std::string smt_cmd;
      if (const char* env = std::getenv("DGL_SMT_CMD")) smt_cmd = env;
      ProofCertificate cert = parse_certificate_file(cert_path);
      CheckResult res = check_certificate(cert, backend, smt_cmd);
      if (json_mode) {
        json j{{"command", "check"}};
        switch (res.status) {
          case CheckResult::Status::Verified:
            j["status"] = "Verified";
            j["formula"] = print(res.final_formula);
            break;
          case CheckResult::Status::VerifiedModuloArithmetic: {
            j["status"] = "VerifiedModuloArithmetic";
            j["formula"] = print(res.final_formula);
            json obs = json::array();
            for (const Formula& o : res.obligations) obs.push_back(print(o));
            j["obligations"] = obs;
            break;
          }
          case CheckResult::Status::Rejected:
            j["status"] = "Rejected";
            j["label"] = res.rejected_label;
            j["reason"] = res.reason_code;
            j["detail"] = res.reason_detail;
            break;
        }
        out << j.dump() << "\n";
      } else {
        switch (res.status) {
          case CheckResult::Status::Verified:
            out << "Verified: " << print(res.final_formula) << "\n";
            break;
          case CheckResult::Status::VerifiedModuloArithmetic:
            out << "VerifiedModuloArithmetic: " << print(res.final_formula) << "\n";
            for (const Formula& o : res.obligations) out << "obligation: " << print(o) << "\n";
            break;
          case CheckResult::Status::Rejected:
            out << "Rejected at " << res.rejected_label << " [" << res.reason_code
                << "]: " << res.reason_detail << "\n";
            break;
        }
      }
      switch (res.status) {
        case CheckResult::Status::Verified: return 0;
        case CheckResult::Status::VerifiedModuloArithmetic: return 3;
        default: return 1;
      }
    }

    if (cmd_eval->parsed()) {
      Interpretation interp;
      if (!interp_arg.empty()) interp = parse_interpretation(load_inline_or_file(interp_arg));
      State state;
      if (!state_arg.empty()) {
        std::string text =
            state_arg.find('=') != std::string::npos && state_arg.find('\n') == std::string::npos &&
                    !std::ifstream(state_arg).good()
                ? state_arg
                : slurp(state_arg);
        state = parse_state(text);
      }
      Budget budget;
      if (depth >= 0) budget.loop_unroll_depth = depth;
      for (const std::string& w : witnesses) {
        auto r = parse_rational(w);
        if (!r) throw DglError("bad witness rational: " + w);
        budget.quantifier_witnesses.push_back(*r);
      }
      Formula f = parse_formula(expr);
      (void)signature(f);
      TruthValue3 v = eval_formula(interp, state, f, budget);
      if (json_mode)
        out << json{{"command", "eval"}, {"value", to_string(v)}}.dump() << "\n";
      else
        out << to_string(v) << "\n";
      return 0;
    }

    if (cmd_axioms->parsed()) {
      const AxiomBase& base = axiom_base();
      if (json_mode) {
        json axs = json::object();
        for (const auto& [name, src] : base.axiom_listing()) axs[name] = src;
        json rules = json::object();
        for (const auto& [name, src] : base.rule_listing()) rules[name] = src;
        out << json{{"command", "axioms"}, {"axioms", axs}, {"rules", rules}}.dump() << "\n";
      } else {
        for (const auto& [name, src] : base.axiom_listing()) out << name << ": " << src << "\n";
        for (const auto& [name, src] : base.rule_listing()) out << "rule " << name << ": " << src << "\n";
      }
      return 0;
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DglError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "error: no subcommand\n";
  return 2;
}

}  // namespace dgl::cli
