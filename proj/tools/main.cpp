// Command-line front end: check termination of a rewrite system, solve a
// size-constraint file, or normalize a term.
//
// Exit codes: 0 = YES / SAT / normal form reached, 1 = MAYBE / UNSAT / fuel
// exhausted, 2 = invalid input.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "hrs/parser.hpp"
#include "hrs/report.hpp"
#include "hrs/rewrite.hpp"
#include "hrs/solver.hpp"
#include "hrs/termination.hpp"

namespace {

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) return std::nullopt;
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string stem_of(const std::string& path) {
  auto slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = base.find_last_of('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}

int load_system(const std::string& file, hrs::ParsedSystem& parsed) {
  auto text = read_file(file);
  if (!text) {
    std::cerr << "cannot read " << file << "\n";
    return 2;
  }
  parsed = hrs::parse_system(*text, stem_of(file));
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors)
      std::cerr << file << ":" << e.str() << "\n";
    return 2;
  }
  return 0;
}

int run_check(const std::string& file, bool json, bool lex_search, int oracle_depth) {
  hrs::ParsedSystem parsed;
  if (int rc = load_system(file, parsed)) return rc;
  if (!parsed.unsupported.empty()) {
    std::cerr << file << ": UNSUPPORTED size algebra:\n";
    for (const auto& u : parsed.unsupported) std::cerr << "  " << u << "\n";
    return 2;
  }
  hrs::CheckOptions opts;
  opts.lex_search = lex_search;
  hrs::SystemReport rep = hrs::check_system(parsed.system, opts);

  if (oracle_depth > 0 && rep.verdict == hrs::SystemReport::Verdict::Maybe) {
    // sanity oracle: search small ground instances of left-hand sides for
    // reduction loops
    for (const auto& r : parsed.system.rules) {
      hrs::TermSubst theta;
      for (const auto& v : hrs::free_vars(r.lhs)) theta[v] = hrs::Term::cons("zero");
      hrs::Term seed = hrs::substitute(r.lhs, theta);
      if (auto w = hrs::loop_search(parsed.system, seed, oracle_depth, 20000)) {
        std::ostringstream os;
        os << "loop found from " << seed.str() << ":";
        for (const auto& t : *w) os << "  " << t.str();
        rep.system_diagnostics.push_back(os.str());
        break;
      }
    }
  }

  std::cout << (json ? hrs::render_json(parsed.system.name, rep)
                     : hrs::render_text(parsed.system.name, rep));
  if (json) std::cout << "\n";
  switch (rep.verdict) {
    case hrs::SystemReport::Verdict::Yes:
      return 0;
    case hrs::SystemReport::Verdict::Maybe:
      return 1;
    case hrs::SystemReport::Verdict::Invalid:
      return 2;
  }
  return 2;
}

int run_solve(const std::string& file, bool json) {
  auto text = read_file(file);
  if (!text) {
    std::cerr << "cannot read " << file << "\n";
    return 2;
  }
  std::string err;
  auto problem = hrs::parse_constraints(*text, &err);
  if (!problem) {
    std::cerr << file << ":" << err << "\n";
    return 2;
  }
  auto result = hrs::mgs(*problem);
  if (json) {
    nlohmann::json j;
    j["problem"] = file;
    j["satisfiable"] = result.sat();
    if (result.sat()) {
      nlohmann::json sol;
      for (const auto& v : problem->vars())
        sol[v.name] = result.subst->get(v).str();
      j["mgs"] = sol;
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << (result.sat() ? "SAT" : "UNSAT") << "\n";
    if (result.sat())
      for (const auto& v : problem->vars())
        std::cout << v.name << " := " << result.subst->get(v).str() << "\n";
  }
  return result.sat() ? 0 : 1;
}

int run_normalize(const std::string& file, const std::string& term_text, long fuel) {
  hrs::ParsedSystem parsed;
  if (int rc = load_system(file, parsed)) return rc;
  std::string err;
  auto term = hrs::parse_term(term_text, parsed.system, &err);
  if (!term) {
    std::cerr << "term: " << err << "\n";
    return 2;
  }
  long used = 0;
  auto nf = hrs::normalize(parsed.system, *term, fuel, &used);
  if (!nf) {
    std::cerr << "no normal form within " << fuel << " steps\n";
    return 1;
  }
  std::cout << nf->str() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"termination checker for simply-typed rewrite systems with sized types"};
  app.require_subcommand(1);

  std::string file, term;
  bool json = false, lex_search = false;
  int oracle_depth = 0;
  long fuel = 10000;

  auto* check = app.add_subcommand("check", "check termination of a system file");
  check->add_option("file", file)->required();
  check->add_flag("--json", json, "machine-readable report");
  check->add_flag("--lex-search", lex_search,
                  "search argument orders for the lexicographic comparison");
  check->add_option("--oracle-depth", oracle_depth,
                    "on MAYBE, search ground instances for loops to this depth");

  auto* solve = app.add_subcommand("solve", "solve a size-constraint file");
  solve->add_option("file", file)->required();
  solve->add_flag("--json", json);

  auto* norm = app.add_subcommand("normalize", "normalize a term in a system");
  norm->add_option("file", file)->required();
  norm->add_option("term", term)->required();
  norm->add_option("--fuel", fuel, "maximal number of contractions");

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand(check)) return run_check(file, json, lex_search, oracle_depth);
  if (app.got_subcommand(solve)) return run_solve(file, json);
  if (app.got_subcommand(norm)) return run_normalize(file, term, fuel);
  return 2;
}
