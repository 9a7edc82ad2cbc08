#include <doctest.h>

#include <json.hpp>

#include "hrs/parser.hpp"
#include "hrs/report.hpp"
#include "testutil.hpp"

using namespace hrs;

TEST_CASE("parse_system: division file") {
  auto parsed = parse_system(test::read_file(std::string(CORPUS_DIR) + "/div.hrs"));
  REQUIRE(parsed.ok());
  CHECK(parsed.unsupported.empty());
  CHECK(parsed.system.funs.size() == 2);
  CHECK(parsed.system.cons.size() == 2);
  CHECK(parsed.system.rules.size() == 5);
  CHECK(parsed.system.funs.at("sub").q == 1);
  CHECK(parsed.system.funs.at("sub").sigma == SizeExpr::var("a"));
}

TEST_CASE("parse_system: canonical keyword") {
  auto sys = test::must_parse(
      "sort N\ncons zero : N canonical\ncons succ : N -> N canonical\n"
      "fun f : N(a) -> N { args = 1 }\n");
  const ConstructorSig& succ = sys.cons.at("succ");
  CHECK(succ.cls.p == 1);
  CHECK(succ.cls.q == 1);
  CHECK(succ.alpha[0] == SizeExpr::var("a"));
  CHECK(succ.sigma == SizeExpr::var("a", 1));
  const ConstructorSig& zero = sys.cons.at("zero");
  CHECK(zero.sigma == SizeExpr::var("a"));
}

TEST_CASE("parse_system: rule shape errors") {
  // rhs not typable at the lhs type is a validation error, surfaced by check
  auto parsed = parse_system(
      "sort N\ncons zero : N canonical\ncons succ : N(a) -> N(s a)\n"
      "fun sub : N(a) -> N -> N(a) { args = 1 }\n"
      "rule sub x -> x\n");
  REQUIRE(parsed.ok());  // parses; the type clash is a semantic diagnostic
  auto diags = validate_rule(parsed.system.rules[0], parsed.system);
  REQUIRE(!diags.empty());
  // lhs headed by a constructor is rejected at parse time
  auto parsed2 = parse_system("sort N\ncons zero : N canonical\nrule zero -> zero\n");
  CHECK(!parsed2.ok());
}

TEST_CASE("parse_system: unsupported algebras are flagged") {
  auto parsed = parse_system(
      "sort N\ncons zero : N canonical\ncons succ : N(a + 1) -> N\n"
      "fun f : N(a) -> N { args = 1 }\n");
  REQUIRE(parsed.ok());
  REQUIRE(!parsed.unsupported.empty());
  CHECK(parsed.unsupported[0].find("'+'") != std::string::npos);
  auto rev = parse_system(test::read_file(std::string(CORPUS_DIR) + "/reverse.hrs"));
  CHECK(rev.ok());
  CHECK(!rev.unsupported.empty());
  auto sho = parse_system(
      test::read_file(std::string(CORPUS_DIR) + "/shostak-conditional.hrs"));
  CHECK(sho.ok());
  CHECK(!sho.unsupported.empty());
}

TEST_CASE("parse_term resolves declared symbols") {
  RewriteSystem sys = test::load_corpus("div.hrs");
  auto t = parse_term("sub (succ x) zero", sys);
  REQUIRE(t);
  auto [h, args] = t->spine();
  CHECK(h.kind() == Term::Kind::Fun);
  CHECK(args[0].spine().first.kind() == Term::Kind::Cons);
  CHECK(args[1].kind() == Term::Kind::Cons);
  // undeclared identifiers are variables
  CHECK(parse_term("y", sys)->kind() == Term::Kind::Var);
  // lambda with a simple-type annotation
  auto l = parse_term("\\x:N -> N. x zero", sys);
  REQUIRE(l);
  CHECK(l->bound_type() == Type::arrow(Type::sort("N"), Type::sort("N")));
}

TEST_CASE("parse_constraints") {
  auto p = parse_constraints("a <= s b\n// comment\n\ns s #c <= inf\n");
  REQUIRE(p);
  REQUIRE(p->cs.size() == 2);
  CHECK(p->cs[0].first == SizeExpr::var("a"));
  CHECK(p->cs[0].second == SizeExpr::var("b", 1));
  CHECK(p->cs[1].first == SizeExpr::constant("c", 2));
  CHECK(p->cs[1].second.is_inf());
  std::string err;
  CHECK(!parse_constraints("a <= b + 1\n", &err));
  CHECK(!parse_constraints("a <=\n", &err));
}

TEST_CASE("round-trip: parse after print is the identity on the corpus") {
  for (const auto& name : {"div.hrs", "map-filter.hrs", "goedel-t.hrs",
                           "howard-v.hrs", "quicksort.hrs", "loop.hrs",
                           "shared-gamma.hrs"}) {
    RewriteSystem sys = test::load_corpus(name);
    std::string once = print_system(sys);
    auto reparsed = parse_system(once, sys.name);
    REQUIRE_MESSAGE(reparsed.ok(), name);
    CHECK_MESSAGE(print_system(reparsed.system) == once, name);
    // semantic spot check: the reparsed system gets the same verdict
    CHECK(check_system(reparsed.system).verdict == check_system(sys).verdict);
  }
}

TEST_CASE("JSON report schema is stable") {
  RewriteSystem sys = test::load_corpus("div.hrs");
  auto rep = check_system(sys);
  auto j = nlohmann::json::parse(render_json("div", rep));
  CHECK(j.contains("system"));
  CHECK(j.contains("verdict"));
  CHECK(j["verdict"] == "YES");
  REQUIRE(j.contains("rules"));
  REQUIRE(j["rules"].is_array());
  REQUIRE(j["rules"].size() == 5);
  for (const auto& r : j["rules"]) {
    CHECK(r.contains("name"));
    CHECK(r.contains("monotony"));
    CHECK(r.contains("accessibility"));
    CHECK(r.contains("minimality"));
    CHECK(r.contains("subject_reduction_decrease"));
    CHECK(r.contains("diagnostics"));
  }
}

TEST_CASE("text report carries the verdict") {
  RewriteSystem sys = test::load_corpus("loop.hrs");
  auto rep = check_system(sys);
  std::string text = render_text("loop", rep);
  CHECK(text.find("MAYBE") != std::string::npos);
  CHECK(text.find("f#1") != std::string::npos);
}

TEST_CASE("fuzz: the parser survives arbitrary input") {
  test::Rng rng(0xFEED);
  const std::string alphabet =
      "abcdefgznNLCO ()\\.:->{}=<~#+*0123456789\n\t/ sortconsfunprecrule";
  for (int round = 0; round < 2000; ++round) {
    std::string text;
    int len = test::pick(rng, 0, 160);
    for (int i = 0; i < len; ++i)
      text += alphabet[test::pick(rng, 0, (int)alphabet.size() - 1)];
    auto parsed = parse_system(text);  // must not crash or hang
    if (parsed.ok() && parsed.unsupported.empty())
      check_system(parsed.system);     // nor must checking what it produced
    parse_constraints(text);
  }
}
