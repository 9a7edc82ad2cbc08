#include <doctest.h>

#include "hrs/infer.hpp"
#include "hrs/termination.hpp"
#include "testutil.hpp"

using namespace hrs;

namespace {

struct DivFixture {
  RewriteSystem sys = test::load_corpus("div.hrs");
  Precedence prec;
  FreshSizes fresh;
  DivFixture() {
    std::vector<std::string> errs;
    prec = infer_precedence(sys, errs);
    REQUIRE(errs.empty());
  }
  AnnEnv env() {
    // [x : N_#x, y : N] with x frozen to a constant
    return {{"x", AnnType::sort("N", SizeExpr::constant("x"))},
            {"y", AnnType::sort("N")}};
  }
  Term parse(const std::string& s) {
    auto t = parse_term(s, sys);
    REQUIRE(t);
    return *t;
  }
};

}  // namespace

TEST_CASE("infer: division ground truth") {
  DivFixture fx;
  // infer(sub x y) = N_x
  auto r1 = infer(fx.sys, fx.prec, "div", fx.env(), fx.parse("sub x y"), fx.fresh);
  REQUIRE(r1.ok());
  CHECK(*r1.type == AnnType::sort("N", SizeExpr::constant("x")));
  // infer(s (div (sub x y) (s y))) = N_{s x}
  auto r2 = infer(fx.sys, fx.prec, "div", fx.env(),
                  fx.parse("succ (div (sub x y) (succ y))"), fx.fresh);
  REQUIRE(r2.ok());
  CHECK(*r2.type == AnnType::sort("N", SizeExpr::constant("x", 1)));
  // infer(\x:N. x) = N -> N
  auto r3 = infer(fx.sys, fx.prec, "div", {}, fx.parse("\\x:N. x"), fx.fresh);
  REQUIRE(r3.ok());
  CHECK(*r3.type == AnnType::plain(Type::arrow(Type::sort("N"), Type::sort("N"))));
}

TEST_CASE("infer: precedence and shape errors") {
  DivFixture fx;
  // div is not below sub
  auto r = infer(fx.sys, fx.prec, "sub", fx.env(), fx.parse("div x y"), fx.fresh);
  CHECK(!r.ok());
  CHECK(r.error.find("precedence") != std::string::npos);
  // beta-redex heads are rejected
  auto r2 = infer(fx.sys, fx.prec, "div", fx.env(),
                  fx.parse("(\\x:N. x) y"), fx.fresh);
  CHECK(!r2.ok());
  CHECK(r2.error.find("beta") != std::string::npos);
  // equivalent symbol applied below its termination arguments
  auto r3 = infer(fx.sys, fx.prec, "div", fx.env(), fx.parse("div"), fx.fresh);
  CHECK(!r3.ok());
}

TEST_CASE("collect_call_sites: division derivation has one site") {
  DivFixture fx;
  auto r = infer(fx.sys, fx.prec, "div", fx.env(),
                 fx.parse("succ (div (sub x y) (succ y))"), fx.fresh);
  REQUIRE(r.ok());
  auto sites = collect_call_sites(fx.sys, fx.prec, "div", *r.deriv, {});
  REQUIRE(sites.size() == 1);
  CHECK(sites[0].head == "div");
  REQUIRE(sites[0].sizes.size() == 1);
  CHECK(sites[0].sizes[0] == SizeExpr::constant("x"));
  // rhs with no equivalent calls
  auto r2 = infer(fx.sys, fx.prec, "div", fx.env(), fx.parse("zero"), fx.fresh);
  REQUIRE(r2.ok());
  CHECK(collect_call_sites(fx.sys, fx.prec, "div", *r2.deriv, {}).empty());
}

TEST_CASE("call_compare") {
  auto x = SizeExpr::constant("x");
  auto sx = SizeExpr::constant("x", 1);
  auto y = SizeExpr::constant("y", 1);
  auto ssy = SizeExpr::constant("y", 2);
  CHECK(call_compare({x}, {sx}));
  CHECK(!call_compare({sx}, {x}));
  // lexicographic: first equal, second strict
  CHECK(call_compare({x, y}, {x, ssy}));
  CHECK(!call_compare({x, ssy}, {x, y}));
  // the left side must be finite at the strict position
  CHECK(!call_compare({SizeExpr::inf()}, {sx}));
}

TEST_CASE("check: division last rule") {
  DivFixture fx;
  // Gamma = [x:N_x, y:N_y], phi = {a -> s x},
  // t = s (div (sub x y) (s y)), target N_{a phi}
  AnnEnv env{{"x", AnnType::sort("N", SizeExpr::var("x"))},
             {"y", AnnType::sort("N", SizeExpr::var("y"))}};
  SizeSubst phi{{SizeVar{"a"}, SizeExpr::var("x", 1)}};
  AnnType target = AnnType::sort("N", SizeExpr::var("x", 1));
  auto res = check(fx.sys, fx.prec, "div", env, phi,
                   fx.parse("succ (div (sub x y) (succ y))"), target, fx.fresh);
  CHECK(res.ok);
  REQUIRE(res.sites.size() == 1);
  CHECK(res.sites[0].sizes[0] == SizeExpr::var("x"));
  CHECK(res.bound == std::vector<SizeExpr>{SizeExpr::var("x", 1)});
}

TEST_CASE("check: f x -> f x passes decreasingness with phi = s x") {
  // the looping rule is only rejected by minimality: with the (non-minimal)
  // bound phi = {a -> s x} the inferred call size x sits strictly below s x
  RewriteSystem sys = test::load_corpus("loop.hrs");
  std::vector<std::string> errs;
  Precedence prec = infer_precedence(sys, errs);
  FreshSizes fresh;
  AnnEnv env{{"x", AnnType::sort("N", SizeExpr::var("x"))}};
  SizeSubst phi{{SizeVar{"a"}, SizeExpr::var("x", 1)}};
  auto t = parse_term("f x", sys);
  REQUIRE(t);
  auto res = check(sys, prec, "f", env, phi, *t, AnnType::sort("N"), fresh);
  CHECK(res.ok);
  // with the minimal phi = {a -> x} the same call does not decrease
  SizeSubst phi2{{SizeVar{"a"}, SizeExpr::var("x")}};
  auto res2 = check(sys, prec, "f", env, phi2, *t, AnnType::sort("N"), fresh);
  CHECK(!res2.ok);
  CHECK(res2.failed_step == 3);
}

TEST_CASE("check: target with a strictly smaller annotation fails at step 2") {
  DivFixture fx;
  AnnEnv env{{"x", AnnType::sort("N", SizeExpr::var("x"))}};
  SizeSubst phi{{SizeVar{"a"}, SizeExpr::var("x", 1)}};
  // inferred N_{s x} against target N_x: s x <= x is unsatisfiable
  auto res = check(fx.sys, fx.prec, "div", env, phi, fx.parse("succ x"),
                   AnnType::sort("N", SizeExpr::var("x")), fx.fresh);
  CHECK(!res.ok);
  CHECK(res.failed_step == 2);
}

TEST_CASE("freezing round-trip: verdicts carry the caller's variables") {
  DivFixture fx;
  AnnEnv env{{"x", AnnType::sort("N", SizeExpr::var("x"))},
             {"y", AnnType::sort("N", SizeExpr::var("y"))}};
  SizeSubst phi{{SizeVar{"a"}, SizeExpr::var("x", 1)}};
  auto res = check(fx.sys, fx.prec, "div", env, phi,
                   fx.parse("succ (div (sub x y) (succ y))"),
                   AnnType::sort("N", SizeExpr::var("x", 1)), fx.fresh);
  REQUIRE(res.ok);
  REQUIRE(res.inferred);
  // no frozen constants leak: the reported type is over x again
  CHECK(*res.inferred == AnnType::sort("N", SizeExpr::var("x", 1)));
  CHECK(res.sites[0].sizes[0] == SizeExpr::var("x"));
}

TEST_CASE("property: derivations replay") {
  DivFixture fx;
  test::Rng rng(808);
  int replayed = 0;
  for (int round = 0; round < 150; ++round) {
    auto t = test::random_term(rng, fx.sys, Type::sort("N"), 4);
    if (!t) continue;
    auto r = infer(fx.sys, fx.prec, "div", {}, *t, fx.fresh);
    if (!r.ok()) continue;  // e.g. terms that call div below sub
    std::string why;
    CHECK_MESSAGE(replay(fx.sys, *r.deriv, &why), why);
    ++replayed;
  }
  CHECK(replayed > 50);
}

TEST_CASE("property: derivations are stable under size substitution") {
  // applying a size substitution to every type of a closed-environment
  // derivation preserves node-local validity (solutions are stable)
  DivFixture fx;
  auto r = infer(fx.sys, fx.prec, "div", fx.env(),
                 fx.parse("succ (div (sub x y) (succ y))"), fx.fresh);
  REQUIRE(r.ok());
  // substitute a fresh constant for the frozen #x everywhere by re-running
  // with a different environment; the derivation shape is unchanged
  AnnEnv env2{{"x", AnnType::sort("N", SizeExpr::constant("q", 2))},
              {"y", AnnType::sort("N")}};
  auto r2 = infer(fx.sys, fx.prec, "div", env2,
                  fx.parse("succ (div (sub x y) (succ y))"), fx.fresh);
  REQUIRE(r2.ok());
  CHECK(*r2.type == AnnType::sort("N", SizeExpr::constant("q", 3)));
  std::string why;
  CHECK_MESSAGE(replay(fx.sys, *r2.deriv, &why), why);
}

TEST_CASE("property: principality on corpus rule checks") {
  // whenever check succeeds, the inferred most general type fits the target
  // by subtyping after instantiation: spot-check on the division rules
  DivFixture fx;
  std::vector<std::string> errs;
  for (const auto& rule : fx.sys.rules) {
    FreshSizes fresh;
    auto ctx = build_rule_context(rule, fx.sys, fresh);
    REQUIRE(ctx);
    auto target = AnnType::sort("N", apply(SizeExpr::var("a"), ctx->phi));
    auto res = check(fx.sys, fx.prec, rule.head, ctx->gamma_env, ctx->phi, rule.rhs,
                     target, fresh);
    CHECK(res.ok);
    REQUIRE(res.inferred);
    // the inferred type instantiates below the target: here both are ground
    // modulo the context variables, so direct subtyping must hold after the
    // step-2 fit, which check already validated; assert the reported type
    // strips to the right simple type
    CHECK(strip(*res.inferred) == Type::sort("N"));
  }
}

TEST_CASE("infer: filter rule body gets the successor-bounded list type") {
  RewriteSystem sys = test::load_corpus("map-filter.hrs");
  std::vector<std::string> errs;
  Precedence prec = infer_precedence(sys, errs);
  FreshSizes fresh;
  AnnEnv env{{"l", AnnType::sort("L", SizeExpr::constant("l"))},
             {"x", AnnType::sort("N")},
             {"f", AnnType::plain(Type::arrow(Type::sort("N"), Type::sort("B")))}};
  auto body = parse_term("newsi (cond (cons (filter l f) x) (filter l f) (f x))", sys);
  REQUIRE(body);
  auto r = infer(sys, prec, "filter", env, *body, fresh);
  REQUIRE_MESSAGE(r.ok(), r.error);
  CHECK(*r.type == AnnType::sort("L", SizeExpr::constant("l", 1)));
  auto sites = collect_call_sites(sys, prec, "filter", *r.deriv, {});
  CHECK(sites.size() == 2);  // both filter calls, both at size l
  for (const auto& s : sites) {
    REQUIRE(s.sizes.size() == 1);
    CHECK(s.sizes[0] == SizeExpr::constant("l"));
  }
}
