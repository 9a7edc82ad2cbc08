#include <doctest.h>

#include "hrs/termination.hpp"
#include "testutil.hpp"

using namespace hrs;

namespace {

bool has_triple(const std::vector<AccTriple>& ts, const std::string& var,
                const Type& ty, const std::string& measured) {
  for (const auto& t : ts)
    if (t.t.kind() == Term::Kind::Var && t.t.name() == var && t.ty == ty &&
        t.measured == measured)
      return true;
  return false;
}

}  // namespace

TEST_CASE("accessible_triples") {
  RewriteSystem div = test::load_corpus("div.hrs");
  // (x, N, N) accessible in (succ x, N, N)
  auto t1 = accessible_triples(Term::app(Term::cons("succ"), Term::var("x")),
                               Type::sort("N"), div);
  CHECK(has_triple(t1, "x", Type::sort("N"), "N"));

  RewriteSystem hv = test::load_corpus("howard-v.hrs");
  // (f, N -> O, O) accessible in (lim f, O, O)
  auto t2 = accessible_triples(Term::app(Term::cons("lim"), Term::var("f")),
                               Type::sort("O"), hv);
  CHECK(has_triple(t2, "f", Type::arrow(Type::sort("N"), Type::sort("O")), "O"));

  // c : (B -> C) -> B has a non-positive argument: x is not accessible
  RewriteSystem neg = test::must_parse(
      "sort B\nsort C\norder C < B\ncons c : (B -> C) -> B\nfun g : B(a) -> B { args = 1 }\n");
  auto t3 = accessible_triples(Term::app(Term::cons("c"), Term::var("x")),
                               Type::sort("B"), neg);
  CHECK(!has_triple(t3, "x", Type::arrow(Type::sort("B"), Type::sort("C")), "B"));
  CHECK(t3.size() == 1);  // only the reflexive triple
}

TEST_CASE("property: accessibility is stable under substitution") {
  RewriteSystem sys = test::load_corpus("quicksort.hrs");
  test::Rng rng(17);
  for (int round = 0; round < 60; ++round) {
    auto pat = parse_term("cond (pair (cons l x) m) p b", sys);
    REQUIRE(pat);
    auto before = accessible_triples(*pat, Type::sort("C"), sys);
    TermSubst theta;
    for (const auto& v : free_vars(*pat)) {
      // substitute ground terms of the right sorts where easy: x:N, others vary
      if (v == "x") {
        auto t = test::random_term(rng, sys, Type::sort("N"), 3);
        if (t) theta[v] = *t;
      }
    }
    auto after = accessible_triples(substitute(*pat, theta), Type::sort("C"), sys);
    // every variable triple of the original has a substituted counterpart
    for (const auto& tr : before) {
      if (tr.t.kind() != Term::Kind::Var) continue;
      Term expect = substitute(tr.t, theta);
      bool found = false;
      for (const auto& tr2 : after)
        found = found || (alpha_equal(tr2.t, expect) && tr2.ty == tr.ty &&
                          tr2.measured == tr.measured);
      CHECK(found);
    }
  }
}

TEST_CASE("recursive_subterms") {
  // b (c (c a)) x over a sort with unary c (recursive) and binary b
  RewriteSystem sys = test::must_parse(
      "sort B\n"
      "cons a : B canonical\n"
      "cons c : B(a) -> B(s a)\n"
      "cons b : B(a) -> B(a) -> B(s a)\n"
      "fun g : B(a) -> B { args = 1 }\n");
  auto t = parse_term("b (c (c a)) x", sys);
  REQUIRE(t);
  auto sub = recursive_subterms(*t, "B", sys);
  CHECK(sub.simple);
  CHECK(sub.rd == 3);  // the leaf a sits at depth 3
  CHECK(sub.rd_x == std::map<std::string, long>{{"x", 1}});
  REQUIRE(sub.entries.size() == 2);
  // {(a, B, 3), (x, B, 1)}
  bool found_a = false, found_x = false;
  for (const auto& e : sub.entries) {
    if (e.t.kind() == Term::Kind::Cons && e.t.name() == "a")
      found_a = e.depth == 3 && e.intrinsic == 0;
    if (e.t.kind() == Term::Kind::Var && e.t.name() == "x") found_x = e.depth == 1;
  }
  CHECK(found_a);
  CHECK(found_x);

  CHECK(is_simple(Term::var("x"), "B", sys));
  CHECK(rd(Term::var("x"), "B", sys) == 0);
  auto sx = parse_term("c x", sys);
  CHECK(is_simple(*sx, "B", sys));
  CHECK(rd(*sx, "B", sys) == 1);
  CHECK(rd_x(*sx, "B", "x", sys) == 1);
  // g x is not simple
  auto gx = parse_term("g x", sys);
  CHECK(!is_simple(*gx, "B", sys));
}

TEST_CASE("recursive_subterms: size pass-through") {
  RewriteSystem qs = test::load_corpus("quicksort.hrs");
  // cond p q true decomposes to p and q at depth 0 (sigma of cond is alpha)
  auto t = parse_term("cond p q true", qs);
  REQUIRE(t);
  auto sub = recursive_subterms(*t, "C", qs);
  CHECK(sub.simple);
  CHECK(sub.rd_x == std::map<std::string, long>{{"p", 0}, {"q", 0}});
  CHECK(sub.var_entry.at("p").measured == "P");
}

TEST_CASE("infer_precedence") {
  RewriteSystem div = test::load_corpus("div.hrs");
  std::vector<std::string> errs;
  Precedence p = infer_precedence(div, errs);
  CHECK(errs.empty());
  CHECK(p.less("sub", "div"));
  CHECK(!p.less("div", "sub"));
  CHECK(!p.equiv("sub", "div"));
  // constructors and variables are below every function
  CHECK(p.less("succ", "sub"));

  RewriteSystem mf = test::load_corpus("map-filter.hrs");
  Precedence p2 = infer_precedence(mf, errs);
  CHECK(p2.less("newsi", "filter"));
  CHECK(p2.equiv("filter", "filter"));

  RewriteSystem loop = test::load_corpus("loop.hrs");
  Precedence p3 = infer_precedence(loop, errs);
  CHECK(p3.equiv("f", "f"));
  CHECK(!p3.less("f", "f"));

  // contradictory user declaration: rev ~ revremlast from the corpus file
  // combined with a strict user pair inside one component
  RewriteSystem bad = test::must_parse(
      "sort N\ncons z : N canonical\nfun a : N(x) -> N { args = 1 }\n"
      "fun b : N(x) -> N { args = 1 }\nprec a ~ b\nprec a < b\n");
  std::vector<std::string> errs2;
  infer_precedence(bad, errs2);
  CHECK(!errs2.empty());
}

TEST_CASE("build_rule_context: division") {
  RewriteSystem sys = test::load_corpus("div.hrs");
  FreshSizes fresh;
  // div (succ x) (succ y) -> succ (div (sub x y) (succ y))
  const Rule& r = sys.rules[4];
  REQUIRE(r.head == "div");
  auto ctx = build_rule_context(r, sys, fresh);
  REQUIRE(ctx);
  REQUIRE(ctx->args.size() == 1);
  CHECK(ctx->args[0].n == 1);
  CHECK(ctx->args[0].gamma == SizeVar{"x"});
  CHECK(ctx->args[0].sub.rd_x == std::map<std::string, long>{{"x", 1}});
  CHECK(ctx->phi.get(SizeVar{"a"}) == SizeExpr::var("x", 1));
  CHECK(ctx->gamma_env.at("x") == AnnType::sort("N", SizeExpr::var("x")));
  CHECK(ctx->gamma_env.at("y") == AnnType::sort("N", SizeExpr::var("y")));

  // sub zero y -> zero: ground termination argument, fresh gamma, n = 0
  const Rule& r2 = sys.rules[1];
  REQUIRE(r2.head == "sub");
  auto ctx2 = build_rule_context(r2, sys, fresh);
  REQUIRE(ctx2);
  CHECK(ctx2->args[0].n == 0);
  CHECK(ctx2->args[0].sub.rd_x.empty());
  CHECK(ctx2->phi.get(SizeVar{"a"}).iters() == 0);
}

TEST_CASE("build_rule_context: shared variable unifies argument classes") {
  RewriteSystem sys = test::load_corpus("shared-gamma.hrs");
  FreshSizes fresh;
  const Rule& r = sys.rules[0];
  auto ctx = build_rule_context(r, sys, fresh);
  REQUIRE(ctx);
  // x1 occurs in both termination arguments, so they share one class
  CHECK(ctx->args[0].gamma == ctx->args[1].gamma);
  CHECK(ctx->args[0].n == 1);
  CHECK(ctx->args[1].n == 2);
  auto min = check_minimality(*ctx);
  CHECK(!min.ok);
  CHECK(min.failed == "(d)");
}

TEST_CASE("check_minimality: division passes") {
  RewriteSystem sys = test::load_corpus("div.hrs");
  FreshSizes fresh;
  for (const auto& r : sys.rules) {
    auto ctx = build_rule_context(r, sys, fresh);
    REQUIRE(ctx);
    auto min = check_minimality(*ctx);
    CHECK_MESSAGE(min.ok, r.name << ": " << min.detail);
  }
}

TEST_CASE("check_rule") {
  RewriteSystem div = test::load_corpus("div.hrs");
  std::vector<std::string> errs;
  Precedence prec = infer_precedence(div, errs);
  for (const auto& r : div.rules) {
    auto v = check_rule(r, div, prec);
    CHECK_MESSAGE(v.pass(), r.name << ": "
                                   << (v.diagnostics.empty() ? "?" : v.diagnostics[0]));
  }
  // the limit rule of howard-v: call under a binder
  RewriteSystem hv = test::load_corpus("howard-v.hrs");
  Precedence prec2 = infer_precedence(hv, errs);
  const Rule* limrule = nullptr;
  for (const auto& r : hv.rules)
    if (r.lhs.str().find("lim") != std::string::npos) limrule = &r;
  REQUIRE(limrule);
  auto v2 = check_rule(*limrule, hv, prec2);
  CHECK_MESSAGE(v2.pass(), (v2.diagnostics.empty() ? "?" : v2.diagnostics[0]));
  REQUIRE(v2.sites.size() == 1);
  // the call under the binder carries the size of the limit stage
  REQUIRE(v2.sites[0].sizes.size() == 1);
  CHECK(v2.sites[0].sizes[0] == SizeExpr::var("f"));
  CHECK(v2.bound == std::vector<SizeExpr>{SizeExpr::var("f", 1)});

  // f x -> f x is rejected
  RewriteSystem loop = test::load_corpus("loop.hrs");
  Precedence prec3 = infer_precedence(loop, errs);
  auto v3 = check_rule(loop.rules[0], loop, prec3);
  CHECK(!v3.pass());
  CHECK(!v3.srd);  // the minimal phi cannot decrease
}

TEST_CASE("check_system: corpus verdicts") {
  CHECK(check_system(test::load_corpus("div.hrs")).verdict ==
        SystemReport::Verdict::Yes);
  CHECK(check_system(test::load_corpus("quicksort.hrs")).verdict ==
        SystemReport::Verdict::Yes);
  auto loop = check_system(test::load_corpus("loop.hrs"));
  CHECK(loop.verdict == SystemReport::Verdict::Maybe);
}

TEST_CASE("check_system: modular union of accepted systems") {
  // split the division corpus in two halves sharing all declarations
  std::string decls =
      "sort N\ncons zero : N(a)\ncons succ : N(a) -> N(s a)\n"
      "fun sub : N(a) -> N -> N(a) { args = 1 }\n"
      "fun div : N(a) -> N -> N(a) { args = 1 }\nprec sub < div\n";
  std::string half1 =
      "rule sub x zero -> x\nrule sub zero y -> zero\n"
      "rule sub (succ x) (succ y) -> sub x y\n";
  std::string half2 =
      "rule div zero (succ y) -> zero\n"
      "rule div (succ x) (succ y) -> succ (div (sub x y) (succ y))\n";
  auto a = test::must_parse(decls + half1);
  auto b = test::must_parse(decls + half2);
  auto ab = test::must_parse(decls + half1 + half2);
  CHECK(check_system(a).verdict == SystemReport::Verdict::Yes);
  CHECK(check_system(b).verdict == SystemReport::Verdict::Yes);
  CHECK(check_system(ab).verdict == SystemReport::Verdict::Yes);
}

TEST_CASE("concrete_size") {
  RewriteSystem div = test::load_corpus("div.hrs");
  auto t = parse_term("succ (succ zero)", div);
  REQUIRE(t);
  CHECK(concrete_size(div, *t) == 2);
  CHECK(concrete_size(div, *parse_term("zero", div)) == 0);
  // node (leaf a) (node (leaf a) (leaf a) b) c has height 2
  RewriteSystem trees = test::must_parse(
      "sort B\nsort T\norder B < T\n"
      "cons a : B canonical\ncons b : B canonical\ncons c : B canonical\n"
      "cons leaf : B -> T canonical\n"
      "cons node : T(x) -> T(x) -> B -> T(s x)\n"
      "fun g : T(x) -> T { args = 1 }\n");
  auto tr = parse_term("node (leaf a) (node (leaf a) (leaf a) b) c", trees);
  REQUIRE(tr);
  CHECK(concrete_size(trees, *tr) == 2);
  // non-ground input is rejected
  std::string err;
  CHECK(!concrete_size(div, *parse_term("succ x", div), &err));
}

TEST_CASE("property: simple-term size law on random ground instances") {
  RewriteSystem sys = test::must_parse(
      "sort B\n"
      "cons a : B canonical\n"
      "cons c : B(a) -> B(s a)\n"
      "cons b : B(a) -> B(a) -> B(s a)\n"
      "fun g : B(a) -> B { args = 1 }\n");
  test::Rng rng(2024);
  int checked = 0;
  for (int round = 0; round < 300; ++round) {
    // random simple pattern over variables u, v
    std::function<Term(int)> gen = [&](int depth) -> Term {
      int k = test::pick(rng, 0, depth > 0 ? 3 : 1);
      switch (k) {
        case 0:
          return Term::var(test::pick(rng, 0, 1) ? "u" : "v");
        case 1:
          return Term::cons("a");
        case 2:
          return Term::app(Term::cons("c"), gen(depth - 1));
        default:
          return Term::app(Term::cons("b"), {gen(depth - 1), gen(depth - 1)});
      }
    };
    Term pat = gen(3);
    auto sub = recursive_subterms(pat, "B", sys);
    REQUIRE(sub.simple);
    TermSubst theta;
    for (const auto& v : free_vars(pat)) {
      auto t = test::random_term(rng, sys, Type::sort("B"), 3, {}, true);
      REQUIRE(t);
      theta[v] = *t;
    }
    auto size = concrete_size(sys, substitute(pat, theta));
    REQUIRE(size);
    long expect = sub.rd;
    for (const auto& [x, d] : sub.rd_x) {
      if (!theta.count(x)) continue;
      auto sx = concrete_size(sys, theta[x]);
      REQUIRE(sx);
      expect = std::max(expect, *sx + d);
    }
    CHECK(*size == expect);
    ++checked;
  }
  CHECK(checked == 300);
}

TEST_CASE("property: minimality constraints admit the lemma valuation") {
  // for accepted rules, random kappa vectors extend to valuations satisfying
  // the five numeric constraints via the lemma-proof construction
  RewriteSystem sys = test::load_corpus("div.hrs");
  test::Rng rng(4242);
  FreshSizes fresh;
  for (const auto& r : sys.rules) {
    auto ctx = build_rule_context(r, sys, fresh);
    REQUIRE(ctx);
    REQUIRE(check_minimality(*ctx).ok);
    for (int round = 0; round < 100; ++round) {
      std::map<std::string, long> kappa;
      for (const auto& [x, _] : ctx->vars) kappa[x] = test::pick(rng, 0, 12);
      // construction: gamma_j = sup({rd_j} u {kappa_x + d}) - n_j;
      // alpha_x = gamma class value when shared, else kappa_x
      std::map<std::string, long> gamma_val;
      for (size_t j = 0; j < ctx->args.size(); ++j) {
        long s = ctx->args[j].sub.rd;
        for (const auto& [x, d] : ctx->args[j].sub.rd_x)
          s = std::max(s, kappa[x] + d);
        gamma_val[ctx->args[j].gamma.name] = s - ctx->args[j].n;
      }
      auto beta = [&](const std::string& x) {
        auto it = gamma_val.find(ctx->vars.at(x).alpha_x.name);
        if (it != gamma_val.end()) return it->second;
        return kappa[x];
      };
      // constraint 4: kappa_x <= beta_x
      for (const auto& [x, _] : ctx->vars) CHECK(kappa[x] <= beta(x));
      // constraint 5: gamma_j + n_j equals the instantiated size
      for (size_t j = 0; j < ctx->args.size(); ++j) {
        long s = ctx->args[j].sub.rd;
        for (const auto& [x, d] : ctx->args[j].sub.rd_x)
          s = std::max(s, kappa[x] + d);
        CHECK(gamma_val[ctx->args[j].gamma.name] + ctx->args[j].n == s);
      }
    }
  }
}

TEST_CASE("check_system: lexicographic argument search") {
  // the recursive call decreases in the second argument while the first
  // grows, so only the reversed comparison order succeeds
  RewriteSystem sys = test::must_parse(
      "sort N\ncons zero : N canonical\ncons succ : N(a) -> N(s a)\n"
      "fun g : N(a) -> N(b) -> N { args = 2 }\n"
      "rule g (succ x) (succ y) -> g (succ (succ x)) y\n"
      "rule g x zero -> x\n"
      "rule g zero y -> zero\n");
  CHECK(check_system(sys).verdict == SystemReport::Verdict::Maybe);
  CheckOptions opts;
  opts.lex_search = true;
  auto rep = check_system(sys, opts);
  CHECK(rep.verdict == SystemReport::Verdict::Yes);
}

TEST_CASE("check_minimality: a forced non-minimal bound fails condition (c)") {
  // f x with phi = {a -> s x}: the bound exceeds the least recursion depth
  // (0 for a bare variable), so no valuation can make it exact
  RewriteSystem sys = test::load_corpus("loop.hrs");
  FreshSizes fresh;
  auto ctx = build_rule_context(sys.rules[0], sys, fresh);
  REQUIRE(ctx);
  ctx->args[0].n = 1;  // pretend phi(a) = s x
  ctx->phi.set(SizeVar{"a"}, SizeExpr::var(ctx->args[0].gamma, 1));
  auto min = check_minimality(*ctx);
  CHECK(!min.ok);
  CHECK(min.failed == "(c)");
}

TEST_CASE("check_system: deep matching is handled, rebuilt siblings are not") {
  // matching b x1 (c x2) and recursing on x2 alone decreases the height
  std::string decls =
      "sort B\n"
      "cons bz : B canonical\n"
      "cons c : B(a) -> B(s a)\n"
      "cons b : B(a) -> B(a) -> B(s a)\n"
      "fun f : B(a) -> B { args = 1 }\n"
      "rule f bz -> bz\n";
  auto good = test::must_parse(decls + "rule f (b x1 (c x2)) -> f x2\n");
  CHECK(check_system(good).verdict == SystemReport::Verdict::Yes);
  // rebuilding b x1 x2 does not: the height of b x1 x2 can equal the height
  // of b x1 (c x2) when x1 dominates
  auto bad = test::must_parse(decls + "rule f (b x1 (c x2)) -> f (b x1 x2)\n");
  auto rep = check_system(bad);
  CHECK(rep.verdict == SystemReport::Verdict::Maybe);
}
