#include <doctest.h>

#include "hrs/size.hpp"
#include "testutil.hpp"

using namespace hrs;

namespace {

SizeExpr v(const std::string& n, unsigned k = 0) { return SizeExpr::var(n, k); }
SizeExpr c(const std::string& n, unsigned k = 0) { return SizeExpr::constant(n, k); }

}  // namespace

TEST_CASE("normalize_b") {
  SizeVar alpha{"alpha"}, x{"x"};
  // s^x (s alpha): one plain successor outside, one variable exponent
  RawB t = RawB::iter(NExpr::of(x), RawB::succ(RawB::var(alpha)));
  NormB n = normalize_b(t);
  CHECK(!n.inf);
  CHECK(n.k == 1);
  CHECK(n.iter_vars == std::vector<SizeVar>{x});
  CHECK(std::get<SizeVar>(*n.head) == alpha);
  CHECK(!to_admissible(n));  // two variables
  // s^0 alpha = alpha
  NormB n2 = normalize_b(RawB::iter(NExpr::lit(0), RawB::var(alpha)));
  CHECK(n2 == normalize_b(RawB::var(alpha)));
  auto b2 = to_admissible(n2);
  REQUIRE(b2);
  CHECK(*b2 == BExpr::var(alpha, 0));
  // inf normalizes to inf
  CHECK(normalize_b(RawB::inf()).inf);
  // s^{x+2} #c is admissible
  auto b3 = to_admissible(normalize_b(RawB::iter(NExpr::of(x, 2), RawB::constant(SizeConst{"c"}))));
  REQUIRE(b3);
  CHECK(b3->is_const());
  CHECK(b3->const_iters() == NExpr::of(x, 2));
}

TEST_CASE("property: normalize_b is confluent") {
  // applying the three equations in any order gives the same normal form;
  // random nesting of succ/iter layers over a head
  test::Rng rng(99);
  for (int round = 0; round < 300; ++round) {
    RawB t = test::pick(rng, 0, 1) ? RawB::var(SizeVar{"alpha"})
                                   : RawB::constant(SizeConst{"c"});
    unsigned plain = 0;
    long closed = 0;
    std::vector<SizeVar> xs;
    int layers = test::pick(rng, 0, 5);
    for (int i = 0; i < layers; ++i) {
      if (test::pick(rng, 0, 1)) {
        t = RawB::succ(t);
        ++plain;
      } else {
        long off = test::pick(rng, 0, 2);
        if (test::pick(rng, 0, 1)) {
          SizeVar x{"x" + std::to_string(test::pick(rng, 0, 2))};
          xs.push_back(x);
          t = RawB::iter(NExpr::of(x, off), t);
        } else {
          t = RawB::iter(NExpr::lit(off), t);
        }
        closed += off;
      }
    }
    NormB n = normalize_b(t);
    CHECK(n.k == plain + (unsigned)closed);
    // the multiset of variable exponents is preserved (order irrelevant)
    auto sorted = n.iter_vars;
    std::sort(sorted.begin(), sorted.end());
    std::sort(xs.begin(), xs.end());
    CHECK(sorted == xs);
    CHECK(normalize_b(t) == n);  // idempotent re-run
  }
}

TEST_CASE("leq") {
  CHECK(leq(v("alpha"), v("alpha", 2)) == 2);
  CHECK(!leq(v("alpha", 1), v("alpha")));
  CHECK(!leq(c("c"), c("d")));
  CHECK(leq_strict(v("a"), v("a", 1)));
  CHECK(!leq_strict(v("a"), v("a")));
}

TEST_CASE("leq_inf") {
  CHECK(leq_inf(v("a"), SizeExpr::inf()));
  CHECK(leq_inf(c("c", 5), SizeExpr::inf()));
  CHECK(leq_inf(SizeExpr::inf(), SizeExpr::inf()));
  CHECK(!leq_inf(SizeExpr::inf(), v("alpha", 1)));
  CHECK(leq_inf(c("x"), c("x", 1)));
}

TEST_CASE("apply_subst") {
  SizeSubst phi{{SizeVar{"alpha"}, c("x", 1)}};
  CHECK(apply(v("alpha", 1), phi) == c("x", 2));
  SizeSubst to_inf{{SizeVar{"alpha"}, SizeExpr::inf()}};
  CHECK(apply(v("alpha", 1), to_inf).is_inf());
  CHECK(apply(v("alpha"), SizeSubst{}) == v("alpha"));
}

TEST_CASE("decompose") {
  SizeSubst phi{{SizeVar{"alpha"}, v("beta", 2)},
                {SizeVar{"beta"}, SizeExpr::inf()},
                {SizeVar{"gamma"}, c("c")}};
  auto d = decompose(phi);
  CHECK(d.succ.at(SizeVar{"alpha"}) == 2);
  CHECK(d.head.at(SizeVar{"alpha"}) == v("beta"));
  CHECK(d.succ.at(SizeVar{"beta"}) == 0);
  CHECK(d.head.at(SizeVar{"beta"}).is_inf());
  CHECK(d.succ.at(SizeVar{"gamma"}) == 0);
  CHECK(d.head.at(SizeVar{"gamma"}) == c("c"));
}

TEST_CASE("property: decompose round-trips") {
  test::Rng rng(5);
  std::vector<SizeVar> vars{{"a"}, {"b"}, {"g"}};
  std::vector<SizeConst> consts{{"c"}, {"d"}};
  for (int round = 0; round < 200; ++round) {
    SizeSubst phi;
    for (const auto& x : vars)
      if (test::pick(rng, 0, 1))
        phi.set(x, test::random_size(rng, vars, consts, 3, true));
    auto d = decompose(phi);
    for (const auto& [x, _] : phi.entries()) {
      SizeExpr recomposed = d.head.at(x).is_inf()
                                ? SizeExpr::inf()
                                : SizeExpr::succ(d.head.at(x), d.succ.at(x));
      CHECK(recomposed == phi.get(x));
    }
  }
}

TEST_CASE("more_general") {
  SizeVar alpha{"alpha"}, beta{"beta"};
  // {alpha -> beta} is more general than {alpha -> s c} via beta -> c
  SizeSubst phi{{alpha, v("beta")}};
  SizeSubst psi{{alpha, c("c", 1)}};
  auto rho = more_general(phi, psi);
  REQUIRE(rho);
  CHECK(rho->get(beta) == c("c"));
  // reflexivity
  CHECK(more_general(psi, psi));
  // {alpha -> s beta} is not more general than {alpha -> beta}
  SizeSubst phi2{{alpha, v("beta", 1)}};
  SizeSubst psi2{{alpha, v("beta")}};
  CHECK(!more_general(phi2, psi2));
}

TEST_CASE("property: weak order is stable under substitution") {
  test::Rng rng(13);
  std::vector<SizeVar> vars{{"a"}, {"b"}};
  std::vector<SizeConst> consts{{"c"}};
  for (int round = 0; round < 500; ++round) {
    SizeExpr a = test::random_size(rng, vars, consts, 3, false);
    SizeExpr b = test::random_size(rng, vars, consts, 3, false);
    SizeSubst phi;
    for (const auto& x : vars)
      phi.set(x, test::random_size(rng, vars, consts, 2, true));
    if (leq(a, b)) {
      SizeExpr ap = apply(a, phi), bp = apply(b, phi);
      CHECK(leq_inf(ap, bp));
      if (!ap.is_inf() && !bp.is_inf()) CHECK(leq(ap, bp));
      if (leq_strict(a, b) && !bp.is_inf()) CHECK(leq_strict(ap, bp));
    }
  }
}

TEST_CASE("property: more_general returns genuine witnesses and is transitive") {
  test::Rng rng(31);
  std::vector<SizeVar> vars{{"a"}, {"b"}};
  std::vector<SizeConst> consts{{"c"}, {"d"}};
  int found = 0;
  for (int round = 0; round < 800; ++round) {
    SizeSubst phi, psi, tau;
    for (const auto& x : vars) {
      phi.set(x, test::random_size(rng, vars, consts, 2, true));
      psi.set(x, test::random_size(rng, vars, consts, 2, true));
      tau.set(x, test::random_size(rng, vars, consts, 2, true));
    }
    std::set<SizeVar> over(vars.begin(), vars.end());
    auto r1 = more_general(phi, psi, over);
    if (r1) {
      ++found;
      for (const auto& x : over) CHECK(leq_inf(apply(phi.get(x), *r1), psi.get(x)));
      auto r2 = more_general(psi, tau, over);
      if (r2) CHECK(more_general(phi, tau, over).has_value());
    }
  }
  CHECK(found > 50);
}
