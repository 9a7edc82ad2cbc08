#include "hrs/termination.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <sstream>

namespace hrs {

namespace {

void acc_rec(const Term& t, const Type& ty, const std::string& measured,
             const RewriteSystem& sys, std::vector<AccTriple>& out) {
  out.push_back({t, ty, measured});
  if (!ty.is_sort() || ty.sort_name() != measured) return;
  auto [h, args] = t.spine();
  if (h.kind() != Term::Kind::Cons) return;
  const ConstructorSig* c = sys.constructor(h.name());
  if (!c || (int)args.size() != c->simple.arity()) return;
  if (c->simple.codomain().sort_name() != measured) return;
  auto doms = c->simple.args();
  for (int k = 0; k < c->cls.q; ++k) {
    int orig = c->cls.perm[k];
    acc_rec(args[orig], doms[orig], c->measured[k], sys, out);
  }
}

}  // namespace

std::vector<AccTriple> accessible_triples(const Term& l, const Type& ty,
                                          const RewriteSystem& sys) {
  std::vector<AccTriple> out;
  acc_rec(l, ty, ty.is_sort() ? ty.sort_name() : "", sys, out);
  return out;
}

namespace {

// Descent targets of a constructor at an entry of measured sort C: the
// accessible arguments sharing the head variable of sigma = s^m(h), with
// depth increment m. Nullopt when sigma is constant (leaf of size m).
struct Descent {
  long m = 0;
  std::vector<int> shared;  // permuted accessible indices
};

std::optional<Descent> descent_of(const ConstructorSig& c) {
  if (!c.sigma || c.sigma->is_inf()) return std::nullopt;  // leaf, size 0
  Descent d;
  d.m = (long)c.sigma->iters();
  const SizeVar* h = c.sigma->var_head();
  if (!h) return std::nullopt;  // constant-headed sigma is rejected upstream
  for (int k = 0; k < c.cls.q; ++k)
    if (c.alpha[k].var_head() && *c.alpha[k].var_head() == *h) d.shared.push_back(k);
  if (d.shared.empty()) return d;  // leaf of constant size m
  return d;
}

void sub_rec(const Term& t, const Type& ty, const std::string& measured, long depth,
             const RewriteSystem& sys, SubResult& out) {
  if (t.kind() == Term::Kind::Var) {
    out.entries.push_back({t, ty, measured, depth, 0});
    out.rd = std::max(out.rd, depth);
    auto it = out.rd_x.find(t.name());
    if (it == out.rd_x.end() || it->second < depth) out.rd_x[t.name()] = depth;
    auto ve = out.var_entry.find(t.name());
    if (ve == out.var_entry.end()) {
      out.var_entry[t.name()] = out.entries.back();
    } else if (!(ve->second.ty == ty) || ve->second.measured != measured) {
      out.simple = false;
      out.why_not_simple = "variable " + t.name() + " is measured inconsistently";
    }
    return;
  }
  auto [h, args] = t.spine();
  if (h.kind() == Term::Kind::Cons && ty.is_sort() && ty.sort_name() == measured) {
    const ConstructorSig* c = sys.constructor(h.name());
    if (c && (int)args.size() == c->simple.arity() &&
        c->simple.codomain().sort_name() == measured) {
      auto d = descent_of(*c);
      if (!d) {  // size-0 leaf
        out.entries.push_back({t, ty, measured, depth, 0});
        out.rd = std::max(out.rd, depth);
        return;
      }
      if (d->shared.empty()) {  // constant-size leaf
        out.entries.push_back({t, ty, measured, depth, d->m});
        out.rd = std::max(out.rd, depth + d->m);
        return;
      }
      auto doms = c->simple.args();
      for (int k : d->shared) {
        int orig = c->cls.perm[k];
        sub_rec(args[orig], doms[orig], c->measured[k], depth + d->m, sys, out);
      }
      return;
    }
  }
  out.entries.push_back({t, ty, measured, depth, 0});
  out.rd = std::max(out.rd, depth);
  out.simple = false;
  out.why_not_simple = "subterm " + t.str() + " is neither a variable nor a "
                       "constructor application of constant size";
}

}  // namespace

SubResult recursive_subterms(const Term& t, const std::string& sortB,
                             const RewriteSystem& sys) {
  SubResult out;
  sub_rec(t, Type::sort(sortB), sortB, 0, sys, out);
  return out;
}

bool is_simple(const Term& t, const std::string& sortB, const RewriteSystem& sys) {
  return recursive_subterms(t, sortB, sys).simple;
}

long rd(const Term& t, const std::string& sortB, const RewriteSystem& sys) {
  return recursive_subterms(t, sortB, sys).rd;
}

long rd_x(const Term& t, const std::string& sortB, const std::string& x,
          const RewriteSystem& sys) {
  auto s = recursive_subterms(t, sortB, sys);
  auto it = s.rd_x.find(x);
  return it == s.rd_x.end() ? 0 : it->second;
}

long constructor_size(const RewriteSystem& sys, const ConstructorSig& sig,
                      const std::function<long(int)>& arg_size) {
  (void)sys;
  auto d = descent_of(sig);
  if (!d) return 0;
  if (d->shared.empty()) return d->m;
  long best = 0;
  for (int k : d->shared)
    best = std::max(best, arg_size(sig.cls.perm[k]));
  return best + d->m;
}

namespace {

std::optional<long> concrete_size_rec(const RewriteSystem& sys, const Term& t,
                                      std::string* err) {
  auto [h, args] = t.spine();
  if (h.kind() != Term::Kind::Cons) {
    if (err) *err = "not a constructor term: " + t.str();
    return std::nullopt;
  }
  const ConstructorSig* c = sys.constructor(h.name());
  if (!c || (int)args.size() != c->simple.arity()) {
    if (err) *err = "constructor " + h.name() + " is not fully applied";
    return std::nullopt;
  }
  auto doms = c->simple.args();
  auto d = descent_of(*c);
  if (!d) return 0;
  if (d->shared.empty()) return d->m;
  long best = 0;
  for (int k : d->shared) {
    int orig = c->cls.perm[k];
    if (!doms[orig].is_sort()) {
      if (err) *err = "higher-order argument of " + h.name();
      return std::nullopt;
    }
    auto s = concrete_size_rec(sys, args[orig], err);
    if (!s) return std::nullopt;
    best = std::max(best, *s);
  }
  return best + d->m;
}

bool constructors_only(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Cons:
      return true;
    case Term::Kind::App:
      return constructors_only(t.fn()) && constructors_only(t.arg());
    default:
      return false;
  }
}

}  // namespace

std::optional<long> concrete_size(const RewriteSystem& sys, const Term& t,
                                  std::string* err) {
  if (!constructors_only(t)) {
    if (err) *err = "term is not ground or contains non-constructor symbols";
    return std::nullopt;
  }
  return concrete_size_rec(sys, t, err);
}

namespace {

struct UnionFind {
  std::map<std::string, std::string> parent;
  std::string find(const std::string& k) {
    auto it = parent.find(k);
    if (it == parent.end() || it->second == k) {
      parent[k] = k;
      return k;
    }
    return parent[k] = find(it->second);
  }
  void unite(const std::string& a, const std::string& b) { parent[find(a)] = find(b); }
};

}  // namespace

std::optional<RuleContext> build_rule_context(
    const Rule& r, const RewriteSystem& sys, FreshSizes& fresh, CtxFailure* failure,
    std::string* err, const std::vector<std::pair<std::string, std::string>>& extra_unions) {
  auto fail = [&](CtxFailure f, const std::string& m) -> std::optional<RuleContext> {
    if (failure) *failure = f;
    if (err) *err = m;
    return std::nullopt;
  };
  const FunctionSig* fsig = sys.function(r.head);
  if (!fsig) return fail(CtxFailure::Shape, "no function signature for " + r.head);
  int q = fsig->q;
  if ((int)r.args.size() < q)
    return fail(CtxFailure::Shape, "left-hand side applies " + r.head +
                                       " to fewer than its " + std::to_string(q) +
                                       " termination arguments");
  std::string perr;
  auto penv = infer_pattern_env(r, sys, &perr);
  if (!penv) return fail(CtxFailure::Shape, perr);

  RuleContext ctx;
  auto fargs = fsig->simple.args();
  for (int j = 0; j < q; ++j) {
    ArgContext ac;
    ac.sub = recursive_subterms(r.args[j], fargs[j].sort_name(), sys);
    if (!ac.sub.simple)
      return fail(CtxFailure::NotSimple,
                  "termination argument " + std::to_string(j + 1) + " (" +
                      r.args[j].str() + ") is not a simple term of sort " +
                      fargs[j].sort_name() + ": " + ac.sub.why_not_simple);
    ac.n = 0;
    if (!ac.sub.rd_x.empty()) {
      ac.n = std::numeric_limits<long>::max();
      for (const auto& [_, d] : ac.sub.rd_x) ac.n = std::min(ac.n, d);
    }
    ctx.args.push_back(std::move(ac));
  }

  // one size-variable class per argument, merged through shared variables
  UnionFind uf;
  for (int j = 0; j < q; ++j) {
    std::string slot = "@arg" + std::to_string(j);
    for (const auto& [x, _] : ctx.args[j].sub.rd_x) uf.unite("v:" + x, slot);
  }
  for (const auto& [a, b] : extra_unions) uf.unite("v:" + a, "v:" + b);

  // class representative: the least term variable, else a fresh name
  std::map<std::string, SizeVar> rep;
  auto class_var = [&](const std::string& key) -> SizeVar {
    std::string root = uf.find(key);
    auto it = rep.find(root);
    if (it != rep.end()) return it->second;
    std::optional<std::string> least;
    for (auto& [k, _] : uf.parent)
      if (k.rfind("v:", 0) == 0 && uf.find(k) == root) {
        std::string name = k.substr(2);
        if (!least || name < *least) least = name;
      }
    SizeVar v = least ? SizeVar{*least} : fresh.fresh_var();
    rep[root] = v;
    return v;
  };

  for (int j = 0; j < q; ++j) {
    ctx.args[j].gamma = ctx.args[j].sub.rd_x.empty()
                            ? class_var("@arg" + std::to_string(j) + ":ground")
                            : class_var("@arg" + std::to_string(j));
    ctx.phi.set(fsig->alpha[j], SizeExpr::var(ctx.args[j].gamma, (unsigned)ctx.args[j].n));
  }

  // typing environment for the right-hand side
  for (const auto& x : free_vars(r.rhs)) {
    VarInfo info;
    bool found = false;
    for (int j = 0; j < q && !found; ++j) {
      auto it = ctx.args[j].sub.var_entry.find(x);
      if (it != ctx.args[j].sub.var_entry.end()) {
        info.k_x = j;
        info.B_x = it->second.measured;
        info.alpha_x = class_var("v:" + x);
        info.type = annotate(it->second.ty, info.B_x, SizeExpr::var(info.alpha_x));
        found = true;
      }
    }
    if (!found) {
      // whole non-termination argument: keep the declared plain type
      for (int k = q; k < (int)r.args.size() && !found; ++k) {
        if (r.args[k].kind() == Term::Kind::Var && r.args[k].name() == x) {
          info.k_x = k;
          info.B_x = "";
          info.alpha_x = fresh.fresh_var();
          info.type = AnnType::plain(fargs[k]);
          found = true;
        }
      }
    }
    if (!found) {
      // strict accessibility path in some argument
      for (int k = 0; k < (int)r.args.size() && !found; ++k) {
        for (const auto& triple : accessible_triples(r.args[k], fargs[k], sys)) {
          if (triple.t.kind() == Term::Kind::Var && triple.t.name() == x) {
            info.k_x = k;
            bool track = !triple.measured.empty() &&
                         only_positive(triple.ty, triple.measured);
            info.B_x = track ? triple.measured : "";
            info.alpha_x = SizeVar{x};
            info.type = track ? annotate(triple.ty, triple.measured,
                                         SizeExpr::var(info.alpha_x))
                              : AnnType::plain(triple.ty);
            found = true;
            break;
          }
        }
      }
    }
    if (!found)
      return fail(CtxFailure::NotAccessible,
                  "variable " + x + " is not accessible in any left-hand side argument");
    ctx.vars[x] = info;
    ctx.gamma_env[x] = info.type;
  }

  // consistency: one variable cannot be measured at two different sorts
  for (int j = 0; j < q; ++j)
    for (const auto& [x, e] : ctx.args[j].sub.var_entry) {
      auto it = ctx.vars.find(x);
      if (it != ctx.vars.end() && !it->second.B_x.empty() &&
          it->second.B_x != e.measured)
        return fail(CtxFailure::IncompatibleSharing,
                    "variable " + x + " is measured at both " + it->second.B_x +
                        " and " + e.measured);
    }
  return ctx;
}

MinimalityResult check_minimality(const RuleContext& ctx) {
  MinimalityResult res;
  auto fail = [&](const std::string& c, const std::string& d) {
    res.ok = false;
    res.failed = c;
    res.detail = "minimality " + c + ": " + d;
    return res;
  };
  int q = (int)ctx.args.size();
  for (int j = 0; j < q; ++j) {
    const ArgContext& a = ctx.args[j];
    if (!a.sub.simple) return fail("(a)", a.sub.why_not_simple);
    // (b) phi(alpha_j) = s^{n_j} gamma_j holds by construction of phi
    long inf_range = a.sub.rd_x.empty() ? a.sub.rd : std::numeric_limits<long>::max();
    for (const auto& [_, d] : a.sub.rd_x) inf_range = std::min(inf_range, d);
    if (a.n > inf_range)
      return fail("(c)", "n_" + std::to_string(j + 1) + " = " + std::to_string(a.n) +
                             " exceeds the least recursion depth");
    for (int k = j + 1; k < q; ++k) {
      const ArgContext& b = ctx.args[k];
      if (!(a.gamma == b.gamma)) continue;
      if (a.n != b.n || a.sub.rd != b.sub.rd || a.sub.rd_x != b.sub.rd_x)
        return fail("(d)", "arguments " + std::to_string(j + 1) + " and " +
                               std::to_string(k + 1) +
                               " share a size variable but have different "
                               "depths or recursive-variable sets");
    }
  }
  for (const auto& [x, info] : ctx.vars) {
    for (int j = 0; j < q; ++j) {
      if (!(ctx.args[j].gamma == info.alpha_x)) continue;
      if (!ctx.args[j].sub.rd_x.count(x))
        return fail("(e)", "size variable of " + x + " bounds argument " +
                               std::to_string(j + 1) + " but " + x +
                               " does not occur in its decomposition");
    }
  }
  return res;
}

namespace {

// Variables used together as size-sharing siblings under a constructor in
// the right-hand side; unifying their classes is the typing-driven retry.
void sibling_hints(const Term& t, const RewriteSystem& sys,
                   std::vector<std::pair<std::string, std::string>>& out) {
  switch (t.kind()) {
    case Term::Kind::Abs:
      sibling_hints(t.body(), sys, out);
      return;
    case Term::Kind::App:
      break;
    default:
      return;
  }
  auto [h, args] = t.spine();
  for (const auto& a : args) sibling_hints(a, sys, out);
  if (h.kind() != Term::Kind::Cons) return;
  const ConstructorSig* c = sys.constructor(h.name());
  if (!c || (int)args.size() != c->simple.arity()) return;
  if (!c->sigma || !c->sigma->var_head()) return;
  std::vector<std::string> heads;
  for (int k = 0; k < c->cls.q; ++k) {
    if (!c->alpha[k].var_head() || !(*c->alpha[k].var_head() == *c->sigma->var_head()))
      continue;
    auto [ah, aas] = args[c->cls.perm[k]].spine();
    if (ah.kind() == Term::Kind::Var && aas.empty()) heads.push_back(ah.name());
  }
  for (size_t i = 1; i < heads.size(); ++i) out.push_back({heads[0], heads[i]});
}

AnnType rule_target(const Rule& r, const FunctionSig& fsig, const SizeSubst& phi) {
  auto args = fsig.simple.args();
  std::vector<AnnType> rest;
  for (int i = (int)r.args.size(); i < (int)args.size(); ++i)
    rest.push_back(AnnType::plain(args[i]));
  SizeExpr sigma = fsig.sigma ? apply(*fsig.sigma, phi) : SizeExpr::inf();
  return AnnType::arrows(rest, AnnType::sort(fsig.simple.codomain().sort_name(), sigma));
}

bool verify_accessibility(const Rule& r, const RewriteSystem& sys,
                          const RuleContext& ctx, std::string* why) {
  const FunctionSig* fsig = sys.function(r.head);
  auto fargs = fsig->simple.args();
  for (const auto& [x, info] : ctx.vars) {
    if (info.k_x >= fsig->q && r.args[info.k_x].kind() == Term::Kind::Var)
      continue;  // clause 1: x = l_k and the declared type is kept
    bool ok = false;
    for (const auto& tr : accessible_triples(r.args[info.k_x], fargs[info.k_x], sys)) {
      if (tr.t.kind() == Term::Kind::Var && tr.t.name() == x &&
          (info.B_x.empty() || tr.measured == info.B_x)) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      if (why) *why = "no accessibility path for " + x;
      return false;
    }
  }
  return true;
}

}  // namespace

RuleVerdict check_rule(const Rule& r, const RewriteSystem& sys, const Precedence& prec,
                       const CheckOptions& opts) {
  (void)opts;
  RuleVerdict v;
  v.rule = r.name;
  const FunctionSig* fsig = sys.function(r.head);
  if (!fsig) {
    v.diagnostics.push_back("rule " + r.name + ": head is not a declared function");
    return v;
  }
  {
    auto sig_diags = validate_function_signature(*fsig);
    v.monotony = sig_diags.empty();
    for (const auto& d : sig_diags) v.diagnostics.push_back(d);
  }

  FreshSizes fresh;
  CtxFailure failure = CtxFailure::None;
  std::string err;
  auto ctx = build_rule_context(r, sys, fresh, &failure, &err);
  if (!ctx) {
    v.diagnostics.push_back("rule " + r.name + ": " + err);
    v.accessibility = failure != CtxFailure::NotAccessible && failure != CtxFailure::Shape;
    v.minimality = false;
    v.srd = false;
    return v;
  }
  std::string acc_why;
  v.accessibility = verify_accessibility(r, sys, *ctx, &acc_why);
  if (!v.accessibility) v.diagnostics.push_back("rule " + r.name + ": " + acc_why);

  MinimalityResult min = check_minimality(*ctx);
  v.minimality = min.ok;
  if (!min.ok) v.diagnostics.push_back("rule " + r.name + ": " + min.detail);

  AnnType target = rule_target(r, *fsig, ctx->phi);
  CheckResult chk =
      check(sys, prec, r.head, ctx->gamma_env, ctx->phi, r.rhs, target, fresh);
  if (!chk.ok) {
    // typing-driven retry: share sizes across arguments when the right-hand
    // side uses variables of distinct arguments as constructor siblings
    std::vector<std::pair<std::string, std::string>> hints;
    sibling_hints(r.rhs, sys, hints);
    std::vector<std::pair<std::string, std::string>> useful;
    for (const auto& [a, b] : hints)
      if (ctx->vars.count(a) && ctx->vars.count(b) &&
          !(ctx->vars[a].alpha_x == ctx->vars[b].alpha_x))
        useful.push_back({a, b});
    if (!useful.empty()) {
      auto ctx2 = build_rule_context(r, sys, fresh, &failure, &err, useful);
      if (ctx2) {
        MinimalityResult min2 = check_minimality(*ctx2);
        AnnType target2 = rule_target(r, *fsig, ctx2->phi);
        CheckResult chk2 =
            check(sys, prec, r.head, ctx2->gamma_env, ctx2->phi, r.rhs, target2, fresh);
        if (chk2.ok && min2.ok) {
          ctx = ctx2;
          min = min2;
          chk = chk2;
          v.minimality = true;
        } else if (chk2.ok && !min2.ok) {
          v.diagnostics.push_back("rule " + r.name +
                                  ": unifying argument sizes types the right-hand "
                                  "side but " + min2.detail);
          v.minimality = false;
          min = min2;
          chk = chk2;
        }
      }
    }
  }
  v.srd = chk.ok;
  if (!chk.ok && chk.failed_step != 0)
    v.diagnostics.push_back("rule " + r.name + ": subject reduction/decreasingness: " +
                            chk.reason);
  v.sites = chk.sites;
  v.bound = chk.bound;
  return v;
}

const char* verdict_name(SystemReport::Verdict v) {
  switch (v) {
    case SystemReport::Verdict::Yes: return "YES";
    case SystemReport::Verdict::Maybe: return "MAYBE";
    case SystemReport::Verdict::Invalid: return "INVALID-INPUT";
  }
  return "?";
}

SystemReport check_system(const RewriteSystem& sys, const CheckOptions& opts) {
  SystemReport rep;
  auto diags = validate_declarations(sys);
  bool invalid = false;
  for (const auto& d : diags) {
    rep.system_diagnostics.push_back(d);
    if (d.rfind("warning:", 0) != 0) invalid = true;
  }
  std::vector<std::string> perrors;
  Precedence prec = infer_precedence(sys, perrors);
  for (const auto& e : perrors) {
    rep.system_diagnostics.push_back(e);
    invalid = true;
  }
  if (invalid) {
    rep.verdict = SystemReport::Verdict::Invalid;
    return rep;
  }
  for (const auto& r : sys.rules) rep.rules.push_back(check_rule(r, sys, prec, opts));

  if (opts.lex_search) {
    // search one argument order per equivalence class that makes every
    // call site of the class decrease
    std::map<int, std::vector<std::string>> classes;
    for (const auto& [f, c] : prec.cls) classes[c].push_back(f);
    for (const auto& [c, fs] : classes) {
      int q = sys.function(fs.front())->q;
      bool same_q = true;
      for (const auto& f : fs) same_q = same_q && sys.function(f)->q == q;
      if (!same_q || q < 2 || q > 6) continue;
      bool any_fail = false;
      for (size_t i = 0; i < rep.rules.size(); ++i)
        if (prec.cls.at(sys.rules[i].head) == c && !rep.rules[i].srd &&
            !rep.rules[i].sites.empty())
          any_fail = true;
      if (!any_fail) continue;
      std::vector<int> perm(q);
      std::iota(perm.begin(), perm.end(), 0);
      std::vector<int> found;
      do {
        bool all = true;
        for (size_t i = 0; i < rep.rules.size() && all; ++i) {
          if (prec.cls.at(sys.rules[i].head) != c) continue;
          for (const auto& s : rep.rules[i].sites)
            if (!call_compare(s.sizes, rep.rules[i].bound, perm)) {
              all = false;
              break;
            }
        }
        if (all) {
          found = perm;
          break;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      if (!found.empty()) {
        std::string ps;
        for (int i : found) ps += (ps.empty() ? "" : " ") + std::to_string(i + 1);
        for (size_t i = 0; i < rep.rules.size(); ++i) {
          if (prec.cls.at(sys.rules[i].head) != c) continue;
          if (!rep.rules[i].srd && !rep.rules[i].sites.empty()) {
            rep.rules[i].srd = true;
            rep.rules[i].diagnostics.push_back(
                "rule " + rep.rules[i].rule +
                ": decreases under the argument order " + ps);
          }
        }
      }
    }
  }

  bool all = true;
  for (const auto& rv : rep.rules) all = all && rv.pass();
  rep.verdict = all ? SystemReport::Verdict::Yes : SystemReport::Verdict::Maybe;
  return rep;
}

}  // namespace hrs
