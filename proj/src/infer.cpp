#include "hrs/infer.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace hrs {

namespace {

AnnType declared_type_of(const RewriteSystem& sys, const AnnEnv& env, const Term& h,
                         std::string* err) {
  switch (h.kind()) {
    case Term::Kind::Var: {
      auto it = env.find(h.name());
      if (it == env.end()) {
        *err = "unbound variable " + h.name();
        return {};
      }
      return it->second;
    }
    case Term::Kind::Cons: {
      const ConstructorSig* c = sys.constructor(h.name());
      if (!c) {
        *err = "undeclared constructor " + h.name();
        return {};
      }
      return c->annotated();
    }
    case Term::Kind::Fun: {
      const FunctionSig* f = sys.function(h.name());
      if (!f) {
        *err = "undeclared function " + h.name();
        return {};
      }
      return f->annotated();
    }
    default:
      *err = "head of an application must be a symbol";
      return {};
  }
}

}  // namespace

InferOutcome infer(const RewriteSystem& sys, const Precedence& prec,
                   const std::string& f, const AnnEnv& env, const Term& t,
                   FreshSizes& fresh) {
  InferOutcome out;
  if (t.kind() == Term::Kind::Abs) {
    AnnEnv inner = env;
    inner[t.bound()] = AnnType::plain(t.bound_type());
    auto body = infer(sys, prec, f, inner, t.body(), fresh);
    if (!body.ok()) return body;
    auto d = std::make_shared<Derivation>();
    d->k = Derivation::K::Lam;
    d->term = t;
    d->bound = t.bound();
    d->bound_ty = t.bound_type();
    d->kids = {body.deriv};
    d->result = AnnType::arrow(AnnType::plain(t.bound_type()), *body.type);
    out.type = d->result;
    out.deriv = d;
    return out;
  }

  auto [h, args] = t.spine();
  if (h.kind() == Term::Kind::Abs) {
    out.error = "beta-redex " + t.str() + "; right-hand sides must be beta-normal";
    return out;
  }
  AnnType declared = declared_type_of(sys, env, h, &out.error);
  if (!declared.ok()) return out;

  if (h.kind() == Term::Kind::Fun) {
    if (prec.equiv(h.name(), f)) {
      int q = sys.function(h.name())->q;
      if ((int)args.size() < q) {
        out.error = h.name() + " is equivalent to " + f + " but is applied to " +
                    std::to_string(args.size()) + " arguments; at least " +
                    std::to_string(q) + " are required";
        return out;
      }
    } else if (!prec.less(h.name(), f)) {
      out.error = "symbol " + h.name() + " is not below " + f + " in the precedence";
      return out;
    }
  }
  if (declared.arity() < (int)args.size()) {
    out.error = h.str() + " applied to too many arguments";
    return out;
  }

  auto d = std::make_shared<Derivation>();
  d->k = Derivation::K::App;
  d->term = t;
  d->head = h.is_symbol() ? h.name() : "";
  d->head_kind = h.kind();
  d->declared = declared;

  std::vector<std::pair<AnnType, AnnType>> constraints;
  auto doms = declared.args();
  for (size_t i = 0; i < args.size(); ++i) {
    auto ai = infer(sys, prec, f, env, args[i], fresh);
    if (!ai.ok()) return ai;
    // rename the inferred type apart from the declared type and the siblings
    SizeSubst rho;
    for (const auto& v : ann_vars(*ai.type)) rho.set(v, SizeExpr::var(fresh.fresh_var()));
    d->rho.push_back(rho);
    d->kids.push_back(ai.deriv);
    constraints.push_back({apply(*ai.type, rho), doms[i]});
  }
  SizeProblem p = reduce_subtyping(constraints);
  if (p.bottom) {
    out.error = "argument types do not match " + h.str() + " : " + declared.str() +
                " in " + t.str();
    return out;
  }
  MgsResult m = mgs(p);
  if (!m.sat()) {
    out.error = "unsatisfiable size constraints " + p.str() + " in " + t.str();
    return out;
  }
  d->eta = *m.subst;
  d->result = apply(declared.codomain_after((int)args.size()), d->eta);
  out.type = d->result;
  out.deriv = d;
  return out;
}

namespace {

void collect_rec(const RewriteSystem& sys, const Precedence& prec, const std::string& f,
                 const Derivation& d, const SizeSubst& sigma,
                 std::vector<CallSite>& out) {
  if (d.k == Derivation::K::Lam) {
    collect_rec(sys, prec, f, *d.kids[0], sigma, out);
    return;
  }
  if (d.head_kind == Term::Kind::Fun && prec.equiv(d.head, f)) {
    const FunctionSig* sig = sys.function(d.head);
    CallSite site;
    site.head = d.head;
    site.at = d.term.str();
    SizeSubst eff = compose(d.eta, sigma);
    for (int i = 0; i < sig->q; ++i)
      site.sizes.push_back(apply(SizeExpr::var(sig->alpha[i]), eff));
    out.push_back(std::move(site));
  }
  for (size_t i = 0; i < d.kids.size(); ++i) {
    SizeSubst child = compose(d.rho[i], compose(d.eta, sigma));
    collect_rec(sys, prec, f, *d.kids[i], child, out);
  }
}

}  // namespace

std::vector<CallSite> collect_call_sites(const RewriteSystem& sys,
                                         const Precedence& prec, const std::string& f,
                                         const Derivation& d, const SizeSubst& chi) {
  std::vector<CallSite> out;
  collect_rec(sys, prec, f, d, chi, out);
  return out;
}

bool call_compare(const std::vector<SizeExpr>& a, const std::vector<SizeExpr>& b,
                  const std::vector<int>& perm) {
  // lexicographic: a strict decrease at some position, weak (top-extended)
  // comparisons before it
  for (int idx : perm) {
    if (idx >= (int)a.size() || idx >= (int)b.size()) break;
    if (leq_strict(a[idx], b[idx])) return true;
    if (!leq_inf(a[idx], b[idx])) return false;
    // equal-or-weak: move to the next position; a strict witness is still
    // required, so weak-only prefixes alone never succeed
  }
  return false;
}

bool call_compare(const std::vector<SizeExpr>& a, const std::vector<SizeExpr>& b) {
  std::vector<int> perm(std::min(a.size(), b.size()));
  for (size_t i = 0; i < perm.size(); ++i) perm[i] = (int)i;
  return call_compare(a, b, perm);
}

namespace {

SizeExpr unfreeze_expr(const SizeExpr& e, const std::map<SizeConst, SizeVar>& inv) {
  if (const SizeConst* c = e.const_head()) {
    auto it = inv.find(*c);
    if (it != inv.end()) return SizeExpr::var(it->second, e.iters());
  }
  return e;
}

AnnType unfreeze_type(const AnnType& t, const std::map<SizeConst, SizeVar>& inv) {
  if (t.is_sort()) {
    if (!t.ann()) return t;
    return AnnType::sort(t.sort_name(), unfreeze_expr(*t.ann(), inv));
  }
  return AnnType::arrow(unfreeze_type(t.dom(), inv), unfreeze_type(t.cod(), inv));
}

}  // namespace

CheckResult check(const RewriteSystem& sys, const Precedence& prec,
                  const std::string& f, const AnnEnv& env, const SizeSubst& phi,
                  const Term& t, const AnnType& target, FreshSizes& fresh,
                  const std::vector<int>* lex_perm) {
  CheckResult res;
  const FunctionSig* fsig = sys.function(f);
  assert(fsig);

  // step 1: freeze the size variables of env, target and phi
  std::set<SizeVar> vars;
  for (const auto& [_, ty] : env) {
    auto v = ann_vars(ty);
    vars.insert(v.begin(), v.end());
  }
  {
    auto v = ann_vars(target);
    vars.insert(v.begin(), v.end());
    for (const auto& [_, e] : phi.entries()) {
      auto w = size_vars(e);
      vars.insert(w.begin(), w.end());
    }
  }
  SizeSubst gamma;
  std::map<SizeConst, SizeVar> inv;
  for (const auto& v : vars) {
    SizeConst c = fresh.fresh_const();
    gamma.set(v, SizeExpr::constant(c));
    inv[c] = v;
  }
  AnnEnv frozen_env;
  for (const auto& [x, ty] : env) frozen_env[x] = apply(ty, gamma);
  AnnType frozen_target = apply(target, gamma);
  SizeSubst frozen_phi;
  for (const auto& [v, e] : phi.entries()) frozen_phi.set(v, apply(e, gamma));

  auto unfreeze = [&](const SizeExpr& e) { return unfreeze_expr(e, inv); };

  InferOutcome inf = infer(sys, prec, f, frozen_env, t, fresh);
  if (!inf.ok()) {
    res.failed_step = 1;
    res.reason = inf.error;
    return res;
  }
  res.inferred = unfreeze_type(*inf.type, inv);

  // step 2: fit the inferred type against the target
  SizeProblem p = reduce_subtyping({{*inf.type, frozen_target}});
  MgsResult chi = mgs(p);
  if (!chi.sat()) {
    res.failed_step = 2;
    res.reason = "inferred type " + res.inferred->str() + " does not fit " +
                 target.str() +
                 (p.bottom ? "" : " (unsatisfiable constraints " + p.str() + ")");
    return res;
  }

  // step 3: decreasingness at every equivalent-symbol call site
  auto sites = collect_call_sites(sys, prec, f, *inf.deriv, *chi.subst);
  for (auto& s : sites)
    for (auto& e : s.sizes) e = unfreeze(e);
  res.sites = sites;
  for (const auto& a : fsig->alpha)
    res.bound.push_back(unfreeze(apply(SizeExpr::var(a), frozen_phi)));

  std::vector<int> perm;
  if (lex_perm) {
    perm = *lex_perm;
  } else {
    perm.resize(fsig->q);
    for (int i = 0; i < fsig->q; ++i) perm[i] = i;
  }
  for (const auto& s : sites) {
    if (!call_compare(s.sizes, res.bound, perm)) {
      res.failed_step = 3;
      std::ostringstream os;
      os << "call " << s.at << " with sizes (";
      for (size_t i = 0; i < s.sizes.size(); ++i)
        os << (i ? ", " : "") << s.sizes[i].str();
      os << ") does not decrease against (";
      for (size_t i = 0; i < res.bound.size(); ++i)
        os << (i ? ", " : "") << res.bound[i].str();
      os << ")";
      res.reason = os.str();
      return res;
    }
  }
  res.ok = true;
  return res;
}

namespace {

bool replay_rec(const RewriteSystem& sys, const Derivation& d, std::string* why) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if (d.k == Derivation::K::Lam) {
    if (!replay_rec(sys, *d.kids[0], why)) return false;
    AnnType expect =
        AnnType::arrow(AnnType::plain(d.bound_ty), d.kids[0]->result);
    if (!(d.result == expect)) return fail("lam node result mismatch at " + d.term.str());
    return true;
  }
  auto [h, args] = d.term.spine();
  if (d.kids.size() != args.size()) return fail("arity mismatch at " + d.term.str());
  std::vector<std::pair<AnnType, AnnType>> constraints;
  auto doms = d.declared.args();
  if ((int)args.size() > d.declared.arity())
    return fail("declared type too short at " + d.term.str());
  std::set<SizeVar> seen = ann_vars(d.declared);
  for (size_t i = 0; i < d.kids.size(); ++i) {
    if (!replay_rec(sys, *d.kids[i], why)) return false;
    AnnType renamed = apply(d.kids[i]->result, d.rho[i]);
    // renamings keep argument variables apart from the declared type and
    // from the other arguments
    for (const auto& v : ann_vars(renamed))
      if (!seen.insert(v).second)
        return fail("renaming does not set variables apart at " + d.term.str());
    constraints.push_back({renamed, doms[i]});
  }
  SizeProblem p = reduce_subtyping(constraints);
  if (p.bottom) return fail("argument shapes do not match at " + d.term.str());
  // eta solves the node's problem...
  for (const auto& [a, b] : p.cs)
    if (!leq_inf(apply(a, d.eta), apply(b, d.eta)))
      return fail("eta is not a solution at " + d.term.str());
  // ...and reproduces the recorded conclusion
  AnnType expect = apply(d.declared.codomain_after((int)args.size()), d.eta);
  if (!(d.result == expect)) return fail("app node result mismatch at " + d.term.str());
  return true;
}

}  // namespace

bool replay(const RewriteSystem& sys, const Derivation& d, std::string* why) {
  return replay_rec(sys, d, why);
}

}  // namespace hrs
