#include "hrs/annot.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace hrs {

struct AnnType::Node {
  bool sort;
  std::string name;
  std::optional<SizeExpr> ann;
  AnnType dom, cod;
};

AnnType AnnType::sort(std::string name, std::optional<SizeExpr> ann) {
  if (ann && ann->is_inf()) ann.reset();  // B_inf = B
  return AnnType(std::make_shared<const Node>(
      Node{true, std::move(name), std::move(ann), {}, {}}));
}

AnnType AnnType::arrow(AnnType dom, AnnType cod) {
  assert(dom.ok() && cod.ok());
  return AnnType(std::make_shared<const Node>(
      Node{false, {}, {}, std::move(dom), std::move(cod)}));
}

AnnType AnnType::arrows(const std::vector<AnnType>& doms, AnnType cod) {
  AnnType t = std::move(cod);
  for (auto it = doms.rbegin(); it != doms.rend(); ++it) t = arrow(*it, t);
  return t;
}

AnnType AnnType::plain(const Type& t) {
  if (t.is_sort()) return AnnType::sort(t.sort_name());
  return AnnType::arrow(plain(t.dom()), plain(t.cod()));
}

bool AnnType::is_sort() const { return node_->sort; }
const std::string& AnnType::sort_name() const { return node_->name; }
const std::optional<SizeExpr>& AnnType::ann() const { return node_->ann; }
SizeExpr AnnType::ann_or_inf() const {
  return node_->ann ? *node_->ann : SizeExpr::inf();
}
const AnnType& AnnType::dom() const { return node_->dom; }
const AnnType& AnnType::cod() const { return node_->cod; }

int AnnType::arity() const {
  int n = 0;
  const AnnType* t = this;
  while (!t->is_sort()) {
    ++n;
    t = &t->cod();
  }
  return n;
}

std::vector<AnnType> AnnType::args() const {
  std::vector<AnnType> out;
  const AnnType* t = this;
  while (!t->is_sort()) {
    out.push_back(t->dom());
    t = &t->cod();
  }
  return out;
}

AnnType AnnType::codomain() const {
  const AnnType* t = this;
  while (!t->is_sort()) t = &t->cod();
  return *t;
}

AnnType AnnType::codomain_after(int n) const {
  const AnnType* t = this;
  for (int i = 0; i < n; ++i) {
    assert(!t->is_sort());
    t = &t->cod();
  }
  return *t;
}

std::string AnnType::str() const {
  if (is_sort()) {
    if (!ann()) return sort_name();
    return sort_name() + "(" + ann()->str() + ")";
  }
  std::string d = dom().str();
  if (!dom().is_sort()) d = "(" + d + ")";
  return d + " -> " + cod().str();
}

bool operator==(const AnnType& a, const AnnType& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.is_sort() != b.is_sort()) return false;
  if (a.is_sort())
    return a.sort_name() == b.sort_name() && a.ann() == b.ann();
  return a.dom() == b.dom() && a.cod() == b.cod();
}

Type strip(const AnnType& t) {
  if (t.is_sort()) return Type::sort(t.sort_name());
  return Type::arrow(strip(t.dom()), strip(t.cod()));
}

AnnType annotate(const Type& t, const std::string& b, const SizeExpr& a) {
  if (t.is_sort()) {
    if (t.sort_name() == b) return AnnType::sort(b, a);
    return AnnType::sort(t.sort_name());
  }
  return AnnType::arrow(annotate(t.dom(), b, a), annotate(t.cod(), b, a));
}

AnnType apply(const AnnType& t, const SizeSubst& phi) {
  if (t.is_sort()) {
    if (!t.ann()) return t;
    return AnnType::sort(t.sort_name(), apply(*t.ann(), phi));
  }
  return AnnType::arrow(apply(t.dom(), phi), apply(t.cod(), phi));
}

std::set<SizeVar> ann_vars(const AnnType& t) {
  std::set<SizeVar> out;
  if (t.is_sort()) {
    if (t.ann()) return size_vars(*t.ann());
    return out;
  }
  auto a = ann_vars(t.dom());
  auto b = ann_vars(t.cod());
  out.insert(a.begin(), a.end());
  out.insert(b.begin(), b.end());
  return out;
}

namespace {

// Annotation is child 1 of its sort occurrence; inside a size expression the
// successor chain steps are child 1 each (s is monotone in its argument).
void var_positions_rec(const AnnType& t, const SizeVar& v, Sign cur, Pos& p,
                       std::set<Pos>& all, std::set<Pos>& positive) {
  if (t.is_sort()) {
    if (t.ann() && t.ann()->var_head() && *t.ann()->var_head() == v) {
      Pos q = p;
      q.push_back(1);
      for (unsigned i = 0; i < t.ann()->iters(); ++i) q.push_back(1);
      all.insert(q);
      if (cur == Sign::Pos) positive.insert(q);
    }
    return;
  }
  p.push_back(1);
  var_positions_rec(t.dom(), v, flip(cur), p, all, positive);
  p.back() = 2;
  var_positions_rec(t.cod(), v, cur, p, all, positive);
  p.pop_back();
}

}  // namespace

std::set<Pos> ann_signed_positions(const AnnType& t, Sign sign) {
  std::set<Pos> sorts_out;
  Pos p;
  // sort occurrences of the requested sign plus annotation-variable
  // occurrences of the same sign
  struct W {
    static void go(const AnnType& t, Sign want, Sign cur, Pos& p, std::set<Pos>& out) {
      if (t.is_sort()) {
        if (cur == want) {
          out.insert(p);
          if (t.ann() && t.ann()->var_head()) {
            Pos q = p;
            q.push_back(1);
            for (unsigned i = 0; i < t.ann()->iters(); ++i) q.push_back(1);
            out.insert(q);
          }
        }
        return;
      }
      p.push_back(1);
      go(t.dom(), want, flip(cur), p, out);
      p.back() = 2;
      go(t.cod(), want, cur, p, out);
      p.pop_back();
    }
  };
  W::go(t, sign, Sign::Pos, p, sorts_out);
  return sorts_out;
}

std::set<Pos> positions_of_size_var(const AnnType& t, const SizeVar& v) {
  std::set<Pos> all, positive;
  Pos p;
  var_positions_rec(t, v, Sign::Pos, p, all, positive);
  return all;
}

bool size_var_only_positive(const AnnType& t, const SizeVar& v) {
  std::set<Pos> all, positive;
  Pos p;
  var_positions_rec(t, v, Sign::Pos, p, all, positive);
  return all == positive;
}

std::optional<std::string> default_measured_sort(const Type& arg,
                                                 const std::string& codomain,
                                                 const SortOrder& order) {
  // codomain-most admissible sort first
  Type cod = arg.codomain();
  auto admissible = [&](const std::string& c) {
    return order.less(c, codomain) && only_positive(arg, c);
  };
  if (admissible(cod.sort_name())) return cod.sort_name();
  for (const auto& c : sorts_of(arg))
    if (admissible(c)) return c;
  return std::nullopt;
}

ClassifiedArgs classify_args(const Type& cons_type, const SortOrder& order) {
  ClassifiedArgs out;
  const std::string b = cons_type.codomain().sort_name();
  auto args = cons_type.args();
  std::vector<int> rec, acc, rest;
  for (int i = 0; i < (int)args.size(); ++i) {
    bool recursive = occurs_sort(args[i], b);
    bool accessible = positive_wrt(args[i], b, order);
    if (accessible && recursive) {
      rec.push_back(i);
    } else if (accessible && default_measured_sort(args[i], b, order)) {
      acc.push_back(i);
    } else {
      rest.push_back(i);
    }
  }
  out.p = (int)rec.size();
  out.q = out.p + (int)acc.size();
  out.perm = rec;
  out.perm.insert(out.perm.end(), acc.begin(), acc.end());
  out.perm.insert(out.perm.end(), rest.begin(), rest.end());
  return out;
}

AnnType ConstructorSig::annotated() const {
  auto args = simple.args();
  const std::string b = simple.codomain().sort_name();
  std::vector<AnnType> out;
  for (int orig = 0; orig < (int)args.size(); ++orig) {
    int k = permuted_index(orig);
    if (k >= 0 && k < cls.q && !alpha[k].is_inf())
      out.push_back(annotate(args[orig], measured[k], alpha[k]));
    else
      out.push_back(AnnType::plain(args[orig]));
  }
  return AnnType::arrows(out, AnnType::sort(b, sigma));
}

int ConstructorSig::permuted_index(int orig) const {
  for (int k = 0; k < (int)cls.perm.size(); ++k)
    if (cls.perm[k] == orig) return k;
  return -1;
}

std::optional<std::string> ConstructorSig::measured_of_original(int orig) const {
  int k = permuted_index(orig);
  if (k < 0 || k >= cls.q) return std::nullopt;
  return measured[k];
}

std::optional<SizeExpr> ConstructorSig::alpha_of_original(int orig) const {
  int k = permuted_index(orig);
  if (k < 0 || k >= cls.q) return std::nullopt;
  return alpha[k];
}

ConstructorSig canonical_constructor_signature(const std::string& name,
                                               const Type& ty,
                                               const SortOrder& order,
                                               FreshSizes& fresh) {
  ConstructorSig sig;
  sig.name = name;
  sig.simple = ty;
  sig.cls = classify_args(ty, order);
  const std::string b = ty.codomain().sort_name();
  auto args = ty.args();
  SizeVar a = fresh.fresh_var();
  for (int k = 0; k < sig.cls.q; ++k) {
    int orig = sig.cls.perm[k];
    if (k < sig.cls.p) {
      sig.alpha.push_back(SizeExpr::var(a));
      sig.measured.push_back(b);
    } else {
      sig.alpha.push_back(SizeExpr::inf());
      sig.measured.push_back(*default_measured_sort(args[orig], b, order));
    }
  }
  sig.sigma = sig.cls.p == 0 ? SizeExpr::var(a) : SizeExpr::var(a, 1);
  return sig;
}

std::optional<ConstructorSig> constructor_sig_from_annotated(
    const std::string& name, const AnnType& ann, const SortOrder& order,
    std::vector<std::string>& diags) {
  ConstructorSig sig;
  sig.name = name;
  sig.simple = strip(ann);
  sig.cls = classify_args(sig.simple, order);
  const std::string b = sig.simple.codomain().sort_name();
  auto aargs = ann.args();
  auto sargs = sig.simple.args();
  bool bad = false;

  // collect per-argument annotation shape: expect An(T, C, a) for one sort C
  struct Shape {
    bool any = false, uniform = true;
    std::string sort;
    SizeExpr expr;
  };
  auto shape_of = [&](const AnnType& t) {
    Shape s;
    struct W {
      static void go(const AnnType& t, Shape& s) {
        if (t.is_sort()) {
          if (t.ann()) {
            if (!s.any) {
              s.any = true;
              s.sort = t.sort_name();
              s.expr = *t.ann();
            } else if (s.sort != t.sort_name() || !(s.expr == *t.ann())) {
              s.uniform = false;
            }
          }
          return;
        }
        go(t.dom(), s);
        go(t.cod(), s);
      }
    };
    W::go(t, s);
    return s;
  };

  for (int k = 0; k < (int)sig.cls.perm.size(); ++k) {
    int orig = sig.cls.perm[k];
    Shape s = shape_of(aargs[orig]);
    if (k >= sig.cls.q) {
      if (s.any) {
        diags.push_back("constructor " + name + ": argument " +
                        std::to_string(orig + 1) +
                        " is not accessible and must be unannotated");
        bad = true;
      }
      continue;
    }
    if (!s.any) {
      sig.alpha.push_back(SizeExpr::inf());
      if (k < sig.cls.p)
        sig.measured.push_back(b);
      else
        sig.measured.push_back(*default_measured_sort(sargs[orig], b, order));
      continue;
    }
    if (!s.uniform) {
      diags.push_back("constructor " + name + ": argument " +
                      std::to_string(orig + 1) +
                      " must annotate a single sort with a single expression");
      bad = true;
      sig.alpha.push_back(SizeExpr::inf());
      sig.measured.push_back(k < sig.cls.p ? b : s.sort);
      continue;
    }
    // every occurrence of the annotated sort must carry the annotation
    if (!(aargs[orig] == annotate(sargs[orig], s.sort, s.expr))) {
      diags.push_back("constructor " + name + ": argument " +
                      std::to_string(orig + 1) + " must annotate every occurrence of " +
                      s.sort);
      bad = true;
    }
    if (!(s.expr.var_head() && s.expr.iters() == 0)) {
      diags.push_back("constructor " + name + ": argument " +
                      std::to_string(orig + 1) +
                      " annotation must be a plain size variable");
      bad = true;
      sig.alpha.push_back(SizeExpr::inf());
    } else {
      sig.alpha.push_back(s.expr);
    }
    sig.measured.push_back(s.sort);
  }
  sig.sigma = ann.codomain().ann();
  if (bad) {
    // still return the best-effort signature; callers report diags
  }
  return sig;
}

std::vector<std::string> validate_constructor_signature(const ConstructorSig& sig,
                                                        const SortOrder& order) {
  std::vector<std::string> out;
  const std::string b = sig.simple.codomain().sort_name();
  auto args = sig.simple.args();
  auto say = [&](const std::string& m) { out.push_back("constructor " + sig.name + ": " + m); };
  if ((int)sig.alpha.size() != sig.cls.q || (int)sig.measured.size() != sig.cls.q) {
    say("malformed signature (annotation count mismatch)");
    return out;
  }
  // recursive arguments must carry variable annotations
  for (int i = 0; i < sig.cls.p; ++i) {
    if (!sig.alpha[i].var_head() || sig.alpha[i].iters() != 0)
      say("recursive argument " + std::to_string(sig.cls.perm[i] + 1) +
          " must be annotated with a size variable");
    if (sig.measured[i] != b)
      say("recursive argument " + std::to_string(sig.cls.perm[i] + 1) +
          " must be measured at sort " + b);
  }
  // variables pairwise equal or pairwise distinct
  std::vector<SizeVar> vars;
  for (int i = 0; i < sig.cls.q; ++i)
    if (const SizeVar* v = sig.alpha[i].var_head()) vars.push_back(*v);
  if (vars.size() >= 2) {
    bool all_eq = true, all_distinct = true;
    for (size_t i = 0; i < vars.size(); ++i)
      for (size_t j = i + 1; j < vars.size(); ++j) {
        if (vars[i] == vars[j]) all_distinct = false;
        else all_eq = false;
      }
    if (!all_eq && !all_distinct)
      say("annotation variables must be pairwise equal or pairwise distinct");
  }
  // non-recursive annotated arguments: measured sort occurs, only positively,
  // strictly below the codomain sort
  for (int i = sig.cls.p; i < sig.cls.q; ++i) {
    if (!sig.alpha[i].var_head()) continue;
    const Type& t = args[sig.cls.perm[i]];
    if (!occurs_sort(t, sig.measured[i]))
      say("measured sort " + sig.measured[i] + " does not occur in argument " +
          std::to_string(sig.cls.perm[i] + 1));
    else if (!only_positive(t, sig.measured[i]))
      say("measured sort " + sig.measured[i] + " occurs negatively in argument " +
          std::to_string(sig.cls.perm[i] + 1));
    if (!order.less(sig.measured[i], b))
      say("measured sort " + sig.measured[i] + " is not below " + b +
          " in the sort order");
  }
  // sigma: inf, or a successor tower over a variable
  if (sig.sigma && !sig.sigma->is_inf()) {
    if (!sig.sigma->var_head())
      say("output annotation must be built from a size variable");
    // monotony of sigma in each alpha_i holds by construction in the
    // successor algebra (the only symbol is monotone)
    for (int i = 0; i < sig.cls.p; ++i) {
      if (sig.alpha[i].var_head() &&
          !leq_strict(sig.alpha[i], *sig.sigma))
        say("output annotation " + sig.sigma->str() +
            " is not strictly above recursive annotation " + sig.alpha[i].str());
    }
  } else {
    if (sig.cls.p > 0) {
      say("output annotation inf is not strictly above recursive annotations");
    } else {
      bool annotated_arg = false;
      for (const auto& a : sig.alpha) annotated_arg = annotated_arg || a.var_head();
      if (annotated_arg)
        out.push_back("warning: constructor " + sig.name +
                      ": output annotation inf collapses its size to 0; the "
                      "argument annotations carry no information");
    }
  }
  return out;
}

AnnType FunctionSig::annotated() const {
  auto args = simple.args();
  std::vector<AnnType> out;
  for (int i = 0; i < (int)args.size(); ++i) {
    if (i < q)
      out.push_back(AnnType::sort(args[i].sort_name(), SizeExpr::var(alpha[i])));
    else
      out.push_back(AnnType::plain(args[i]));
  }
  return AnnType::arrows(out, AnnType::sort(simple.codomain().sort_name(), sigma));
}

std::optional<FunctionSig> function_sig_from_annotated(
    const std::string& name, const AnnType& ann, int q,
    std::vector<std::string>& diags) {
  FunctionSig sig;
  sig.name = name;
  sig.simple = strip(ann);
  sig.q = q;
  auto aargs = ann.args();
  if (q > (int)aargs.size()) {
    diags.push_back("function " + name + ": args = " + std::to_string(q) +
                    " exceeds the arity " + std::to_string(aargs.size()));
    return std::nullopt;
  }
  for (int i = 0; i < (int)aargs.size(); ++i) {
    if (i < q) {
      if (!aargs[i].is_sort()) {
        diags.push_back("function " + name + ": termination argument " +
                        std::to_string(i + 1) + " must be a sort");
        return std::nullopt;
      }
      SizeExpr a = aargs[i].ann_or_inf();
      if (!(a.var_head() && a.iters() == 0)) {
        diags.push_back("function " + name + ": termination argument " +
                        std::to_string(i + 1) +
                        " must be annotated with a plain size variable");
        return std::nullopt;
      }
      sig.alpha.push_back(*a.var_head());
    } else if (!ann_vars(aargs[i]).empty() || !(aargs[i] == AnnType::plain(strip(aargs[i])))) {
      diags.push_back("function " + name + ": argument " + std::to_string(i + 1) +
                      " beyond args = " + std::to_string(q) + " must be plain");
    }
  }
  sig.sigma = ann.codomain().ann();
  return sig;
}

std::vector<std::string> validate_function_signature(const FunctionSig& sig) {
  std::vector<std::string> out;
  auto say = [&](const std::string& m) { out.push_back("function " + sig.name + ": " + m); };
  auto args = sig.simple.args();
  if (sig.q > (int)args.size()) {
    say("args exceeds arity");
    return out;
  }
  for (int i = 0; i < sig.q; ++i)
    if (!args[i].is_sort())
      say("termination argument " + std::to_string(i + 1) + " must be a sort");
  for (int i = 0; i < sig.q; ++i)
    for (int j = i + 1; j < sig.q; ++j)
      if (sig.alpha[i] == sig.alpha[j])
        say("the variables " + sig.alpha[i].name + " should be distinct");
  if (sig.sigma && !sig.sigma->is_inf()) {
    if (const SizeVar* v = sig.sigma->var_head()) {
      bool found = false;
      for (const auto& a : sig.alpha) found = found || a == *v;
      if (!found)
        say("output annotation variable " + v->name +
            " is not a termination-argument variable");
    } else {
      say("output annotation must be built from a size variable");
    }
  }
  // Monotony Pos(alpha_i, sigma) <= Pos^+(sigma) holds in the successor
  // algebra: the successor symbol is monotone in its only argument.
  return out;
}

}  // namespace hrs
