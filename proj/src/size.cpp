#include "hrs/size.hpp"

#include <sstream>

namespace hrs {

std::string SizeExpr::str() const {
  if (inf_) return "inf";
  std::string h = var_head() ? var_head()->name : "#" + const_head()->name;
  std::string out;
  for (unsigned i = 0; i < iters_; ++i) out += "s ";
  return out + h;
}

std::set<SizeVar> size_vars(const SizeExpr& e) {
  std::set<SizeVar> out;
  if (const SizeVar* v = e.var_head()) out.insert(*v);
  return out;
}

std::optional<unsigned> leq(const SizeExpr& a, const SizeExpr& b) {
  if (a.is_inf() || b.is_inf()) return std::nullopt;
  if (a.head() != b.head()) return std::nullopt;
  if (b.iters() < a.iters()) return std::nullopt;
  return b.iters() - a.iters();
}

bool leq_strict(const SizeExpr& a, const SizeExpr& b) {
  auto k = leq(a, b);
  return k && *k > 0;
}

bool leq_inf(const SizeExpr& a, const SizeExpr& b) {
  if (b.is_inf()) return true;
  return leq(a, b).has_value();
}

std::set<SizeVar> SizeSubst::domain() const {
  std::set<SizeVar> out;
  for (const auto& [v, _] : map_) out.insert(v);
  return out;
}

std::string SizeSubst::str() const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [v, e] : map_) {
    if (!first) os << ", ";
    first = false;
    os << v.name << " := " << e.str();
  }
  os << "}";
  return os.str();
}

SizeExpr apply(const SizeExpr& a, const SizeSubst& phi) {
  if (a.is_inf()) return a;
  if (const SizeVar* v = a.var_head()) {
    SizeExpr e = phi.get(*v);
    if (e.is_inf()) return SizeExpr::inf();
    return SizeExpr::succ(e, a.iters());
  }
  return a;
}

SizeSubst compose(const SizeSubst& a, const SizeSubst& b) {
  SizeSubst out;
  for (const auto& [v, e] : a.entries()) out.set(v, apply(e, b));
  for (const auto& [v, e] : b.entries())
    if (!a.find(v)) out.set(v, e);
  return out;
}

SuccHeadDecomp decompose(const SizeSubst& phi) {
  SuccHeadDecomp d;
  for (const auto& [v, e] : phi.entries()) {
    if (e.is_inf()) {
      d.succ[v] = 0;
      d.head[v] = SizeExpr::inf();
    } else {
      d.succ[v] = e.iters();
      d.head[v] = e.var_head() ? SizeExpr::var(*e.var_head())
                               : SizeExpr::constant(*e.const_head());
    }
  }
  return d;
}

std::optional<SizeSubst> more_general(const SizeSubst& phi, const SizeSubst& psi,
                                      const std::set<SizeVar>& over) {
  // Build rho head-wise: for each x, (x phi) rho <=inf (x psi) pins the image
  // of phi's head variable.
  SizeSubst rho;
  for (const auto& x : over) {
    SizeExpr a = phi.get(x);
    SizeExpr b = psi.get(x);
    if (b.is_inf()) continue;  // a rho <=inf inf holds for any rho
    if (a.is_inf()) return std::nullopt;  // inf <= finite never holds
    if (const SizeConst* c = a.const_head()) {
      if (!(b.const_head() && *b.const_head() == *c && a.iters() <= b.iters()))
        return std::nullopt;
      continue;
    }
    const SizeVar& h = *a.var_head();
    if (a.iters() > b.iters()) return std::nullopt;
    SizeExpr want = b.var_head() ? SizeExpr::var(*b.var_head())
                                 : SizeExpr::constant(*b.const_head());
    if (const SizeExpr* prev = rho.find(h)) {
      if (!(*prev == want)) return std::nullopt;
    } else {
      rho.set(h, want);
    }
  }
  // verify pointwise (the construction guarantees it; keep the check cheap
  // and explicit since callers rely on it)
  for (const auto& x : over)
    if (!leq_inf(apply(phi.get(x), rho), psi.get(x))) return std::nullopt;
  return rho;
}

std::optional<SizeSubst> more_general(const SizeSubst& phi, const SizeSubst& psi) {
  std::set<SizeVar> over = phi.domain();
  auto d = psi.domain();
  over.insert(d.begin(), d.end());
  return more_general(phi, psi, over);
}

std::string NExpr::str() const {
  if (!var) return std::to_string(offset);
  std::string v = "x_" + var->name;
  if (offset == 0) return v;
  return v + "+" + std::to_string(offset);
}

BExpr BExpr::of(const SizeExpr& e) {
  if (e.is_inf()) return BExpr::inf();
  if (const SizeVar* v = e.var_head()) return BExpr::var(*v, e.iters());
  return BExpr::constant(*e.const_head(), NExpr::lit((long)e.iters()));
}

BExpr BExpr::succ(unsigned n) const {
  BExpr b = *this;
  switch (tag_) {
    case Tag::Inf:
      return b;
    case Tag::Var:
      b.k_ += n;
      return b;
    case Tag::Const:
      b.e_.offset += (long)n;
      return b;
  }
  return b;
}

std::string BExpr::str() const {
  switch (tag_) {
    case Tag::Inf:
      return "inf";
    case Tag::Var: {
      std::string out;
      for (unsigned i = 0; i < k_; ++i) out += "s ";
      return out + v_.name;
    }
    case Tag::Const:
      return "s^(" + e_.str() + ") #" + c_.name;
  }
  return {};
}

std::string NormB::str() const {
  if (inf) return "inf";
  std::string out;
  for (unsigned i = 0; i < k; ++i) out += "s ";
  for (const auto& v : iter_vars) out += "s^x_" + v.name + " ";
  if (std::holds_alternative<SizeVar>(*head))
    out += std::get<SizeVar>(*head).name;
  else
    out += "#" + std::get<SizeConst>(*head).name;
  return out;
}

NormB normalize_b(const RawB& raw) {
  NormB n;
  switch (raw.k) {
    case RawB::K::Inf:
      n.inf = true;
      return n;
    case RawB::K::Var:
      n.head = SizeHead(raw.v);
      return n;
    case RawB::K::Const:
      n.head = SizeHead(raw.c);
      return n;
    case RawB::K::Succ: {
      n = normalize_b(*raw.sub);
      if (!n.inf) ++n.k;
      return n;
    }
    case RawB::K::Iter: {
      n = normalize_b(*raw.sub);
      if (n.inf) return n;
      // s^{x+k} a = s^k (s^x a); s^0 a = a
      n.k += (unsigned)raw.exp.offset;
      if (raw.exp.var) n.iter_vars.push_back(*raw.exp.var);
      return n;
    }
  }
  return n;
}

std::optional<BExpr> to_admissible(const NormB& n) {
  if (n.inf) return BExpr::inf();
  if (std::holds_alternative<SizeVar>(*n.head)) {
    if (!n.iter_vars.empty()) return std::nullopt;  // two variables
    return BExpr::var(std::get<SizeVar>(*n.head), n.k);
  }
  if (n.iter_vars.size() > 1) return std::nullopt;
  NExpr e = n.iter_vars.empty() ? NExpr::lit((long)n.k)
                                : NExpr::of(n.iter_vars[0], (long)n.k);
  return BExpr::constant(std::get<SizeConst>(*n.head), e);
}

}  // namespace hrs
