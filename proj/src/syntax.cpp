#include "hrs/syntax.hpp"

#include <cassert>
#include <sstream>

namespace hrs {

struct Type::Node {
  bool sort;
  std::string name;
  Type dom, cod;
};

Type Type::sort(std::string name) {
  return Type(std::make_shared<const Node>(Node{true, std::move(name), {}, {}}));
}

Type Type::arrow(Type dom, Type cod) {
  assert(dom.ok() && cod.ok());
  return Type(std::make_shared<const Node>(
      Node{false, {}, std::move(dom), std::move(cod)}));
}

Type Type::arrows(const std::vector<Type>& doms, Type cod) {
  Type t = std::move(cod);
  for (auto it = doms.rbegin(); it != doms.rend(); ++it) t = arrow(*it, t);
  return t;
}

bool Type::is_sort() const { return node_->sort; }
const std::string& Type::sort_name() const { return node_->name; }
const Type& Type::dom() const { return node_->dom; }
const Type& Type::cod() const { return node_->cod; }

int Type::arity() const {
  int n = 0;
  const Type* t = this;
  while (!t->is_sort()) {
    ++n;
    t = &t->cod();
  }
  return n;
}

std::vector<Type> Type::args() const {
  std::vector<Type> out;
  const Type* t = this;
  while (!t->is_sort()) {
    out.push_back(t->dom());
    t = &t->cod();
  }
  return out;
}

Type Type::codomain() const {
  const Type* t = this;
  while (!t->is_sort()) t = &t->cod();
  return *t;
}

Type Type::codomain_after(int n) const {
  const Type* t = this;
  for (int i = 0; i < n; ++i) {
    assert(!t->is_sort());
    t = &t->cod();
  }
  return *t;
}

std::string Type::str() const {
  if (is_sort()) return sort_name();
  std::string d = dom().str();
  if (!dom().is_sort()) d = "(" + d + ")";
  return d + " -> " + cod().str();
}

bool operator==(const Type& a, const Type& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.is_sort() != b.is_sort()) return false;
  if (a.is_sort()) return a.sort_name() == b.sort_name();
  return a.dom() == b.dom() && a.cod() == b.cod();
}

std::set<Pos> signed_positions(const Type& t, Sign sign) {
  std::set<Pos> out;
  // Pos^s(B) = {eps | s = +};  Pos^s(U->V) = 1.Pos^{-s}(U) u 2.Pos^s(V)
  struct Walk {
    static void go(const Type& t, Sign want, Sign cur, Pos& p, std::set<Pos>& out) {
      if (t.is_sort()) {
        if (cur == want) out.insert(p);
        return;
      }
      p.push_back(1);
      go(t.dom(), want, flip(cur), p, out);
      p.back() = 2;
      go(t.cod(), want, cur, p, out);
      p.pop_back();
    }
  };
  Pos p;
  Walk::go(t, sign, Sign::Pos, p, out);
  return out;
}

std::set<Pos> positions_of_sort(const Type& t, const std::string& b) {
  std::set<Pos> out;
  struct Walk {
    static void go(const Type& t, const std::string& b, Pos& p, std::set<Pos>& out) {
      if (t.is_sort()) {
        if (t.sort_name() == b) out.insert(p);
        return;
      }
      p.push_back(1);
      go(t.dom(), b, p, out);
      p.back() = 2;
      go(t.cod(), b, p, out);
      p.pop_back();
    }
  };
  Pos p;
  Walk::go(t, b, p, out);
  return out;
}

bool occurs_sort(const Type& t, const std::string& b) {
  if (t.is_sort()) return t.sort_name() == b;
  return occurs_sort(t.dom(), b) || occurs_sort(t.cod(), b);
}

bool only_positive(const Type& t, const std::string& b) {
  auto occ = positions_of_sort(t, b);
  auto pos = signed_positions(t, Sign::Pos);
  for (const auto& p : occ)
    if (!pos.count(p)) return false;
  return true;
}

std::set<std::string> sorts_of(const Type& t) {
  std::set<std::string> out;
  if (t.is_sort()) {
    out.insert(t.sort_name());
    return out;
  }
  auto a = sorts_of(t.dom());
  auto b = sorts_of(t.cod());
  out.insert(a.begin(), a.end());
  out.insert(b.begin(), b.end());
  return out;
}

void SortOrder::add(const std::string& a, const std::string& b) {
  lt_.insert({a, b});
  // keep transitively closed
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::pair<std::string, std::string>> missing;
    for (const auto& [x, y] : lt_)
      for (const auto& [u, v] : lt_)
        if (y == u && !lt_.count({x, v})) missing.push_back({x, v});
    for (auto& m : missing) {
      lt_.insert(m);
      changed = true;
    }
  }
}

bool SortOrder::less(const std::string& a, const std::string& b) const {
  return lt_.count({a, b}) > 0;
}

bool SortOrder::leq(const std::string& a, const std::string& b) const {
  return a == b || less(a, b);
}

std::optional<std::string> SortOrder::find_cycle() const {
  for (const auto& [a, b] : lt_)
    if (a == b) return a;
  return std::nullopt;
}

bool positive_wrt(const Type& t, const std::string& b, const SortOrder& order) {
  for (const auto& s : sorts_of(t))
    if (!order.leq(s, b)) return false;
  return only_positive(t, b);
}

struct Term::Node {
  Kind kind;
  std::string name;  // Var/Cons/Fun, or bound name for Abs
  Type ty;           // Abs annotation
  Term a, b;         // Abs: body in a;  App: fn a, arg b
};

Term Term::var(std::string name) {
  return Term(std::make_shared<const Node>(Node{Kind::Var, std::move(name), {}, {}, {}}));
}
Term Term::cons(std::string name) {
  return Term(std::make_shared<const Node>(Node{Kind::Cons, std::move(name), {}, {}, {}}));
}
Term Term::fun(std::string name) {
  return Term(std::make_shared<const Node>(Node{Kind::Fun, std::move(name), {}, {}, {}}));
}
Term Term::abs(std::string bound, Type ty, Term body) {
  return Term(std::make_shared<const Node>(
      Node{Kind::Abs, std::move(bound), std::move(ty), std::move(body), {}}));
}
Term Term::app(Term f, Term a) {
  return Term(std::make_shared<const Node>(
      Node{Kind::App, {}, {}, std::move(f), std::move(a)}));
}
Term Term::app(Term head, const std::vector<Term>& args) {
  Term t = std::move(head);
  for (const auto& a : args) t = app(t, a);
  return t;
}

Term::Kind Term::kind() const { return node_->kind; }
const std::string& Term::name() const { return node_->name; }
const std::string& Term::bound() const { return node_->name; }
const Type& Term::bound_type() const { return node_->ty; }
const Term& Term::body() const { return node_->a; }
const Term& Term::fn() const { return node_->a; }
const Term& Term::arg() const { return node_->b; }

bool Term::is_symbol() const {
  return kind() == Kind::Var || kind() == Kind::Cons || kind() == Kind::Fun;
}

std::pair<Term, std::vector<Term>> Term::spine() const {
  std::vector<Term> args;
  Term h = *this;
  while (h.kind() == Kind::App) {
    args.push_back(h.arg());
    h = h.fn();
  }
  std::reverse(args.begin(), args.end());
  return {h, args};
}

std::string Term::str() const {
  switch (kind()) {
    case Kind::Var:
    case Kind::Cons:
    case Kind::Fun:
      return name();
    case Kind::Abs:
      return "\\" + bound() + ":" + bound_type().str() + ". " + body().str();
    case Kind::App: {
      std::string f = fn().str();
      if (fn().kind() == Kind::Abs) f = "(" + f + ")";
      std::string a = arg().str();
      if (arg().kind() == Kind::App || arg().kind() == Kind::Abs) a = "(" + a + ")";
      return f + " " + a;
    }
  }
  return {};
}

namespace {

void alpha_key_rec(const Term& t, std::vector<std::string>& bound, std::string& out) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      for (int i = (int)bound.size() - 1; i >= 0; --i) {
        if (bound[i] == t.name()) {
          out += "#" + std::to_string(bound.size() - 1 - i);
          return;
        }
      }
      out += "v:" + t.name();
      return;
    }
    case Term::Kind::Cons:
      out += "c:" + t.name();
      return;
    case Term::Kind::Fun:
      out += "f:" + t.name();
      return;
    case Term::Kind::Abs:
      out += "(\\" + t.bound_type().str() + ".";
      bound.push_back(t.bound());
      alpha_key_rec(t.body(), bound, out);
      bound.pop_back();
      out += ")";
      return;
    case Term::Kind::App:
      out += "(";
      alpha_key_rec(t.fn(), bound, out);
      out += " ";
      alpha_key_rec(t.arg(), bound, out);
      out += ")";
      return;
  }
}

}  // namespace

std::string Term::alpha_key() const {
  std::string out;
  std::vector<std::string> bound;
  alpha_key_rec(*this, bound, out);
  return out;
}

bool alpha_equal(const Term& a, const Term& b) {
  return a.alpha_key() == b.alpha_key();
}

namespace {

void free_vars_rec(const Term& t, std::set<std::string>& bound,
                   std::set<std::string>& out) {
  switch (t.kind()) {
    case Term::Kind::Var:
      if (!bound.count(t.name())) out.insert(t.name());
      return;
    case Term::Kind::Cons:
    case Term::Kind::Fun:
      return;
    case Term::Kind::Abs: {
      bool added = bound.insert(t.bound()).second;
      free_vars_rec(t.body(), bound, out);
      if (added) bound.erase(t.bound());
      return;
    }
    case Term::Kind::App:
      free_vars_rec(t.fn(), bound, out);
      free_vars_rec(t.arg(), bound, out);
      return;
  }
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  std::string n = base;
  while (avoid.count(n)) n += "'";
  return n;
}

}  // namespace

std::set<std::string> free_vars(const Term& t) {
  std::set<std::string> bound, out;
  free_vars_rec(t, bound, out);
  return out;
}

Term substitute(const Term& t, const TermSubst& subst) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      auto it = subst.find(t.name());
      return it == subst.end() ? t : it->second;
    }
    case Term::Kind::Cons:
    case Term::Kind::Fun:
      return t;
    case Term::Kind::App:
      return Term::app(substitute(t.fn(), subst), substitute(t.arg(), subst));
    case Term::Kind::Abs: {
      TermSubst inner = subst;
      inner.erase(t.bound());
      // rename the bound variable if it captures a free variable of the range
      std::set<std::string> range_fv;
      for (const auto& fv : free_vars(t.body())) {
        auto it = inner.find(fv);
        if (it != inner.end()) {
          auto vs = free_vars(it->second);
          range_fv.insert(vs.begin(), vs.end());
        } else {
          range_fv.insert(fv);
        }
      }
      std::string x = t.bound();
      Term body = t.body();
      if (range_fv.count(x)) {
        std::set<std::string> avoid = range_fv;
        auto bfv = free_vars(body);
        avoid.insert(bfv.begin(), bfv.end());
        x = fresh_name(x, avoid);
        TermSubst rename{{t.bound(), Term::var(x)}};
        body = substitute(body, rename);
      }
      return Term::abs(x, t.bound_type(), substitute(body, inner));
    }
  }
  return t;
}

const Type* SymbolTable::lookup(const std::string& name) const {
  if (auto it = cons.find(name); it != cons.end()) return &it->second;
  if (auto it = funs.find(name); it != funs.end()) return &it->second;
  return nullptr;
}

std::optional<Type> type_check(const SymbolTable& sigs, const TypeEnv& env,
                               const Term& t, std::string* err) {
  auto fail = [&](const std::string& m) -> std::optional<Type> {
    if (err) *err = m;
    return std::nullopt;
  };
  switch (t.kind()) {
    case Term::Kind::Var: {
      auto it = env.find(t.name());
      if (it == env.end()) return fail("unbound variable " + t.name());
      return it->second;
    }
    case Term::Kind::Cons:
    case Term::Kind::Fun: {
      const Type* ty = sigs.lookup(t.name());
      if (!ty) return fail("undeclared symbol " + t.name());
      return *ty;
    }
    case Term::Kind::Abs: {
      TypeEnv inner = env;
      inner[t.bound()] = t.bound_type();
      auto body = type_check(sigs, inner, t.body(), err);
      if (!body) return std::nullopt;
      return Type::arrow(t.bound_type(), *body);
    }
    case Term::Kind::App: {
      auto f = type_check(sigs, env, t.fn(), err);
      if (!f) return std::nullopt;
      if (f->is_sort())
        return fail("cannot apply term of sort " + f->sort_name());
      auto a = type_check(sigs, env, t.arg(), err);
      if (!a) return std::nullopt;
      if (!(f->dom() == *a))
        return fail("domain mismatch: expected " + f->dom().str() + ", got " +
                    a->str() + " in " + t.str());
      return f->cod();
    }
  }
  return fail("malformed term");
}

}  // namespace hrs
