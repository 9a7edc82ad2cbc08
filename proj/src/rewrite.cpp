#include "hrs/rewrite.hpp"

#include <deque>
#include <functional>
#include <map>

namespace hrs {

namespace {

bool match_rec(const Term& pattern, const Term& t, TermSubst& out) {
  switch (pattern.kind()) {
    case Term::Kind::Var: {
      auto it = out.find(pattern.name());
      if (it != out.end()) return alpha_equal(it->second, t);
      out[pattern.name()] = t;
      return true;
    }
    case Term::Kind::Cons:
    case Term::Kind::Fun:
      return pattern.kind() == t.kind() && pattern.name() == t.name();
    case Term::Kind::App:
      return t.kind() == Term::Kind::App && match_rec(pattern.fn(), t.fn(), out) &&
             match_rec(pattern.arg(), t.arg(), out);
    case Term::Kind::Abs:
      return false;  // not a pattern shape
  }
  return false;
}

}  // namespace

std::optional<TermSubst> match(const Term& pattern, const Term& t) {
  TermSubst out;
  if (!match_rec(pattern, t, out)) return std::nullopt;
  return out;
}

namespace {

void step_at(const RewriteSystem& sys, const Term& t, std::vector<int>& pos,
             std::vector<std::pair<Redex, Term>>& out,
             const std::function<Term(const Term&)>& rebuild) {
  // beta redex here?
  if (t.kind() == Term::Kind::App && t.fn().kind() == Term::Kind::Abs) {
    const Term& lam = t.fn();
    TermSubst s{{lam.bound(), t.arg()}};
    Term reduct = substitute(lam.body(), s);
    out.push_back({{pos, "beta", s}, rebuild(reduct)});
  }
  // rule redex here?
  auto [h, args] = t.spine();
  if (h.kind() == Term::Kind::Fun) {
    for (const auto& r : sys.rules) {
      if (r.head != h.name() || r.args.size() != args.size()) continue;
      TermSubst s;
      bool ok = true;
      for (size_t i = 0; i < args.size() && ok; ++i)
        ok = match_rec(r.args[i], args[i], s);
      if (ok) out.push_back({{pos, r.name, s}, rebuild(substitute(r.rhs, s))});
    }
  }
  // descend
  switch (t.kind()) {
    case Term::Kind::App: {
      pos.push_back(0);
      step_at(sys, t.fn(), pos, out,
              [&](const Term& u) { return rebuild(Term::app(u, t.arg())); });
      pos.back() = 1;
      step_at(sys, t.arg(), pos, out,
              [&](const Term& u) { return rebuild(Term::app(t.fn(), u)); });
      pos.pop_back();
      return;
    }
    case Term::Kind::Abs: {
      pos.push_back(2);
      step_at(sys, t.body(), pos, out, [&](const Term& u) {
        return rebuild(Term::abs(t.bound(), t.bound_type(), u));
      });
      pos.pop_back();
      return;
    }
    default:
      return;
  }
}

}  // namespace

std::vector<std::pair<Redex, Term>> step(const RewriteSystem& sys, const Term& t) {
  std::vector<std::pair<Redex, Term>> out;
  std::vector<int> pos;
  step_at(sys, t, pos, out, [](const Term& u) { return u; });
  return out;
}

namespace {

std::optional<Term> step_once_innermost(const RewriteSystem& sys, const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var:
    case Term::Kind::Cons:
    case Term::Kind::Fun:
      return std::nullopt;
    case Term::Kind::Abs: {
      if (auto b = step_once_innermost(sys, t.body()))
        return Term::abs(t.bound(), t.bound_type(), *b);
      return std::nullopt;
    }
    case Term::Kind::App: {
      if (auto f = step_once_innermost(sys, t.fn()))
        return Term::app(*f, t.arg());
      if (auto a = step_once_innermost(sys, t.arg()))
        return Term::app(t.fn(), *a);
      if (t.fn().kind() == Term::Kind::Abs) {
        TermSubst s{{t.fn().bound(), t.arg()}};
        return substitute(t.fn().body(), s);
      }
      auto [h, args] = t.spine();
      if (h.kind() == Term::Kind::Fun) {
        for (const auto& r : sys.rules) {
          if (r.head != h.name() || r.args.size() != args.size()) continue;
          TermSubst s;
          bool ok = true;
          for (size_t i = 0; i < args.size() && ok; ++i)
            ok = match_rec(r.args[i], args[i], s);
          if (ok) return substitute(r.rhs, s);
        }
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<Term> step_innermost(const RewriteSystem& sys, const Term& t) {
  return step_once_innermost(sys, t);
}

std::optional<Term> normalize(const RewriteSystem& sys, const Term& t, long fuel,
                              long* used) {
  Term cur = t;
  long n = 0;
  while (true) {
    auto next = step_once_innermost(sys, cur);
    if (!next) {
      if (used) *used = n;
      return cur;
    }
    if (++n > fuel) return std::nullopt;
    cur = *next;
  }
}

std::optional<std::vector<Term>> loop_search(const RewriteSystem& sys, const Term& t,
                                             int depth, size_t frontier_cap) {
  struct Entry {
    Term term;
    int parent;
  };
  std::vector<Entry> entries{{t, -1}};
  std::map<std::string, int> seen{{t.alpha_key(), 0}};
  std::deque<std::pair<int, int>> frontier{{0, 0}};  // entry index, depth
  auto path_of = [&](int from, const Term& closing) {
    std::vector<Term> path;
    for (int i = from; i >= 0; i = entries[i].parent) path.push_back(entries[i].term);
    std::reverse(path.begin(), path.end());
    path.push_back(closing);
    return path;
  };
  while (!frontier.empty()) {
    auto [idx, d] = frontier.front();
    frontier.pop_front();
    if (d >= depth) continue;
    for (const auto& [rdx, reduct] : step(sys, entries[idx].term)) {
      std::string key = reduct.alpha_key();
      auto it = seen.find(key);
      if (it != seen.end()) {
        // does the revisited term lie on the current path?
        for (int i = idx; i >= 0; i = entries[i].parent)
          if (entries[i].term.alpha_key() == key) return path_of(idx, reduct);
        continue;
      }
      if (entries.size() >= frontier_cap) return std::nullopt;
      seen[key] = (int)entries.size();
      entries.push_back({reduct, idx});
      frontier.push_back({(int)entries.size() - 1, d + 1});
    }
  }
  return std::nullopt;
}

}  // namespace hrs
