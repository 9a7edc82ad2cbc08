#include "hrs/solver.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <limits>
#include <sstream>

namespace hrs {

std::set<SizeVar> SizeProblem::vars() const {
  std::set<SizeVar> out;
  for (const auto& [a, b] : cs) {
    auto va = size_vars(a);
    auto vb = size_vars(b);
    out.insert(va.begin(), va.end());
    out.insert(vb.begin(), vb.end());
  }
  return out;
}

std::set<SizeConst> SizeProblem::consts() const {
  std::set<SizeConst> out;
  for (const auto& [a, b] : cs) {
    if (a.const_head()) out.insert(*a.const_head());
    if (b.const_head()) out.insert(*b.const_head());
  }
  return out;
}

std::string SizeProblem::str() const {
  if (bottom) return "bottom";
  std::ostringstream os;
  os << "{";
  for (size_t i = 0; i < cs.size(); ++i) {
    if (i) os << ", ";
    os << cs[i].first.str() << " <= " << cs[i].second.str();
  }
  os << "}";
  return os.str();
}

namespace {

bool reduce_rec(const AnnType& t, const AnnType& u,
                std::vector<std::pair<SizeExpr, SizeExpr>>& out) {
  if (t.is_sort() && u.is_sort()) {
    if (t.sort_name() != u.sort_name()) return false;
    out.push_back({t.ann_or_inf(), u.ann_or_inf()});
    return true;
  }
  if (t.is_sort() || u.is_sort()) return false;
  // contravariant domain, covariant codomain
  return reduce_rec(u.dom(), t.dom(), out) && reduce_rec(t.cod(), u.cod(), out);
}

}  // namespace

SizeProblem reduce_subtyping(const std::vector<std::pair<AnnType, AnnType>>& p) {
  std::vector<std::pair<SizeExpr, SizeExpr>> cs;
  for (const auto& [t, u] : p)
    if (!reduce_rec(t, u, cs)) return SizeProblem::bot();
  return SizeProblem::of(std::move(cs));
}

bool subtype(const AnnType& t, const AnnType& u) {
  SizeProblem p = reduce_subtyping({{t, u}});
  if (p.bottom) return false;
  for (const auto& [a, b] : p.cs)
    if (!leq_inf(a, b)) return false;
  return true;
}

int ConstraintGraph::node_id(const GNode& n) {
  for (int i = 0; i < (int)nodes.size(); ++i)
    if (nodes[i] == n) return i;
  nodes.push_back(n);
  return (int)nodes.size() - 1;
}

int ConstraintGraph::find_node(const GNode& n) const {
  for (int i = 0; i < (int)nodes.size(); ++i)
    if (nodes[i] == n) return i;
  return -1;
}

ConstraintGraph build_graph(const SizeProblem& p) {
  ConstraintGraph g;
  if (p.bottom) return g;
  int inf = g.node_id({GNode::Kind::Inf, ""});
  for (const auto& v : p.vars()) {
    int a = g.node_id({GNode::Kind::AVar, v.name});
    g.edges.push_back({a, inf, Weight::infinite()});
  }
  for (const auto& [a, b] : p.cs) {
    if (b.var_head()) {
      int to = g.node_id({GNode::Kind::AVar, b.var_head()->name});
      if (a.var_head()) {
        int from = g.node_id({GNode::Kind::AVar, a.var_head()->name});
        g.edges.push_back({from, to, Weight::of((long)a.iters() - (long)b.iters())});
      } else if (a.const_head()) {
        int from = g.node_id({GNode::Kind::Const, a.const_head()->name});
        g.edges.push_back({from, to, Weight::of(0)});
      } else {  // inf <= s^l b
        g.edges.push_back({inf, to, Weight::of(0)});
      }
    }
    // constraints with inf or a constant on the right contribute no edges
  }
  return g;
}

namespace {

// Longest-path Bellman-Ford over the finite-weight edges; a relaxation that
// survives |V| rounds witnesses a positive cycle.
std::optional<std::vector<int>> finite_positive_cycle(const ConstraintGraph& g) {
  int n = (int)g.nodes.size();
  if (n == 0) return std::nullopt;
  std::vector<long> dist(n, 0);
  std::vector<int> pred(n, -1);  // edge index that last improved the node
  int last_updated = -1;
  for (int round = 0; round <= n; ++round) {
    last_updated = -1;
    for (int e = 0; e < (int)g.edges.size(); ++e) {
      const auto& ed = g.edges[e];
      if (ed.w.inf) continue;
      if (dist[ed.from] + ed.w.w > dist[ed.to]) {
        dist[ed.to] = dist[ed.from] + ed.w.w;
        pred[ed.to] = e;
        last_updated = ed.to;
      }
    }
    if (last_updated < 0) return std::nullopt;
  }
  // walk predecessors n times to land on the cycle
  int x = last_updated;
  for (int i = 0; i < n; ++i) x = g.edges[pred[x]].from;
  std::vector<int> cycle;
  int cur = x;
  do {
    int e = pred[cur];
    cycle.push_back(e);
    cur = g.edges[e].from;
  } while (cur != x && (int)cycle.size() <= n + 1);
  std::reverse(cycle.begin(), cycle.end());
  return cycle;
}

}  // namespace

std::optional<std::vector<int>> find_positive_cycle(const ConstraintGraph& g) {
  // a cycle through an infinite-weight edge is positive
  int n = (int)g.nodes.size();
  std::vector<std::vector<std::pair<int, int>>> adj(n);  // node -> (succ, edge)
  for (int e = 0; e < (int)g.edges.size(); ++e)
    adj[g.edges[e].from].push_back({g.edges[e].to, e});
  for (int e = 0; e < (int)g.edges.size(); ++e) {
    if (!g.edges[e].w.inf) continue;
    // path from edge target back to edge source?
    int src = g.edges[e].from, dst = g.edges[e].to;
    std::vector<int> how(n, -1);
    std::vector<int> queue{dst};
    std::vector<bool> seen(n, false);
    seen[dst] = true;
    bool found = (dst == src);
    for (size_t qi = 0; qi < queue.size() && !found; ++qi) {
      for (auto [to, ei] : adj[queue[qi]]) {
        if (seen[to]) continue;
        seen[to] = true;
        how[to] = ei;
        if (to == src) {
          found = true;
          break;
        }
        queue.push_back(to);
      }
    }
    if (found) {
      std::vector<int> cycle;
      int cur = src;
      while (cur != dst) {
        cycle.push_back(how[cur]);
        cur = g.edges[how[cur]].from;
      }
      std::reverse(cycle.begin(), cycle.end());
      cycle.push_back(e);  // close with the infinite edge
      return cycle;
    }
  }
  return finite_positive_cycle(g);
}

bool has_positive_cycle(const ConstraintGraph& g) {
  return find_positive_cycle(g).has_value();
}

std::vector<std::tuple<SizeVar, SizeConst, SizeConst>> incompatible_triples(
    const SizeProblem& p) {
  std::vector<std::tuple<SizeVar, SizeConst, SizeConst>> out;
  if (p.bottom) return out;
  // reachability over constraint edges, excluding the inf node
  std::map<std::string, std::set<std::string>> next;  // var -> vars
  std::map<std::string, std::set<std::string>> from_const;
  for (const auto& [a, b] : p.cs) {
    if (!b.var_head()) continue;
    if (a.var_head()) next[a.var_head()->name].insert(b.var_head()->name);
    if (a.const_head()) from_const[a.const_head()->name].insert(b.var_head()->name);
  }
  std::map<std::string, std::set<std::string>> reach;  // var -> consts reaching it
  for (const auto& [c, starts] : from_const) {
    std::vector<std::string> queue(starts.begin(), starts.end());
    std::set<std::string> seen(starts.begin(), starts.end());
    for (size_t i = 0; i < queue.size(); ++i) {
      reach[queue[i]].insert(c);
      for (const auto& nx : next[queue[i]])
        if (seen.insert(nx).second) queue.push_back(nx);
    }
  }
  for (const auto& [v, cs] : reach) {
    for (auto i = cs.begin(); i != cs.end(); ++i)
      for (auto j = std::next(i); j != cs.end(); ++j)
        out.push_back({SizeVar{v}, SizeConst{*i}, SizeConst{*j}});
  }
  return out;
}

Configuration Configuration::of_problem(const SizeProblem& p) {
  Configuration c;
  for (const auto& [a, b] : p.cs)
    c.c4.push_back({BExpr::of(a), BExpr::of(b)});
  return c;
}

std::string Configuration::str() const {
  std::ostringstream os;
  auto set_str = [](const std::set<SizeVar>& s) {
    std::string o = "{";
    bool f = true;
    for (const auto& v : s) {
      if (!f) o += ",";
      f = false;
      o += v.name;
    }
    return o + "}";
  };
  os << "(" << set_str(c0) << ", " << set_str(c1) << ", {";
  bool f = true;
  for (const auto& [v, c] : c2) {
    if (!f) os << ",";
    f = false;
    os << v.name << ":#" << c.name;
  }
  os << "}, {";
  f = true;
  for (const auto& nc : c3) {
    if (!f) os << ", ";
    f = false;
    os << nc.str();
  }
  os << "}, {";
  f = true;
  for (const auto& ac : c4) {
    if (!f) os << ", ";
    f = false;
    os << ac.str();
  }
  os << "})";
  return os.str();
}

const char* norm_rule_name(NormRule r) {
  switch (r) {
    case NormRule::TrivInf: return "(_inf)";
    case NormRule::InfVar1: return "(inf-var-1)";
    case NormRule::InfVar2: return "(inf-var-2)";
    case NormRule::InfConst: return "(inf-const)";
    case NormRule::ConstDistinct: return "(const-distinct)";
    case NormRule::ConstConst: return "(const-const)";
    case NormRule::VarConst: return "(var-const)";
  }
  return "?";
}

namespace {

std::set<SizeVar> c4_vars(const std::vector<AConstraint>& c4) {
  std::set<SizeVar> out;
  for (const auto& c : c4) {
    if (c.lhs.is_var()) out.insert(c.lhs.var_head());
    if (c.rhs.is_var()) out.insert(c.rhs.var_head());
  }
  return out;
}

BExpr subst_var_inf(const BExpr& b, const std::set<SizeVar>& vs) {
  if (b.is_var() && vs.count(b.var_head())) return BExpr::inf();
  return b;
}

BExpr subst_var_const(const BExpr& b, const SizeVar& v, const SizeConst& c) {
  if (b.is_var() && b.var_head() == v)
    return BExpr::constant(c, NExpr{(long)b.var_iters(), v});
  return b;
}

}  // namespace

NormalizeResult normalize_configuration(Configuration c, int max_steps) {
  NormalizeResult res;
  auto& c4 = c.c4;
  while (max_steps < 0 || (int)res.trace.size() < max_steps) {
    // (inf-const) and (const-distinct): unsatisfiable shapes, checked first
    bool stepped = false;
    for (const auto& ac : c4) {
      if (ac.lhs.is_inf() && ac.rhs.is_const()) {
        res.trace.push_back(NormRule::InfConst);
        return res;
      }
      if (ac.lhs.is_const() && ac.rhs.is_const() &&
          ac.lhs.const_head() != ac.rhs.const_head()) {
        res.trace.push_back(NormRule::ConstDistinct);
        return res;
      }
    }
    // (const-const): same head, move to the integer part
    for (size_t i = 0; i < c4.size(); ++i) {
      if (c4[i].lhs.is_const() && c4[i].rhs.is_const()) {
        c.c3.push_back({c4[i].lhs.const_iters(), c4[i].rhs.const_iters()});
        c4.erase(c4.begin() + i);
        res.trace.push_back(NormRule::ConstConst);
        stepped = true;
        break;
      }
    }
    if (stepped) continue;
    // (var-const): bind the variable to s^{x}(const)
    for (size_t i = 0; i < c4.size(); ++i) {
      if (c4[i].lhs.is_var() && c4[i].rhs.is_const()) {
        SizeVar a = c4[i].lhs.var_head();
        SizeConst k = c4[i].rhs.const_head();
        c.c2[a] = k;
        c.c3.push_back({NExpr{(long)c4[i].lhs.var_iters(), a}, c4[i].rhs.const_iters()});
        c4.erase(c4.begin() + i);
        for (auto& ac : c4) {
          ac.lhs = subst_var_const(ac.lhs, a, k);
          ac.rhs = subst_var_const(ac.rhs, a, k);
        }
        res.trace.push_back(NormRule::VarConst);
        stepped = true;
        break;
      }
    }
    if (stepped) continue;
    // (_inf): a <= inf is always satisfied
    for (size_t i = 0; i < c4.size(); ++i) {
      if (c4[i].rhs.is_inf()) {
        std::set<SizeVar> lv;
        if (c4[i].lhs.is_var()) lv.insert(c4[i].lhs.var_head());
        c4.erase(c4.begin() + i);
        auto rest = c4_vars(c4);
        for (const auto& v : lv)
          if (!rest.count(v) && !c.c1.count(v) && !c.c2.count(v)) c.c0.insert(v);
        res.trace.push_back(NormRule::TrivInf);
        stepped = true;
        break;
      }
    }
    if (stepped) continue;
    // (inf-var-1), via-inf form: inf <= s^l b forces b = inf
    for (size_t i = 0; i < c4.size(); ++i) {
      if (c4[i].lhs.is_inf() && c4[i].rhs.is_var()) {
        SizeVar b = c4[i].rhs.var_head();
        c4.erase(c4.begin() + i);
        c.c1.insert(b);
        for (auto& ac : c4) {
          ac.lhs = subst_var_inf(ac.lhs, {b});
          ac.rhs = subst_var_inf(ac.rhs, {b});
        }
        res.trace.push_back(NormRule::InfVar1);
        stepped = true;
        break;
      }
    }
    if (stepped) continue;
    // (inf-var-1): positive cycle among the constant-free constraints
    {
      ConstraintGraph g;
      std::vector<int> cidx;  // edge -> constraint index
      for (int i = 0; i < (int)c4.size(); ++i) {
        if (c4[i].lhs.is_var() && c4[i].rhs.is_var()) {
          int from = g.node_id({GNode::Kind::AVar, c4[i].lhs.var_head().name});
          int to = g.node_id({GNode::Kind::AVar, c4[i].rhs.var_head().name});
          g.edges.push_back({from, to,
                             Weight::of((long)c4[i].lhs.var_iters() -
                                        (long)c4[i].rhs.var_iters())});
          cidx.push_back(i);
        }
      }
      if (auto cyc = find_positive_cycle(g)) {
        std::set<int> drop;
        std::set<SizeVar> vs;
        for (int e : *cyc) {
          drop.insert(cidx[e]);
          vs.insert(SizeVar{g.nodes[g.edges[e].from].name});
          vs.insert(SizeVar{g.nodes[g.edges[e].to].name});
        }
        std::vector<AConstraint> rest;
        for (int i = 0; i < (int)c4.size(); ++i)
          if (!drop.count(i)) rest.push_back(c4[i]);
        c4 = std::move(rest);
        for (const auto& v : vs) c.c1.insert(v);
        for (auto& ac : c4) {
          ac.lhs = subst_var_inf(ac.lhs, vs);
          ac.rhs = subst_var_inf(ac.rhs, vs);
        }
        res.trace.push_back(NormRule::InfVar1);
        continue;
      }
    }
    // (inf-var-2): a variable reachable from two distinct constants
    {
      SizeProblem p;
      for (const auto& ac : c4) {
        SizeExpr l = ac.lhs.is_inf() ? SizeExpr::inf()
                     : ac.lhs.is_var()
                         ? SizeExpr::var(ac.lhs.var_head(), ac.lhs.var_iters())
                         : SizeExpr::constant(ac.lhs.const_head(), 0);
        SizeExpr r = ac.rhs.is_inf() ? SizeExpr::inf()
                     : ac.rhs.is_var()
                         ? SizeExpr::var(ac.rhs.var_head(), ac.rhs.var_iters())
                         : SizeExpr::constant(ac.rhs.const_head(), 0);
        p.cs.push_back({l, r});
      }
      auto triples = incompatible_triples(p);
      if (!triples.empty()) {
        SizeVar a = std::get<0>(triples.front());
        c.c1.insert(a);
        for (auto& ac : c4) {
          ac.lhs = subst_var_inf(ac.lhs, {a});
          ac.rhs = subst_var_inf(ac.rhs, {a});
        }
        res.trace.push_back(NormRule::InfVar2);
        continue;
      }
    }
    break;
  }
  res.config = std::move(c);
  return res;
}

namespace {

ConstraintGraph integer_graph(const std::vector<NConstraint>& c3) {
  ConstraintGraph g;
  int zero = g.node_id({GNode::Kind::Zero, ""});
  std::set<SizeVar> vars;
  for (const auto& nc : c3) {
    if (nc.lhs.var) vars.insert(*nc.lhs.var);
    if (nc.rhs.var) vars.insert(*nc.rhs.var);
  }
  for (const auto& v : vars) {
    int i = g.node_id({GNode::Kind::NVar, v.name});
    g.edges.push_back({zero, i, Weight::of(0)});  // x >= 0
  }
  for (const auto& nc : c3) {
    int from = nc.lhs.var ? g.node_id({GNode::Kind::NVar, nc.lhs.var->name}) : zero;
    int to = nc.rhs.var ? g.node_id({GNode::Kind::NVar, nc.rhs.var->name}) : zero;
    g.edges.push_back({from, to, Weight::of(nc.lhs.offset - nc.rhs.offset)});
  }
  return g;
}

}  // namespace

bool satisfiable(const SizeProblem& p) {
  if (p.bottom) return false;
  auto res = normalize_configuration(Configuration::of_problem(p));
  if (res.bottom()) return false;
  return !has_positive_cycle(integer_graph(res.config->c3));
}

std::string IntegerProblem::C::str() const {
  auto side = [](const std::optional<SizeVar>& v, long k) {
    if (!v) return std::to_string(k);
    std::string o = "x_" + v->name;
    if (k) o += "+" + std::to_string(k);
    return o;
  };
  return side(x, k) + " <= " + side(y, l);
}

std::set<SizeVar> IntegerProblem::vars() const {
  std::set<SizeVar> out;
  for (const auto& c : cs) {
    if (c.x) out.insert(*c.x);
    if (c.y) out.insert(*c.y);
  }
  return out;
}

std::optional<IntegerProblem> integer_problem(const std::vector<AConstraint>& affine) {
  IntegerProblem out;
  for (const auto& ac : affine) {
    if (!ac.rhs.is_var()) return std::nullopt;
    IntegerProblem::C c;
    c.y = ac.rhs.var_head();
    c.l = (long)ac.rhs.var_iters();
    if (ac.lhs.is_var()) {
      c.x = ac.lhs.var_head();
      c.k = (long)ac.lhs.var_iters();
    } else if (ac.lhs.is_const()) {
      c.x = ac.lhs.const_iters().var;
      c.k = ac.lhs.const_iters().offset;
    } else {
      return std::nullopt;  // inf on the left is not affine
    }
    out.cs.push_back(c);
  }
  return out;
}

const long MaxPlusMatrix::NEG_INF = std::numeric_limits<long>::min() / 4;
const long MaxPlusDetails::POS_INF = std::numeric_limits<long>::max() / 4;

MaxPlusMatrix MaxPlusMatrix::make(int n) {
  MaxPlusMatrix a;
  a.n = n;
  a.m.assign((size_t)n * n, NEG_INF);
  return a;
}

MaxPlusMatrix MaxPlusMatrix::identity(int n) {
  MaxPlusMatrix a = make(n);
  for (int i = 0; i < n; ++i) a.at(i, i) = 0;
  return a;
}

MaxPlusMatrix MaxPlusMatrix::otimes(const MaxPlusMatrix& o) const {
  MaxPlusMatrix r = make(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      long a = at(i, k);
      if (a == NEG_INF) continue;
      for (int j = 0; j < n; ++j) {
        long b = o.at(k, j);
        if (b == NEG_INF) continue;
        r.at(i, j) = std::max(r.at(i, j), a + b);
      }
    }
  return r;
}

MaxPlusMatrix MaxPlusMatrix::oplus(const MaxPlusMatrix& o) const {
  MaxPlusMatrix r = make(n);
  for (size_t i = 0; i < m.size(); ++i) r.m[i] = std::max(m[i], o.m[i]);
  return r;
}

MaxPlusMatrix MaxPlusMatrix::star() const {
  MaxPlusMatrix acc = identity(n);
  MaxPlusMatrix pow = identity(n);
  for (int k = 1; k <= n; ++k) {
    pow = pow.otimes(*this);
    acc = acc.oplus(pow);
  }
  return acc;
}

std::vector<long> MaxPlusMatrix::otimes_vec(const std::vector<long>& v) const {
  std::vector<long> r((size_t)n, NEG_INF);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (at(i, j) == NEG_INF || v[j] == NEG_INF) continue;
      r[i] = std::max(r[i], at(i, j) + v[j]);
    }
  return r;
}

std::optional<std::map<SizeVar, long>> maxplus_smallest(const IntegerProblem& p,
                                                        MaxPlusDetails* details) {
  auto var_set = p.vars();
  std::vector<SizeVar> order(var_set.begin(), var_set.end());
  int n = (int)order.size();
  auto index = [&](const SizeVar& v) {
    return (int)(std::lower_bound(order.begin(), order.end(), v) - order.begin());
  };

  // a_ij = sup{k-l | x_j + k <= x_i + l}, b_i = sup({0} u {k-l | k <= x_i+l}),
  // c_i = inf{l-k | x_i + k <= l}
  std::vector<long> b((size_t)n, 0), cc((size_t)n, MaxPlusDetails::POS_INF);
  std::vector<std::vector<std::pair<int, long>>> in((size_t)n);  // i <- (j, w)
  MaxPlusMatrix a = MaxPlusMatrix::make(n);
  for (const auto& c : p.cs) {
    if (c.x && c.y) {
      int i = index(*c.y), j = index(*c.x);
      long w = c.k - c.l;
      a.at(i, j) = std::max(a.at(i, j), w);
      in[i].push_back({j, w});
    } else if (!c.x && c.y) {
      int i = index(*c.y);
      b[i] = std::max(b[i], c.k - c.l);
    } else if (c.x && !c.y) {
      int i = index(*c.x);
      cc[i] = std::min(cc[i], c.l - c.k);
    } else if (c.k > c.l) {
      return std::nullopt;  // closed constraint k <= l violated
    }
  }
  if (details) {
    details->order = order;
    details->a = a;
    details->b = b;
    details->c = cc;
  }

  // positive cycle?
  {
    ConstraintGraph g;
    for (int i = 0; i < n; ++i) g.node_id({GNode::Kind::NVar, order[i].name});
    for (int i = 0; i < n; ++i)
      for (const auto& [j, w] : in[i]) g.edges.push_back({j, i, Weight::of(w)});
    if (has_positive_cycle(g)) return std::nullopt;
  }

  std::vector<long> x;
  if (n <= 128) {
    MaxPlusMatrix astar = a.star();
    x = astar.otimes_vec(b);
    if (details) {
      details->astar = astar;
      details->x = x;
    }
  } else {
    // longest path from the 0-source: x = a* otimes b by Bellman-Ford
    x = b;
    for (int round = 0; round < n; ++round) {
      bool changed = false;
      for (int i = 0; i < n; ++i)
        for (const auto& [j, w] : in[i])
          if (x[j] != MaxPlusMatrix::NEG_INF && x[j] + w > x[i]) {
            x[i] = x[j] + w;
            changed = true;
          }
      if (!changed) break;
    }
    if (details) details->x = x;
  }

  for (int i = 0; i < n; ++i)
    if (cc[i] != MaxPlusDetails::POS_INF && x[i] > cc[i]) return std::nullopt;

  std::map<SizeVar, long> out;
  for (int i = 0; i < n; ++i) out[order[i]] = x[i];
  return out;
}

std::optional<SizeSubst> lift_affine_solution(const std::vector<AConstraint>& affine,
                                              const std::map<SizeVar, long>& psi) {
  // union-find over variable and constant heads
  std::map<std::string, std::string> parent;  // keys "v:..." / "c:..."
  std::function<std::string(const std::string&)> find = [&](const std::string& k) {
    auto it = parent.find(k);
    if (it == parent.end() || it->second == k) {
      parent[k] = k;
      return k;
    }
    return parent[k] = find(it->second);
  };
  auto unite = [&](const std::string& a, const std::string& b) {
    parent[find(a)] = find(b);
  };
  std::set<SizeVar> avars;
  auto key_of = [&](const BExpr& b) {
    if (b.is_var()) return "v:" + b.var_head().name;
    return "c:" + b.const_head().name;
  };
  for (const auto& ac : affine) {
    if (!ac.rhs.is_var()) return std::nullopt;  // not affine
    avars.insert(ac.rhs.var_head());
    if (ac.lhs.is_var()) avars.insert(ac.lhs.var_head());
    unite(key_of(ac.lhs), key_of(ac.rhs));
  }
  // representative per class: the unique constant, else the least variable
  std::map<std::string, std::optional<SizeConst>> class_const;
  std::map<std::string, std::optional<SizeVar>> class_var;
  for (const auto& [k, _] : parent) {
    std::string r = find(k);
    if (k[0] == 'c') {
      SizeConst c{k.substr(2)};
      auto& slot = class_const[r];
      if (slot && !(*slot == c)) return std::nullopt;  // incompatible triple
      slot = c;
    } else {
      SizeVar v{k.substr(2)};
      auto& slot = class_var[r];
      if (!slot || v < *slot) slot = v;
    }
  }
  SizeSubst out;
  for (const auto& v : avars) {
    std::string r = find("v:" + v.name);
    auto it = psi.find(v);
    long k = it == psi.end() ? 0 : it->second;
    if (class_const[r])
      out.set(v, SizeExpr::constant(*class_const[r], (unsigned)k));
    else
      out.set(v, SizeExpr::var(*class_var[r], (unsigned)k));
  }
  return out;
}

MgsResult mgs(const SizeProblem& p) {
  if (p.bottom) return {};
  auto res = normalize_configuration(Configuration::of_problem(p));
  if (res.bottom()) return {};
  const Configuration& c = *res.config;

  auto ip = integer_problem(c.c4);
  assert(ip && "normal configurations have affine c4");
  for (const auto& nc : c.c3) {
    IntegerProblem::C ic;
    ic.x = nc.lhs.var;
    ic.k = nc.lhs.offset;
    ic.y = nc.rhs.var;
    ic.l = nc.rhs.offset;
    ip->cs.push_back(ic);
  }
  auto psi = maxplus_smallest(*ip);
  if (!psi) return {};
  auto acute = lift_affine_solution(c.c4, *psi);
  if (!acute) return {};

  SizeSubst out;
  for (const auto& v : c.c1) out.set(v, SizeExpr::inf());
  for (const auto& [v, k] : c.c2) {
    auto it = psi->find(v);
    long n = it == psi->end() ? 0 : it->second;
    out.set(v, SizeExpr::constant(k, (unsigned)n));
  }
  for (const auto& [v, e] : acute->entries()) out.set(v, e);
  return {out};
}

}  // namespace hrs
