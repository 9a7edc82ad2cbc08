#ifndef HRS_SIZE_HPP
#define HRS_SIZE_HPP

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace hrs {

struct SizeVar {
  std::string name;
  auto operator<=>(const SizeVar&) const = default;
};

struct SizeConst {
  std::string name;  // rendered "#name"
  auto operator<=>(const SizeConst&) const = default;
};

using SizeHead = std::variant<SizeVar, SizeConst>;

/// Size expressions of the successor algebra with top element, kept in
/// normal form: inf, or s^k applied to a variable or constant head.
class SizeExpr {
 public:
  SizeExpr() : inf_(true), iters_(0) {}
  static SizeExpr inf() { return SizeExpr(); }
  static SizeExpr var(std::string name, unsigned iters = 0) {
    return SizeExpr(SizeHead(SizeVar{std::move(name)}), iters);
  }
  static SizeExpr var(SizeVar v, unsigned iters = 0) {
    return SizeExpr(SizeHead(std::move(v)), iters);
  }
  static SizeExpr constant(std::string name, unsigned iters = 0) {
    return SizeExpr(SizeHead(SizeConst{std::move(name)}), iters);
  }
  static SizeExpr constant(SizeConst c, unsigned iters = 0) {
    return SizeExpr(SizeHead(std::move(c)), iters);
  }
  static SizeExpr succ(const SizeExpr& e, unsigned k = 1) {
    if (e.is_inf()) return e;  // s^k(inf) is not a term; treat as absorbed
    return SizeExpr(e.head_, e.iters_ + k);
  }

  bool is_inf() const { return inf_; }
  unsigned iters() const { return iters_; }
  const SizeHead& head() const { return head_; }
  const SizeVar* var_head() const {
    return inf_ ? nullptr : std::get_if<SizeVar>(&head_);
  }
  const SizeConst* const_head() const {
    return inf_ ? nullptr : std::get_if<SizeConst>(&head_);
  }

  std::string str() const;

  auto operator<=>(const SizeExpr&) const = default;

 private:
  SizeExpr(SizeHead h, unsigned k) : inf_(false), iters_(k), head_(std::move(h)) {}
  bool inf_;
  unsigned iters_;
  SizeHead head_;
};

std::set<SizeVar> size_vars(const SizeExpr& e);

/// a <= b iff b = s^k a for some k >= 0; returns that k.
std::optional<unsigned> leq(const SizeExpr& a, const SizeExpr& b);
/// a < b iff b = s^k a with k > 0.
bool leq_strict(const SizeExpr& a, const SizeExpr& b);
/// Top-extension: a <= b or b = inf.
bool leq_inf(const SizeExpr& a, const SizeExpr& b);

/// Finite map from size variables to size expressions; identity elsewhere.
/// Applying maps a to inf as soon as some variable of a is mapped to inf.
class SizeSubst {
 public:
  SizeSubst() = default;
  SizeSubst(std::initializer_list<std::pair<const SizeVar, SizeExpr>> init)
      : map_(init) {}

  void set(SizeVar v, SizeExpr e) { map_[std::move(v)] = std::move(e); }
  const SizeExpr* find(const SizeVar& v) const {
    auto it = map_.find(v);
    return it == map_.end() ? nullptr : &it->second;
  }
  SizeExpr get(const SizeVar& v) const {
    auto it = map_.find(v);
    return it == map_.end() ? SizeExpr::var(v) : it->second;
  }
  bool empty() const { return map_.empty(); }
  size_t size() const { return map_.size(); }
  const std::map<SizeVar, SizeExpr>& entries() const { return map_; }
  std::set<SizeVar> domain() const;

  std::string str() const;
  friend bool operator==(const SizeSubst&, const SizeSubst&) = default;

 private:
  std::map<SizeVar, SizeExpr> map_;
};

SizeExpr apply(const SizeExpr& a, const SizeSubst& phi);

/// compose(a, b): x |-> (x a) b, defined on dom(a) u dom(b).
SizeSubst compose(const SizeSubst& a, const SizeSubst& b);

/// Successor and head parts: x phi = s^{succ[x]}(head[x]), succ[x] = 0 when
/// head[x] = inf. head values have zero iterations.
struct SuccHeadDecomp {
  std::map<SizeVar, unsigned> succ;
  std::map<SizeVar, SizeExpr> head;
};

SuccHeadDecomp decompose(const SizeSubst& phi);

/// Decides phi <=(generality) psi over the given variables: finds a renaming
/// rho : V -> V u C u {inf} with (x phi) rho <=inf (x psi) for every x in
/// `over`. rho is built head-wise from the decomposition of phi.
std::optional<SizeSubst> more_general(const SizeSubst& phi, const SizeSubst& psi,
                                      const std::set<SizeVar>& over);
/// Same, over dom(phi) u dom(psi).
std::optional<SizeSubst> more_general(const SizeSubst& phi, const SizeSubst& psi);

/// Session-local fresh-name source; fresh names cannot be parsed back, so
/// they never collide with user-written ones.
struct FreshSizes {
  int next = 0;
  SizeVar fresh_var() { return SizeVar{"?" + std::to_string(++next)}; }
  SizeConst fresh_const() { return SizeConst{"?" + std::to_string(++next)}; }
};

// ---------------------------------------------------------------------------
// Two-sorted successor-iterator terms, used by the constraint solver.

/// Integer-sort expression x + k (or the literal k when var is absent).
struct NExpr {
  long offset = 0;
  std::optional<SizeVar> var;  // named after the size variable it mirrors

  static NExpr lit(long k) { return NExpr{k, std::nullopt}; }
  static NExpr of(SizeVar v, long k = 0) { return NExpr{k, std::move(v)}; }
  bool closed() const { return !var.has_value(); }
  std::string str() const;
  auto operator<=>(const NExpr&) const = default;
};

/// Admissible A-sort term in normal form: inf, s^k(var) or s^e(const).
class BExpr {
 public:
  BExpr() : tag_(Tag::Inf) {}
  static BExpr inf() { return BExpr(); }
  static BExpr var(SizeVar v, unsigned k = 0) {
    BExpr b;
    b.tag_ = Tag::Var;
    b.v_ = std::move(v);
    b.k_ = k;
    return b;
  }
  static BExpr constant(SizeConst c, NExpr e) {
    BExpr b;
    b.tag_ = Tag::Const;
    b.c_ = std::move(c);
    b.e_ = std::move(e);
    return b;
  }
  static BExpr of(const SizeExpr& e);

  bool is_inf() const { return tag_ == Tag::Inf; }
  bool is_var() const { return tag_ == Tag::Var; }
  bool is_const() const { return tag_ == Tag::Const; }
  const SizeVar& var_head() const { return v_; }
  unsigned var_iters() const { return k_; }
  const SizeConst& const_head() const { return c_; }
  const NExpr& const_iters() const { return e_; }

  BExpr succ(unsigned n) const;
  std::string str() const;
  auto operator<=>(const BExpr&) const = default;

 private:
  enum class Tag { Inf, Var, Const };
  Tag tag_;
  SizeVar v_;
  unsigned k_ = 0;
  SizeConst c_;
  NExpr e_;
};

/// Raw two-sorted A-term, input of normalize_b (tests and diagnostics).
struct RawB {
  enum class K { Inf, Var, Const, Succ, Iter };
  K k;
  SizeVar v;      // Var
  SizeConst c;    // Const
  NExpr exp;      // Iter exponent
  std::shared_ptr<const RawB> sub;  // Succ/Iter argument

  static RawB inf() { return {K::Inf, {}, {}, {}, nullptr}; }
  static RawB var(SizeVar v) { return {K::Var, std::move(v), {}, {}, nullptr}; }
  static RawB constant(SizeConst c) { return {K::Const, {}, std::move(c), {}, nullptr}; }
  static RawB succ(RawB b) {
    return {K::Succ, {}, {}, {}, std::make_shared<const RawB>(std::move(b))};
  }
  static RawB iter(NExpr e, RawB b) {
    return {K::Iter, {}, {}, std::move(e), std::make_shared<const RawB>(std::move(b))};
  }
};

/// Normal form of a raw term under the three equations s^0 a = a,
/// s^{x+1} a = s (s^x a), s^x (s a) = s (s^x a): plain successors moved out,
/// closed exponent parts folded into them.
struct NormB {
  bool inf = false;
  unsigned k = 0;                   // outer plain successors
  std::vector<SizeVar> iter_vars;   // remaining variable exponents
  std::optional<SizeHead> head;     // absent iff inf
  std::string str() const;
  friend bool operator==(const NormB&, const NormB&) = default;
};

NormB normalize_b(const RawB& raw);
/// Admissible restriction (at most one variable): fails otherwise.
std::optional<BExpr> to_admissible(const NormB& n);

}  // namespace hrs

#endif
