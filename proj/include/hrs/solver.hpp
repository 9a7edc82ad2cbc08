#ifndef HRS_SOLVER_HPP
#define HRS_SOLVER_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hrs/annot.hpp"
#include "hrs/size.hpp"

namespace hrs {

/// A size problem: bottom, or constraints a <=? b over the top-extended
/// successor algebra.
struct SizeProblem {
  bool bottom = false;
  std::vector<std::pair<SizeExpr, SizeExpr>> cs;

  static SizeProblem bot() { return SizeProblem{true, {}}; }
  static SizeProblem of(std::vector<std::pair<SizeExpr, SizeExpr>> cs) {
    return SizeProblem{false, std::move(cs)};
  }
  std::set<SizeVar> vars() const;
  std::set<SizeConst> consts() const;
  std::string str() const;
};

/// |.|: structural reduction of a subtyping problem to a size problem.
/// Arrow domains flip; mismatched shapes yield bottom; Sol(P) = Sol(|P|).
SizeProblem reduce_subtyping(const std::vector<std::pair<AnnType, AnnType>>& p);

/// Variable-free subtyping decision via reduce_subtyping + leq_inf.
bool subtype(const AnnType& t, const AnnType& u);

// ---------------------------------------------------------------------------
// Constraint graphs.

struct GNode {
  enum class Kind { AVar, NVar, Const, Zero, Inf };
  Kind kind;
  std::string name;
  auto operator<=>(const GNode&) const = default;
};

/// Edge weights live in Z u {+inf}.
struct Weight {
  bool inf = false;
  long w = 0;
  static Weight of(long w) { return {false, w}; }
  static Weight infinite() { return {true, 0}; }
  Weight operator+(const Weight& o) const {
    if (inf || o.inf) return infinite();
    return of(w + o.w);
  }
  bool positive() const { return inf || w > 0; }
};

struct ConstraintGraph {
  std::vector<GNode> nodes;
  struct Edge {
    int from, to;
    Weight w;
  };
  std::vector<Edge> edges;

  int node_id(const GNode& n);           // interning
  int find_node(const GNode& n) const;   // -1 if absent
};

/// Graph of a size problem per the six edge clauses (the N-sort clauses are
/// vacuous here; integer problems get their own graph below).
ConstraintGraph build_graph(const SizeProblem& p);

/// A cycle of strictly positive weight exists.
bool has_positive_cycle(const ConstraintGraph& g);
/// The edge indices of one positive cycle, if any.
std::optional<std::vector<int>> find_positive_cycle(const ConstraintGraph& g);

/// Triples (alpha, c, d) with c <=_P alpha, d <=_P alpha and c != d.
std::vector<std::tuple<SizeVar, SizeConst, SizeConst>> incompatible_triples(
    const SizeProblem& p);

// ---------------------------------------------------------------------------
// Configurations and normalization.

struct NConstraint {
  NExpr lhs, rhs;
  auto operator<=>(const NConstraint&) const = default;
  std::string str() const { return lhs.str() + " <= " + rhs.str(); }
};

struct AConstraint {
  BExpr lhs, rhs;
  auto operator<=>(const AConstraint&) const = default;
  std::string str() const { return lhs.str() + " <= " + rhs.str(); }
};

/// Five-part solver state: unconstrained variables (c0), variables forced to
/// inf (c1), variables forced to s^{x_a}(const) (c2), integer constraints
/// (c3) and the remaining A-sort constraints (c4).
struct Configuration {
  std::set<SizeVar> c0, c1;
  std::map<SizeVar, SizeConst> c2;
  std::vector<NConstraint> c3;
  std::vector<AConstraint> c4;

  static Configuration of_problem(const SizeProblem& p);
  std::string str() const;
};

enum class NormRule { TrivInf, InfVar1, InfVar2, InfConst, ConstDistinct, ConstConst, VarConst };
const char* norm_rule_name(NormRule r);

struct NormalizeResult {
  std::optional<Configuration> config;  // nullopt = bottom
  std::vector<NormRule> trace;
  bool bottom() const { return !config.has_value(); }
};

/// Exhaustive application of the normalization rules, in the fixed order
/// (inf-const)/(const-dist), (cc), (alpha-c), (triv-inf), then the positive-
/// cycle and incompatible-triple rules. The result is normal: c4 is affine
/// with no positive cycles and no incompatible triples. A non-negative
/// max_steps stops after that many rule applications (the tests inspect
/// intermediate configurations with it).
NormalizeResult normalize_configuration(Configuration c, int max_steps = -1);

/// Satisfiability: normalize; bottom is unsatisfiable, otherwise the problem
/// is satisfiable iff the integer part has no positive cycle.
bool satisfiable(const SizeProblem& p);

// ---------------------------------------------------------------------------
// Integer problems and the max-plus smallest solution.

/// Constraints x + k <=? y + l where either side may be the 0 node.
struct IntegerProblem {
  struct C {
    std::optional<SizeVar> x;
    long k = 0;
    std::optional<SizeVar> y;
    long l = 0;
    std::string str() const;
  };
  std::vector<C> cs;
  std::set<SizeVar> vars() const;
};

/// I(P) of an affine A-sort problem: s^k a <=? s^l b becomes x_a+k <=? x_b+l
/// and s^e c <=? s^l b becomes e <=? x_b+l. Fails on non-affine input.
std::optional<IntegerProblem> integer_problem(const std::vector<AConstraint>& affine);

/// Max-plus matrix over Z u {-inf, +inf} with oplus = max and otimes = +.
struct MaxPlusMatrix {
  int n = 0;
  std::vector<long> m;  // row-major; NEG_INF sentinel
  static const long NEG_INF;

  static MaxPlusMatrix make(int n);
  static MaxPlusMatrix identity(int n);  // 0 diagonal, -inf elsewhere
  long& at(int i, int j) { return m[i * n + j]; }
  long at(int i, int j) const { return m[i * n + j]; }
  MaxPlusMatrix otimes(const MaxPlusMatrix& o) const;
  MaxPlusMatrix oplus(const MaxPlusMatrix& o) const;
  /// a* = oplus_{k=0..n} a^k (valid when there is no positive cycle).
  MaxPlusMatrix star() const;
  std::vector<long> otimes_vec(const std::vector<long>& v) const;
};

/// Intermediate matrices of the smallest-solution computation, for
/// inspection: variable order, a, b, c, a*, and x = a* otimes b.
struct MaxPlusDetails {
  std::vector<SizeVar> order;
  MaxPlusMatrix a, astar;
  std::vector<long> b, c, x;  // c uses POS_INF sentinel
  static const long POS_INF;
};

/// Smallest N-closed solution of an integer problem: builds a, b, c, checks
/// for positive cycles and a* otimes b <= c, and returns x = a* otimes b.
/// Large problems use an equivalent longest-path computation.
std::optional<std::map<SizeVar, long>> maxplus_smallest(const IntegerProblem& p,
                                                        MaxPlusDetails* details = nullptr);

/// psi-acute: lifts an integer solution back to an affine A-sort problem
/// with no incompatible triples. Class representatives are the unique class
/// constant when present, else the least variable of the class.
std::optional<SizeSubst> lift_affine_solution(const std::vector<AConstraint>& affine,
                                              const std::map<SizeVar, long>& psi);

/// Most general solution of a size problem, or nullopt when unsatisfiable.
struct MgsResult {
  std::optional<SizeSubst> subst;
  bool sat() const { return subst.has_value(); }
};
MgsResult mgs(const SizeProblem& p);

}  // namespace hrs

#endif
