#ifndef HRS_SYSTEM_HPP
#define HRS_SYSTEM_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hrs/annot.hpp"
#include "hrs/syntax.hpp"

namespace hrs {

/// A rewrite rule f l1..ln -> r.
struct Rule {
  std::string name;  // e.g. "sub#1"
  Term lhs, rhs;
  std::string head;
  std::vector<Term> args;
};

struct RewriteSystem {
  std::string name;
  std::vector<std::string> sorts;
  SortOrder order;
  std::map<std::string, ConstructorSig> cons;
  std::map<std::string, FunctionSig> funs;
  std::vector<Rule> rules;
  std::vector<std::pair<std::string, std::string>> prec_lt;  // f < g
  std::vector<std::pair<std::string, std::string>> prec_eq;  // f ~ g

  SymbolTable symbols() const;
  bool is_sort(const std::string& n) const;
  const ConstructorSig* constructor(const std::string& n) const;
  const FunctionSig* function(const std::string& n) const;
  std::vector<Rule> rules_of(const std::string& f) const;
};

/// Principal typing environment of a rule left-hand side: walks the pattern
/// against the declared argument types. Fails on applied variables (their
/// type cannot be read off) and on structural mismatches.
struct PatternEnv {
  TypeEnv env;
  Type lhs_type;
  bool has_abstraction = false;
  bool has_applied_var = false;
};
std::optional<PatternEnv> infer_pattern_env(const Rule& r, const RewriteSystem& sys,
                                            std::string* err = nullptr);

/// Per-condition diagnostics for the rule well-formedness conditions:
/// lhs shape, FV inclusion, lhs typability, and subject reduction (the
/// syntactic pattern condition, or a direct preservation check of the rhs at
/// the lhs type). Empty means valid.
std::vector<std::string> validate_rule(const Rule& r, const RewriteSystem& sys);

/// Well-founded quasi-order on function symbols. Classes are strongly
/// connected components of the call graph (extended with user declarations);
/// class reachability gives the strict part. Variables and constructors are
/// below every function symbol.
class Precedence {
 public:
  bool equiv(const std::string& g, const std::string& f) const;
  bool less(const std::string& g, const std::string& f) const;
  /// g usable in the body of f: g < f or g ~ f.
  bool leq(const std::string& g, const std::string& f) const;

  std::map<std::string, int> cls;              // function symbol -> class id
  std::set<std::pair<int, int>> class_lt;      // transitive class order
};

/// Call-graph inference with user `prec` overrides; contradictory strict
/// declarations (a < b with a and b in one class) are reported.
Precedence infer_precedence(const RewriteSystem& sys, std::vector<std::string>& errors);

/// Declaration-level checks: unique names, declared sorts, acyclic sort
/// order, signature validation. Warnings are prefixed "warning:".
std::vector<std::string> validate_declarations(const RewriteSystem& sys);

}  // namespace hrs

#endif
