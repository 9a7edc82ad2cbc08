#ifndef HRS_REWRITE_HPP
#define HRS_REWRITE_HPP

#include <optional>
#include <string>
#include <vector>

#include "hrs/system.hpp"

namespace hrs {

/// Syntactic first-order matching of a rule pattern against a term.
/// Patterns are lhs argument trees: no abstractions, no applied variables.
/// Non-linear patterns require alpha-equal images.
std::optional<TermSubst> match(const Term& pattern, const Term& t);

/// A redex: position (path of argument indices from the root, 0 = function
/// side of an application, 1 = argument side, 2 = under a binder),
/// the rule name or "beta", and the matching substitution.
struct Redex {
  std::vector<int> pos;
  std::string rule;  // "beta" for beta-redexes
  TermSubst subst;
};

/// All one-step reducts of t (beta and rule redexes at every position).
std::vector<std::pair<Redex, Term>> step(const RewriteSystem& sys, const Term& t);

/// Contract the leftmost-innermost redex, if any.
std::optional<Term> step_innermost(const RewriteSystem& sys, const Term& t);

/// Leftmost-innermost normalization bounded by fuel (number of
/// contractions). Returns nullopt when the fuel runs out.
std::optional<Term> normalize(const RewriteSystem& sys, const Term& t, long fuel,
                              long* used = nullptr);

/// Breadth-first reduction exploration up to the given depth; returns a
/// reduction path that revisits an earlier term, if one exists.
std::optional<std::vector<Term>> loop_search(const RewriteSystem& sys, const Term& t,
                                             int depth, size_t frontier_cap = 100000);

}  // namespace hrs

#endif
