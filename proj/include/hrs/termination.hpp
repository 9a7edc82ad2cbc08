#ifndef HRS_TERMINATION_HPP
#define HRS_TERMINATION_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hrs/infer.hpp"
#include "hrs/system.hpp"

namespace hrs {

/// Accessibility triple: a subterm, its type, and the sort its size is
/// measured at.
struct AccTriple {
  Term t;
  Type ty;
  std::string measured;
};

/// Reflexive-transitive closure of the accessible-argument relation from
/// (l, T, T); descends through the accessible constructor arguments,
/// tracking each argument's measured sort.
std::vector<AccTriple> accessible_triples(const Term& l, const Type& ty,
                                          const RewriteSystem& sys);

/// Entry of a recursive-subterm decomposition.
struct SubEntry {
  Term t;
  Type ty;
  std::string measured;
  long depth = 0;
  long intrinsic = 0;  // constant size of a non-variable leaf
};

struct SubResult {
  bool simple = true;
  std::string why_not_simple;
  std::vector<SubEntry> entries;        // normal form
  long rd = 0;                          // max of depth(+intrinsic) over entries
  std::map<std::string, long> rd_x;     // per-variable max depth
  std::map<std::string, SubEntry> var_entry;
};

/// Normal form of the size decomposition of t at sort B: constructor
/// applications are replaced by the arguments their output annotation
/// depends on (depth grows by the annotation's successor count). The term is
/// simple when every entry is a variable or a size-constant leaf.
SubResult recursive_subterms(const Term& t, const std::string& sortB,
                             const RewriteSystem& sys);

bool is_simple(const Term& t, const std::string& sortB, const RewriteSystem& sys);
long rd(const Term& t, const std::string& sortB, const RewriteSystem& sys);
long rd_x(const Term& t, const std::string& sortB, const std::string& x,
          const RewriteSystem& sys);

/// S^c folded over argument sizes: m + max of the sizes of the arguments
/// sharing the head variable of sigma (m alone when none share, 0 for inf).
long constructor_size(const RewriteSystem& sys, const ConstructorSig& sig,
                      const std::function<long(int)>& arg_size);

/// Height-style size of a ground constructor term of a first-order sort.
std::optional<long> concrete_size(const RewriteSystem& sys, const Term& t,
                                  std::string* err = nullptr);

/// Per-variable typing data of a rule context.
struct VarInfo {
  int k_x = 0;              // witness argument (0-based)
  std::string B_x;          // measured sort; empty = size unused
  SizeVar alpha_x;
  AnnType type;
};

struct ArgContext {
  SubResult sub;
  long n = 0;
  SizeVar gamma;
};

struct RuleContext {
  AnnEnv gamma_env;
  std::map<std::string, VarInfo> vars;
  SizeSubst phi;
  std::vector<ArgContext> args;  // one per termination argument
};

enum class CtxFailure { None, NotSimple, NotAccessible, IncompatibleSharing, Shape };

/// Gamma/phi heuristic: termination arguments must be simple; variables in
/// their decompositions share one size variable per argument (classes merged
/// across arguments through shared variables); every right-hand-side
/// variable needs an accessibility path. `extra_unions` merges additional
/// term variables' size classes (the typing-driven retry).
std::optional<RuleContext> build_rule_context(
    const Rule& r, const RewriteSystem& sys, FreshSizes& fresh,
    CtxFailure* failure = nullptr, std::string* err = nullptr,
    const std::vector<std::pair<std::string, std::string>>& extra_unions = {});

struct MinimalityResult {
  bool ok = true;
  std::string failed;  // "(a)".."(e)"
  std::string detail;
};

/// Syntactic minimality conditions (a)-(e).
MinimalityResult check_minimality(const RuleContext& ctx);

struct RuleVerdict {
  std::string rule;
  bool monotony = false, accessibility = false, minimality = false, srd = false;
  std::vector<std::string> diagnostics;
  std::vector<CallSite> sites;    // recursive-call sites (when inference ran)
  std::vector<SizeExpr> bound;    // instantiated termination bounds
  bool pass() const { return monotony && accessibility && minimality && srd; }
};

struct CheckOptions {
  bool lex_search = false;
};

RuleVerdict check_rule(const Rule& r, const RewriteSystem& sys, const Precedence& prec,
                       const CheckOptions& opts = {});

struct SystemReport {
  enum class Verdict { Yes, Maybe, Invalid };
  Verdict verdict = Verdict::Invalid;
  std::vector<std::string> system_diagnostics;
  std::vector<RuleVerdict> rules;
};

const char* verdict_name(SystemReport::Verdict v);

/// Validates declarations and rules, infers the precedence, and checks every
/// rule; YES only when all four conditions pass for every rule.
SystemReport check_system(const RewriteSystem& sys, const CheckOptions& opts = {});

}  // namespace hrs

#endif
