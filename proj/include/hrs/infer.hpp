#ifndef HRS_INFER_HPP
#define HRS_INFER_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hrs/solver.hpp"
#include "hrs/system.hpp"

namespace hrs {

using AnnEnv = std::map<std::string, AnnType>;

/// Inference derivation. Application nodes record the head's declared
/// annotated type, the per-argument renamings that set the argument types
/// apart, and the local most general solution eta of the argument subtyping
/// problem; this is what the decreasingness pass replays.
struct Derivation;
using DerivPtr = std::shared_ptr<const Derivation>;

struct Derivation {
  enum class K { App, Lam };
  K k = K::App;
  Term term;

  // App
  std::string head;
  Term::Kind head_kind = Term::Kind::Var;
  AnnType declared;               // full declared (or environment) type
  std::vector<SizeSubst> rho;     // one renaming per argument
  SizeSubst eta;                  // mgs of {U_i rho_i <=? V_i}
  std::vector<DerivPtr> kids;     // argument derivations (App) or body (Lam)

  // Lam
  std::string bound;
  Type bound_ty;

  AnnType result;
};

struct InferOutcome {
  std::optional<AnnType> type;
  DerivPtr deriv;
  std::string error;
  bool ok() const { return type.has_value(); }
};

/// Most general sized type of t in env (which must be free of size
/// variables) under the precedence discipline of checking f's rules:
/// heads must be variables, constructors, or function symbols below f,
/// or equivalent to f and applied to at least their termination arguments.
InferOutcome infer(const RewriteSystem& sys, const Precedence& prec,
                   const std::string& f, const AnnEnv& env, const Term& t,
                   FreshSizes& fresh);

/// A recursive-call site: an application of a symbol equivalent to f, with
/// the instantiated sizes of its termination arguments.
struct CallSite {
  std::string head;
  std::vector<SizeExpr> sizes;
  std::string at;  // the subterm, for diagnostics
};

/// Second top-down pass over a derivation: composes each node's eta with the
/// enclosing renaming/eta layers and the final chi, and extracts the
/// instantiated termination-argument sizes at every equivalent-symbol
/// application.
std::vector<CallSite> collect_call_sites(const RewriteSystem& sys,
                                         const Precedence& prec, const std::string& f,
                                         const Derivation& d, const SizeSubst& chi);

/// Lexicographic comparison of call sizes over (strict, weak-with-inf) in
/// the order given by perm (indices into both vectors).
bool call_compare(const std::vector<SizeExpr>& a, const std::vector<SizeExpr>& b,
                  const std::vector<int>& perm);
bool call_compare(const std::vector<SizeExpr>& a, const std::vector<SizeExpr>& b);

struct CheckResult {
  bool ok = false;
  int failed_step = 0;  // 1 inference, 2 target fit, 3 decreasingness
  std::string reason;
  std::optional<AnnType> inferred;   // in the caller's variables
  std::vector<CallSite> sites;       // in the caller's variables
  std::vector<SizeExpr> bound;       // instantiated termination bounds of f
};

/// Three-step decision procedure for the sized judgment: freeze the size
/// variables of env, target and phi into fresh constants, infer a most
/// general type, fit it against the target with an mgs, then validate
/// decreasingness at every equivalent-symbol call site.
CheckResult check(const RewriteSystem& sys, const Precedence& prec,
                  const std::string& f, const AnnEnv& env, const SizeSubst& phi,
                  const Term& t, const AnnType& target, FreshSizes& fresh,
                  const std::vector<int>* lex_perm = nullptr);

/// Re-validates every node of a derivation against its rule (test support):
/// argument renamings are disjoint, eta solves the node's subtyping problem,
/// and the node's result is the declared codomain instantiated by eta.
bool replay(const RewriteSystem& sys, const Derivation& d, std::string* why = nullptr);

}  // namespace hrs

#endif
