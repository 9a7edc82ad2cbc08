#ifndef HRS_ANNOT_HPP
#define HRS_ANNOT_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hrs/size.hpp"
#include "hrs/syntax.hpp"

namespace hrs {

/// Size-annotated types: a sort occurrence may carry a size expression.
/// An absent annotation is identified with the annotation inf (B_inf = B),
/// and inf annotations are canonicalized away on construction.
class AnnType {
 public:
  AnnType() = default;
  static AnnType sort(std::string name, std::optional<SizeExpr> ann = {});
  static AnnType arrow(AnnType dom, AnnType cod);
  static AnnType arrows(const std::vector<AnnType>& doms, AnnType cod);
  static AnnType plain(const Type& t);

  bool ok() const { return node_ != nullptr; }
  bool is_sort() const;
  const std::string& sort_name() const;
  const std::optional<SizeExpr>& ann() const;  // sorts only
  /// Annotation with absent read as inf.
  SizeExpr ann_or_inf() const;
  const AnnType& dom() const;
  const AnnType& cod() const;

  int arity() const;
  std::vector<AnnType> args() const;
  AnnType codomain() const;
  AnnType codomain_after(int n) const;

  std::string str() const;
  friend bool operator==(const AnnType& a, const AnnType& b);
  friend bool operator!=(const AnnType& a, const AnnType& b) { return !(a == b); }

 private:
  struct Node;
  explicit AnnType(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// |T|: erase all annotations.
Type strip(const AnnType& t);
/// An(T, B, a): annotate every occurrence of sort B with a.
AnnType annotate(const Type& t, const std::string& b, const SizeExpr& a);
AnnType apply(const AnnType& t, const SizeSubst& phi);
std::set<SizeVar> ann_vars(const AnnType& t);

/// Signed positions extended through annotations: the annotation of a sort
/// is child 1 of the sort occurrence, the successor symbol is monotone in
/// its single argument, heads have no children.
std::set<Pos> ann_signed_positions(const AnnType& t, Sign sign);
/// Positions of size variable v inside t (through annotations).
std::set<Pos> positions_of_size_var(const AnnType& t, const SizeVar& v);
/// Every occurrence of v in t is positive.
bool size_var_only_positive(const AnnType& t, const SizeVar& v);

/// Accessible-argument classification of a constructor type T1->..->Tr->B:
/// a permutation listing recursive accessible arguments first (count p),
/// then the other accessible arguments (up to q), then the rest. An
/// accessible non-recursive argument additionally needs a measured sort
/// occurring only positively in it; arguments without one are demoted.
struct ClassifiedArgs {
  int p = 0;
  int q = 0;
  std::vector<int> perm;  // perm[i] = original argument index (0-based)
};
ClassifiedArgs classify_args(const Type& cons_type, const SortOrder& order);

/// Defaults to the rightmost (codomain-most) admissible measured sort.
std::optional<std::string> default_measured_sort(const Type& arg,
                                                 const std::string& codomain,
                                                 const SortOrder& order);

/// Constructor signature: per accessible argument (permuted order) the
/// annotation variable (inf allowed beyond p) and measured sort, plus the
/// output annotation sigma.
struct ConstructorSig {
  std::string name;
  Type simple;
  ClassifiedArgs cls;
  std::vector<SizeExpr> alpha;       // size q; variables, or inf past p
  std::vector<std::string> measured; // size q; B^c_i
  std::optional<SizeExpr> sigma;     // absent = inf

  /// Annotated type with arguments in the original declared order.
  AnnType annotated() const;
  /// Measured sort of original argument index i (accessible args only).
  std::optional<std::string> measured_of_original(int orig) const;
  std::optional<SizeExpr> alpha_of_original(int orig) const;
  /// Position of original index in the permutation, or -1.
  int permuted_index(int orig) const;
};

/// Canonical signature: recursive arguments share one fresh variable, other
/// accessible arguments get inf, sigma is a fresh variable when p = 0 and
/// s(alpha) otherwise.
ConstructorSig canonical_constructor_signature(const std::string& name,
                                               const Type& ty,
                                               const SortOrder& order,
                                               FreshSizes& fresh);

/// Recover a signature from a user-written annotated type; diagnostics are
/// appended for shape violations (wrong annotation placement etc.).
std::optional<ConstructorSig> constructor_sig_from_annotated(
    const std::string& name, const AnnType& ann, const SortOrder& order,
    std::vector<std::string>& diags);

/// One diagnostic per violated clause of the constructor-annotation
/// definition; empty means valid.
std::vector<std::string> validate_constructor_signature(const ConstructorSig& sig,
                                                        const SortOrder& order);

/// Function signature: the first q argument types are annotated sorts
/// (B_i)_{alpha_i} with pairwise distinct variables, the rest are plain,
/// and Var(sigma) is among the alpha_i.
struct FunctionSig {
  std::string name;
  Type simple;
  int q = 0;
  std::vector<SizeVar> alpha;
  std::optional<SizeExpr> sigma;  // absent = inf

  AnnType annotated() const;
};

std::optional<FunctionSig> function_sig_from_annotated(
    const std::string& name, const AnnType& ann, int q,
    std::vector<std::string>& diags);

std::vector<std::string> validate_function_signature(const FunctionSig& sig);

}  // namespace hrs

#endif
