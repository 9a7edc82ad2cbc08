#ifndef HRS_SYNTAX_HPP
#define HRS_SYNTAX_HPP

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hrs {

/// Simple types: sorts and right-associated arrows. Immutable value type.
class Type {
 public:
  Type() = default;
  static Type sort(std::string name);
  static Type arrow(Type dom, Type cod);
  static Type arrows(const std::vector<Type>& doms, Type cod);

  bool ok() const { return node_ != nullptr; }
  bool is_sort() const;
  const std::string& sort_name() const;
  const Type& dom() const;
  const Type& cod() const;

  /// arity(B)=0, arity(T->U)=1+arity(U)
  int arity() const;
  /// Argument types T1..Tn and final codomain sort of T1->...->Tn->B.
  std::vector<Type> args() const;
  Type codomain() const;
  /// Codomain after stripping the first n arrows.
  Type codomain_after(int n) const;

  std::string str() const;

  friend bool operator==(const Type& a, const Type& b);
  friend bool operator!=(const Type& a, const Type& b) { return !(a == b); }

 private:
  struct Node;
  explicit Type(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Positions are words over {1,2}: 1 = arrow domain, 2 = arrow codomain.
using Pos = std::vector<int>;

enum class Sign { Pos, Neg };
inline Sign flip(Sign s) { return s == Sign::Pos ? Sign::Neg : Sign::Pos; }

/// Pos^sign(T): the positive/negative positions of a type.
std::set<Pos> signed_positions(const Type& t, Sign sign);
/// Positions of sort b in t.
std::set<Pos> positions_of_sort(const Type& t, const std::string& b);
bool occurs_sort(const Type& t, const std::string& b);
/// Every occurrence of b in t is at a positive position.
bool only_positive(const Type& t, const std::string& b);
/// All sorts occurring in t.
std::set<std::string> sorts_of(const Type& t);

/// Strict well-founded order on sorts, kept transitively closed.
class SortOrder {
 public:
  void add(const std::string& a, const std::string& b);  // a < b
  bool less(const std::string& a, const std::string& b) const;
  bool leq(const std::string& a, const std::string& b) const;
  /// Returns a sort s with s < s if the declared pairs are cyclic.
  std::optional<std::string> find_cycle() const;

 private:
  std::set<std::pair<std::string, std::string>> lt_;
};

/// positive_wrt: every sort of t is <= b and b occurs only positively.
bool positive_wrt(const Type& t, const std::string& b, const SortOrder& order);

/// Applicative lambda-terms over variables, constructors and function
/// symbols. Identity is alpha-equivalence; application associates left.
class Term {
 public:
  enum class Kind { Var, Cons, Fun, Abs, App };

  Term() = default;
  static Term var(std::string name);
  static Term cons(std::string name);
  static Term fun(std::string name);
  static Term abs(std::string bound, Type ty, Term body);
  static Term app(Term f, Term a);
  static Term app(Term head, const std::vector<Term>& args);

  bool ok() const { return node_ != nullptr; }
  Kind kind() const;
  const std::string& name() const;    // Var/Cons/Fun
  const std::string& bound() const;   // Abs
  const Type& bound_type() const;     // Abs
  const Term& body() const;           // Abs
  const Term& fn() const;             // App
  const Term& arg() const;            // App

  bool is_symbol() const;  // Var, Cons or Fun
  /// Head and arguments of the application spine.
  std::pair<Term, std::vector<Term>> spine() const;

  std::string str() const;
  /// Alpha-invariant canonical form (de Bruijn style), usable as a map key.
  std::string alpha_key() const;

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

bool alpha_equal(const Term& a, const Term& b);

std::set<std::string> free_vars(const Term& t);

using TermSubst = std::map<std::string, Term>;

/// Capture-avoiding substitution; bound variables are renamed when needed.
Term substitute(const Term& t, const TermSubst& subst);

/// Declared simple types of constructors and function symbols.
struct SymbolTable {
  std::map<std::string, Type> cons;
  std::map<std::string, Type> funs;

  const Type* lookup(const std::string& name) const;
  bool is_cons(const std::string& name) const { return cons.count(name) > 0; }
  bool is_fun(const std::string& name) const { return funs.count(name) > 0; }
};

using TypeEnv = std::map<std::string, Type>;

/// Plain simple typing per the three rules (symbol, application,
/// abstraction). Returns the unique type or nullopt, with a message in err.
std::optional<Type> type_check(const SymbolTable& sigs, const TypeEnv& env,
                               const Term& t, std::string* err = nullptr);

}  // namespace hrs

#endif
