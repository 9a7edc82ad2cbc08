#ifndef HRS_PARSER_HPP
#define HRS_PARSER_HPP

#include <optional>
#include <string>
#include <vector>

#include "hrs/solver.hpp"
#include "hrs/system.hpp"

namespace hrs {

struct ParseError {
  int line = 0, col = 0;
  std::string message;
  std::string str() const {
    return std::to_string(line) + ":" + std::to_string(col) + ": " + message;
  }
};

/// Result of parsing a system file. `unsupported` lists size-annotation
/// constructs outside the successor algebra (plus, times, numerals, max);
/// such files parse but cannot be checked.
struct ParsedSystem {
  RewriteSystem system;
  std::vector<ParseError> errors;
  std::vector<std::string> unsupported;
  bool ok() const { return errors.empty(); }
};

/// Grammar:
///   decl  := "sort" ID | "order" ID "<" ID | "cons" ID ":" atype ["canonical"]
///          | "fun" ID ":" atype ["{" "args" "=" NUM "}"]
///          | "prec" ID ("<"|"~") ID | "rule" term "->" term
///   atype := aatom ("->" atype)?
///   aatom := ID ("(" size ")")? | "(" atype ")"
///   size  := additive in the extended syntax; successor-algebra sizes are
///           "inf" | "s" size | ID | "#" ID
///   term  := "\" ID ":" stype "." term | atom+
///   atom  := ID | "(" term ")"
/// Comments run from "//" to the end of the line.
ParsedSystem parse_system(const std::string& text, const std::string& name = "system");

/// Term in the context of a parsed system: declared names resolve to their
/// symbol kind, everything else is a variable.
std::optional<Term> parse_term(const std::string& text, const RewriteSystem& sys,
                               std::string* err = nullptr);

/// Constraint file: one "a <= b" per line.
std::optional<SizeProblem> parse_constraints(const std::string& text,
                                             std::string* err = nullptr);

/// Inverse of parse_system, up to layout.
std::string print_system(const RewriteSystem& sys);

}  // namespace hrs

#endif
