#include "hrs/parser.hpp"

#include <cctype>
#include <sstream>

namespace hrs {

namespace {

struct Token {
  enum class K { Id, Num, Punct, End };
  K k;
  std::string text;
  int line, col;
};

struct Lexer {
  std::vector<Token> toks;
  std::string error;

  static bool idstart(char c) { return std::isalpha((unsigned char)c) || c == '_'; }
  static bool idchar(char c) {
    return std::isalnum((unsigned char)c) || c == '_' || c == '\'';
  }

  bool run(const std::string& text) {
    int line = 1, col = 1;
    size_t i = 0;
    auto push = [&](Token::K k, std::string t, int l, int c) {
      toks.push_back({k, std::move(t), l, c});
    };
    while (i < text.size()) {
      char c = text[i];
      if (c == '\n') {
        ++line;
        col = 1;
        ++i;
        continue;
      }
      if (std::isspace((unsigned char)c)) {
        ++i;
        ++col;
        continue;
      }
      if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
        while (i < text.size() && text[i] != '\n') ++i;
        continue;
      }
      int l = line, cl = col;
      if (idstart(c)) {
        size_t j = i;
        while (j < text.size() && idchar(text[j])) ++j;
        push(Token::K::Id, text.substr(i, j - i), l, cl);
        col += (int)(j - i);
        i = j;
        continue;
      }
      if (std::isdigit((unsigned char)c)) {
        size_t j = i;
        while (j < text.size() && std::isdigit((unsigned char)text[j])) ++j;
        push(Token::K::Num, text.substr(i, j - i), l, cl);
        col += (int)(j - i);
        i = j;
        continue;
      }
      if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
        push(Token::K::Punct, "->", l, cl);
        i += 2;
        col += 2;
        continue;
      }
      if (c == '<' && i + 1 < text.size() && text[i + 1] == '=') {
        push(Token::K::Punct, "<=", l, cl);
        i += 2;
        col += 2;
        continue;
      }
      std::string single(1, c);
      if (std::string("()<{}=~:.\\#+*").find(c) != std::string::npos) {
        push(Token::K::Punct, single, l, cl);
        ++i;
        ++col;
        continue;
      }
      error = std::to_string(l) + ":" + std::to_string(cl) + ": unexpected character '" +
              single + "'";
      return false;
    }
    toks.push_back({Token::K::End, "", line, col});
    return true;
  }
};

struct Parser {
  const std::vector<Token>& toks;
  size_t pos = 0;
  std::vector<ParseError>* errors;
  std::vector<std::string>* unsupported;

  const Token& cur() const { return toks[pos]; }
  bool at_end() const { return cur().k == Token::K::End; }
  bool is_id(const char* s) const {
    return cur().k == Token::K::Id && cur().text == s;
  }
  bool is_punct(const char* s) const {
    return cur().k == Token::K::Punct && cur().text == s;
  }
  void advance() {
    if (!at_end()) ++pos;
  }
  void err(const std::string& m) {
    if (errors) errors->push_back({cur().line, cur().col, m});
  }
  bool expect_punct(const char* s) {
    if (is_punct(s)) {
      advance();
      return true;
    }
    err(std::string("expected '") + s + "', found '" + cur().text + "'");
    return false;
  }
  std::optional<std::string> expect_id(const char* what) {
    if (cur().k == Token::K::Id) {
      std::string t = cur().text;
      advance();
      return t;
    }
    err(std::string("expected ") + what + ", found '" + cur().text + "'");
    return std::nullopt;
  }

  void note_unsupported(const std::string& what) {
    if (unsupported) unsupported->push_back(what);
  }

  // --- sizes (extended syntax; non-successor constructs are flagged) ---

  std::optional<SizeExpr> size_atom(bool& pure) {
    if (is_id("inf")) {
      advance();
      return SizeExpr::inf();
    }
    if (is_id("s")) {
      advance();
      auto a = size_atom(pure);
      if (!a) return std::nullopt;
      return SizeExpr::succ(*a);
    }
    if (is_punct("#")) {
      advance();
      auto n = expect_id("a constant name after '#'");
      if (!n) return std::nullopt;
      return SizeExpr::constant(*n);
    }
    if (cur().k == Token::K::Id) {
      std::string n = cur().text;
      advance();
      return SizeExpr::var(n);
    }
    if (cur().k == Token::K::Num) {
      pure = false;
      note_unsupported("numeral " + cur().text + " in a size annotation");
      advance();
      return SizeExpr::inf();
    }
    if (is_punct("(")) {
      advance();
      auto e = size_expr(pure);
      expect_punct(")");
      return e;
    }
    err("expected a size expression, found '" + cur().text + "'");
    return std::nullopt;
  }

  bool size_atom_start() const {
    return cur().k == Token::K::Id || cur().k == Token::K::Num || is_punct("#") ||
           is_punct("(");
  }

  std::optional<SizeExpr> size_factor(bool& pure) {
    auto a = size_atom(pure);
    if (!a) return std::nullopt;
    while (size_atom_start() || is_punct("*")) {
      if (is_punct("*")) advance();
      pure = false;
      note_unsupported("product in a size annotation");
      if (!size_atom(pure)) return std::nullopt;
    }
    return a;
  }

  std::optional<SizeExpr> size_expr(bool& pure) {
    auto a = size_factor(pure);
    if (!a) return std::nullopt;
    while (is_punct("+")) {
      advance();
      pure = false;
      note_unsupported("'+' in a size annotation");
      if (!size_factor(pure)) return std::nullopt;
    }
    return pure ? a : std::optional<SizeExpr>(SizeExpr::inf());
  }

  // --- types ---

  std::optional<AnnType> atype() {
    auto a = aatom();
    if (!a) return std::nullopt;
    if (is_punct("->")) {
      advance();
      auto b = atype();
      if (!b) return std::nullopt;
      return AnnType::arrow(*a, *b);
    }
    return a;
  }

  std::optional<AnnType> aatom() {
    if (is_punct("(")) {
      advance();
      auto t = atype();
      expect_punct(")");
      return t;
    }
    auto n = expect_id("a sort name");
    if (!n) return std::nullopt;
    if (is_punct("(")) {
      advance();
      bool pure = true;
      auto e = size_expr(pure);
      expect_punct(")");
      if (!e) return std::nullopt;
      return AnnType::sort(*n, *e);
    }
    return AnnType::sort(*n);
  }

  std::optional<Type> stype() {
    auto t = atype();
    if (!t) return std::nullopt;
    return strip(*t);
  }

  // --- terms ---

  // "cons" and "fun" are ordinary identifiers inside terms; they open a
  // declaration only when followed by a name and a colon.
  bool decl_start() const {
    if (cur().k != Token::K::Id) return false;
    const std::string& s = cur().text;
    if (s == "sort" || s == "order" || s == "prec" || s == "rule") return true;
    if (s == "cons" || s == "fun")
      return pos + 2 < toks.size() && toks[pos + 1].k == Token::K::Id &&
             toks[pos + 2].k == Token::K::Punct && toks[pos + 2].text == ":";
    return false;
  }

  static bool keyword(const std::string& s) {
    return s == "sort" || s == "order" || s == "prec" || s == "rule" ||
           s == "canonical";
  }

  std::optional<Term> term(const RewriteSystem& sys) {
    if (is_punct("\\")) {
      advance();
      auto x = expect_id("a variable name");
      if (!x) return std::nullopt;
      if (!expect_punct(":")) return std::nullopt;
      auto ty = stype();
      if (!ty) return std::nullopt;
      if (!expect_punct(".")) return std::nullopt;
      auto body = term(sys);
      if (!body) return std::nullopt;
      return Term::abs(*x, *ty, *body);
    }
    std::optional<Term> acc;
    while (true) {
      std::optional<Term> atom;
      if (is_punct("(")) {
        advance();
        atom = term(sys);
        expect_punct(")");
      } else if (cur().k == Token::K::Id && !keyword(cur().text) && !decl_start()) {
        std::string n = cur().text;
        advance();
        if (sys.cons.count(n))
          atom = Term::cons(n);
        else if (sys.funs.count(n))
          atom = Term::fun(n);
        else
          atom = Term::var(n);
      } else {
        break;
      }
      if (!atom) return std::nullopt;
      acc = acc ? Term::app(*acc, *atom) : *atom;
    }
    if (!acc) err("expected a term, found '" + cur().text + "'");
    return acc;
  }
};

void rename_canonical_var(ConstructorSig& sig) {
  // canonical signatures use one fresh variable; give it the printable,
  // signature-local name "a"
  SizeVar from;
  bool found = false;
  for (const auto& a : sig.alpha)
    if (const SizeVar* v = a.var_head()) {
      from = *v;
      found = true;
    }
  if (!found && sig.sigma && sig.sigma->var_head()) {
    from = *sig.sigma->var_head();
    found = true;
  }
  if (!found) return;
  SizeSubst ren{{from, SizeExpr::var("a")}};
  for (auto& a : sig.alpha) a = apply(a, ren);
  if (sig.sigma) sig.sigma = apply(*sig.sigma, ren);
}

}  // namespace

ParsedSystem parse_system(const std::string& text, const std::string& name) {
  ParsedSystem out;
  out.system.name = name;
  Lexer lex;
  if (!lex.run(text)) {
    out.errors.push_back({0, 0, lex.error});
    return out;
  }
  Parser p{lex.toks, 0, &out.errors, &out.unsupported};
  RewriteSystem& sys = out.system;
  FreshSizes fresh;

  struct PendingRule {
    size_t start;
  };
  std::vector<PendingRule> pending;

  auto skip_to_decl = [&]() {
    while (!p.at_end() && !p.decl_start()) p.advance();
  };

  while (!p.at_end()) {
    if (!p.decl_start()) {
      p.err("expected a declaration, found '" + p.cur().text + "'");
      p.advance();
      skip_to_decl();
      continue;
    }
    if (p.is_id("sort")) {
      p.advance();
      if (auto n = p.expect_id("a sort name")) sys.sorts.push_back(*n);
      continue;
    }
    if (p.is_id("order")) {
      p.advance();
      auto a = p.expect_id("a sort name");
      if (!a || !p.expect_punct("<")) {
        skip_to_decl();
        continue;
      }
      auto b = p.expect_id("a sort name");
      if (b) sys.order.add(*a, *b);
      continue;
    }
    if (p.is_id("cons")) {
      p.advance();
      auto n = p.expect_id("a constructor name");
      if (!n || !p.expect_punct(":")) {
        skip_to_decl();
        continue;
      }
      auto ty = p.atype();
      if (!ty) {
        skip_to_decl();
        continue;
      }
      bool canonical = false;
      if (p.is_id("canonical")) {
        canonical = true;
        p.advance();
      }
      if (sys.cons.count(*n) || sys.funs.count(*n)) {
        out.errors.push_back({p.cur().line, p.cur().col, "duplicate declaration of " + *n});
        continue;
      }
      if (canonical) {
        auto sig = canonical_constructor_signature(*n, strip(*ty), sys.order, fresh);
        rename_canonical_var(sig);
        sys.cons[*n] = std::move(sig);
      } else {
        std::vector<std::string> diags;
        auto sig = constructor_sig_from_annotated(*n, *ty, sys.order, diags);
        for (const auto& d : diags)
          out.errors.push_back({p.cur().line, p.cur().col, d});
        if (sig) sys.cons[*n] = std::move(*sig);
      }
      continue;
    }
    if (p.is_id("fun")) {
      p.advance();
      auto n = p.expect_id("a function name");
      if (!n || !p.expect_punct(":")) {
        skip_to_decl();
        continue;
      }
      auto ty = p.atype();
      if (!ty) {
        skip_to_decl();
        continue;
      }
      std::optional<int> q;
      if (p.is_punct("{")) {
        p.advance();
        if (p.is_id("args")) {
          p.advance();
          p.expect_punct("=");
          if (p.cur().k == Token::K::Num) {
            q = std::stoi(p.cur().text);
            p.advance();
          } else {
            p.err("expected a number after args =");
          }
        } else {
          p.err("expected 'args' in function options");
        }
        p.expect_punct("}");
      }
      if (!q) {
        // default: the leading annotated sort arguments
        int k = 0;
        for (const auto& a : ty->args()) {
          if (a.is_sort() && a.ann())
            ++k;
          else
            break;
        }
        q = k;
      }
      if (sys.cons.count(*n) || sys.funs.count(*n)) {
        out.errors.push_back({p.cur().line, p.cur().col, "duplicate declaration of " + *n});
        continue;
      }
      std::vector<std::string> diags;
      auto sig = function_sig_from_annotated(*n, *ty, *q, diags);
      for (const auto& d : diags) out.errors.push_back({p.cur().line, p.cur().col, d});
      if (sig) sys.funs[*n] = std::move(*sig);
      continue;
    }
    if (p.is_id("prec")) {
      p.advance();
      auto a = p.expect_id("a function name");
      if (!a) {
        skip_to_decl();
        continue;
      }
      bool lt = p.is_punct("<");
      bool eq = p.is_punct("~");
      if (!lt && !eq) {
        p.err("expected '<' or '~' in a prec declaration");
        skip_to_decl();
        continue;
      }
      p.advance();
      auto b = p.expect_id("a function name");
      if (!b) continue;
      if (lt)
        sys.prec_lt.push_back({*a, *b});
      else
        sys.prec_eq.push_back({*a, *b});
      continue;
    }
    if (p.is_id("rule")) {
      // parse rules after all declarations are known
      pending.push_back({p.pos});
      p.advance();
      skip_to_decl();
      continue;
    }
  }

  std::map<std::string, int> per_head;
  for (const auto& pr : pending) {
    Parser rp{lex.toks, pr.start, &out.errors, &out.unsupported};
    rp.advance();  // "rule"
    auto lhs = rp.term(sys);
    if (!lhs || !rp.expect_punct("->")) continue;
    auto rhs = rp.term(sys);
    if (!rhs) continue;
    auto [h, args] = lhs->spine();
    if (h.kind() != Term::Kind::Fun) {
      out.errors.push_back({lex.toks[pr.start].line, lex.toks[pr.start].col,
                            "rule left-hand side must be headed by a function symbol"});
      continue;
    }
    Rule r;
    r.head = h.name();
    r.name = r.head + "#" + std::to_string(++per_head[r.head]);
    r.lhs = *lhs;
    r.rhs = *rhs;
    r.args = args;
    sys.rules.push_back(std::move(r));
  }
  return out;
}

std::optional<Term> parse_term(const std::string& text, const RewriteSystem& sys,
                               std::string* err) {
  Lexer lex;
  if (!lex.run(text)) {
    if (err) *err = lex.error;
    return std::nullopt;
  }
  std::vector<ParseError> errors;
  Parser p{lex.toks, 0, &errors, nullptr};
  auto t = p.term(sys);
  if (!p.at_end() && errors.empty())
    errors.push_back({p.cur().line, p.cur().col, "trailing input '" + p.cur().text + "'"});
  if (!errors.empty()) {
    if (err) *err = errors.front().str();
    return std::nullopt;
  }
  return t;
}

std::optional<SizeProblem> parse_constraints(const std::string& text, std::string* err) {
  SizeProblem out;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    Lexer lex;
    if (!lex.run(line)) {
      if (err) *err = std::to_string(lineno) + ": " + lex.error;
      return std::nullopt;
    }
    if (lex.toks.size() <= 1) continue;  // blank or comment-only line
    std::vector<ParseError> errors;
    std::vector<std::string> unsupported;
    Parser p{lex.toks, 0, &errors, &unsupported};
    bool pure = true;
    auto a = p.size_expr(pure);
    std::optional<SizeExpr> b;
    if (a && p.expect_punct("<=")) b = p.size_expr(pure);
    if (b && !p.at_end())
      errors.push_back({1, p.cur().col, "trailing input '" + p.cur().text + "'"});
    if (b && !pure)
      errors.push_back(
          {1, 1, "only successor-algebra sizes are allowed in constraint files"});
    if (!errors.empty() || !a || !b) {
      if (err)
        *err = std::to_string(lineno) + ":" +
               (errors.empty() ? "parse error" : errors.front().message);
      return std::nullopt;
    }
    out.cs.push_back({*a, *b});
  }
  return out;
}

std::string print_system(const RewriteSystem& sys) {
  std::ostringstream os;
  for (const auto& s : sys.sorts) os << "sort " << s << "\n";
  // minimal generating pairs are not tracked; print the full closure
  for (const auto& a : sys.sorts)
    for (const auto& b : sys.sorts)
      if (sys.order.less(a, b)) os << "order " << a << " < " << b << "\n";
  for (const auto& [n, c] : sys.cons)
    os << "cons " << n << " : " << c.annotated().str() << "\n";
  for (const auto& [n, f] : sys.funs)
    os << "fun " << n << " : " << f.annotated().str() << " { args = " << f.q << " }\n";
  for (const auto& [a, b] : sys.prec_lt) os << "prec " << a << " < " << b << "\n";
  for (const auto& [a, b] : sys.prec_eq) os << "prec " << a << " ~ " << b << "\n";
  for (const auto& r : sys.rules)
    os << "rule " << r.lhs.str() << " -> " << r.rhs.str() << "\n";
  return os.str();
}

}  // namespace hrs
