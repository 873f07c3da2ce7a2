#include <cctype>
#include <cstring>
#include <functional>

#include "slp/program.hpp"

namespace slp {

namespace {

// --------------------------------------------------------------------------
// Lexer
// --------------------------------------------------------------------------

enum class Tok : uint8_t { Ident, Int, Sym, Eof };

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  long long num = 0;
  SourcePos pos;
};

struct Lexer {
  const std::string& src;
  size_t i = 0;
  int line = 1, col = 1;
  std::vector<ParseError>* errs;

  explicit Lexer(const std::string& s, std::vector<ParseError>* e) : src(s), errs(e) {}

  void advance(size_t n = 1) {
    for (size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  }

  bool starts_with(const char* s) const {
    size_t n = strlen(s);
    return src.compare(i, n, s) == 0;
  }

  std::vector<Token> run() {
    std::vector<Token> out;
    while (i < src.size()) {
      char c = src[i];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
        continue;
      }
      if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
        while (i < src.size() && src[i] != '\n') advance();
        continue;
      }
      SourcePos pos{line, col};
      if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
        // `_|_` starts with '_' as well; try the symbol first.
        if (starts_with("_|_")) {
          out.push_back({Tok::Sym, "_|_", 0, pos});
          advance(3);
          continue;
        }
        size_t j = i;
        while (j < src.size() &&
               (isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
          ++j;
        out.push_back({Tok::Ident, src.substr(i, j - i), 0, pos});
        advance(j - i);
        continue;
      }
      if (isdigit(static_cast<unsigned char>(c))) {
        size_t j = i;
        while (j < src.size() && isdigit(static_cast<unsigned char>(src[j]))) ++j;
        Token t{Tok::Int, src.substr(i, j - i), 0, pos};
        t.num = std::stoll(t.text);
        out.push_back(t);
        advance(j - i);
        continue;
      }
      static const char* multi[] = {"|->", "|-", "=>", "==", "!=", "&&", "\\/", nullptr};
      bool matched = false;
      for (int k = 0; multi[k]; ++k) {
        if (starts_with(multi[k])) {
          out.push_back({Tok::Sym, multi[k], 0, pos});
          advance(strlen(multi[k]));
          matched = true;
          break;
        }
      }
      if (matched) continue;
      static const std::string singles = "()[]{},;.=*^@+-/";
      if (singles.find(c) != std::string::npos) {
        out.push_back({Tok::Sym, std::string(1, c), 0, pos});
        advance();
        continue;
      }
      if (errs)
        errs->push_back({pos, std::string("unexpected character '") + c + "'"});
      advance();
    }
    out.push_back({Tok::Eof, "", 0, SourcePos{line, col}});
    return out;
  }
};

bool is_reserved(const std::string& s) {
  static const std::set<std::string> kw = {
      "emp",  "true",   "nil",        "exists", "record", "predicates", "function",
      "entail", "req",  "ens",        "skip",   "free",   "malloc",     "fork",
      "join", "par",    "if",         "else",   "local",  "o",          "ow",
      "atomic"};
  return kw.count(s) > 0;
}

// --------------------------------------------------------------------------
// Parser
// --------------------------------------------------------------------------

enum class NameUse : uint8_t { Value, PermVar, Label };

enum class FormulaMode : uint8_t { Spec, Entail, Standalone };

struct Parser {
  std::vector<Token> toks;
  size_t pos = 0;
  std::vector<ParseError> errs;
  SourceFile file;

  // Variable-kind bookkeeping. Program variables come from scopes; label and
  // permission variables are recognized by position and remembered per file.
  std::map<std::string, NameUse> uses;
  std::set<std::string> program_scope;
  FormulaMode mode = FormulaMode::Standalone;
  std::set<std::string> bound_here;  // existentials of the formula being parsed

  const Token& cur() const { return toks[pos]; }
  const Token& peek(size_t n = 1) const { return toks[std::min(pos + n, toks.size() - 1)]; }

  bool sym(const char* s) const { return cur().kind == Tok::Sym && cur().text == s; }
  bool ident(const char* s) const { return cur().kind == Tok::Ident && cur().text == s; }

  bool eat_sym(const char* s) {
    if (!sym(s)) return false;
    ++pos;
    return true;
  }
  bool eat_ident(const char* s) {
    if (!ident(s)) return false;
    ++pos;
    return true;
  }

  void error(const std::string& msg) { errs.push_back({cur().pos, msg}); }

  void expect_sym(const char* s) {
    if (!eat_sym(s)) error(std::string("expected '") + s + "', found '" + cur().text + "'");
  }

  std::string expect_name(const char* what) {
    if (cur().kind != Tok::Ident || is_reserved(cur().text)) {
      error(std::string("expected ") + what);
      return "_err";
    }
    std::string n = cur().text;
    ++pos;
    return n;
  }

  // Weak-star / perm operators spelled as three tokens: ( + ) and ( x ).
  bool at_triple(const char* mid) const {
    return sym("(") && peek(1).kind == (mid[0] == '+' ? Tok::Sym : Tok::Ident) &&
           peek(1).text == mid && peek(2).kind == Tok::Sym && peek(2).text == ")";
  }
  bool eat_triple(const char* mid) {
    if (!at_triple(mid)) return false;
    pos += 3;
    return true;
  }

  // ---- variable kinds -----------------------------------------------------

  void register_use(const std::string& n, NameUse u) {
    auto it = uses.find(n);
    if (it == uses.end()) {
      uses[n] = u;
      return;
    }
    if (it->second != u) {
      // Value/PermVar confusion is resolvable only by position; report it.
      error("'" + n + "' used both as " + kind_str(it->second) + " and " + kind_str(u));
    }
  }

  static const char* kind_str(NameUse u) {
    switch (u) {
      case NameUse::Value: return "a value variable";
      case NameUse::PermVar: return "a permission variable";
      case NameUse::Label: return "a label variable";
    }
    return "?";
  }

  VarId value_var(const std::string& n) {
    if (n == "nil") return nil_var();
    if (program_scope.count(n)) return pvar(n);
    register_use(n, NameUse::Value);
    if (mode == FormulaMode::Spec) return lvar(n);
    return pvar(n);
  }

  VarId label_var(const std::string& n) {
    if (program_scope.count(n)) {
      error("program variable '" + n + "' used as a heap label");
      return labvar(n);
    }
    register_use(n, NameUse::Label);
    return labvar(n);
  }

  VarId perm_var(const std::string& n) {
    if (program_scope.count(n)) {
      error("program variable '" + n + "' used as a permission");
      return lvar(n);
    }
    register_use(n, NameUse::PermVar);
    return lvar(n);
  }

  // ---- terms ---------------------------------------------------------------

  ArithTerm parse_arith() {
    ArithTerm t = parse_arith_atom();
    while (sym("+") || sym("-")) {
      bool minus = sym("-");
      ++pos;
      ArithTerm r = parse_arith_atom();
      if (minus) {
        if (r.kind == ArithTerm::Kind::Const) {
          r.num = -r.num;
        } else {
          error("subtraction is only supported with an integer literal");
        }
      }
      t = ArithTerm::add(std::move(t), std::move(r));
    }
    return t;
  }

  ArithTerm parse_arith_atom() {
    if (cur().kind == Tok::Int) {
      long long v = cur().num;
      ++pos;
      return ArithTerm::mk_const(v);
    }
    if (sym("-") && peek().kind == Tok::Int) {
      ++pos;
      long long v = cur().num;
      ++pos;
      return ArithTerm::mk_const(-v);
    }
    if (cur().kind == Tok::Ident && !is_reserved(cur().text)) {
      std::string n = cur().text;
      ++pos;
      return ArithTerm::mk_var(value_var(n));
    }
    if (eat_ident("nil")) return ArithTerm::mk_var(nil_var());
    if (eat_sym("(")) {
      ArithTerm t = parse_arith();
      expect_sym(")");
      return t;
    }
    error("expected a value term");
    ++pos;
    return ArithTerm::mk_const(0);
  }

  PermTerm parse_perm() {
    PermTerm t = parse_perm_factor();
    for (;;) {
      if (at_triple("+")) {
        pos += 3;
        t = PermTerm::add(std::move(t), parse_perm_factor());
      } else if (at_triple("x")) {
        pos += 3;
        t = PermTerm::mul(std::move(t), parse_perm_factor());
      } else {
        break;
      }
    }
    return t;
  }

  PermTerm parse_perm_factor() {
    if (cur().kind == Tok::Int) {
      long long n = cur().num;
      ++pos;
      if (eat_sym("/")) {
        if (cur().kind != Tok::Int) {
          error("expected a denominator");
          return PermTerm::top();
        }
        long long d = cur().num;
        ++pos;
        Rat r(n, d);
        if (r <= 0 || r > 1) {
          error("permission constant must lie in (0,1]");
          return PermTerm::top();
        }
        return PermTerm::mk_const(r);
      }
      if (n != 1) error("integer permission constant must be 1");
      return PermTerm::top();
    }
    if (cur().kind == Tok::Ident && !is_reserved(cur().text)) {
      std::string n = cur().text;
      ++pos;
      return PermTerm::mk_var(perm_var(n));
    }
    if (eat_sym("(")) {
      PermTerm t = parse_perm();
      expect_sym(")");
      return t;
    }
    error("expected a permission term");
    ++pos;
    return PermTerm::top();
  }

  LabelTerm parse_label() {
    LabelTerm t = parse_label_scaled();
    while (ident("o") || ident("ow")) {
      bool strong = cur().text == "o";
      ++pos;
      LabelTerm r = parse_label_scaled();
      t = strong ? LabelTerm::strong(std::move(t), std::move(r))
                 : LabelTerm::weak(std::move(t), std::move(r));
    }
    return t;
  }

  LabelTerm parse_label_scaled() {
    LabelTerm t = parse_label_atom();
    while (sym("^")) {
      ++pos;
      t = LabelTerm::scaled(std::move(t), parse_perm_factor());
    }
    return t;
  }

  LabelTerm parse_label_atom() {
    if (cur().kind == Tok::Ident && !is_reserved(cur().text)) {
      std::string n = cur().text;
      ++pos;
      return LabelTerm::mk_var(label_var(n));
    }
    if (eat_sym("(")) {
      LabelTerm t = parse_label();
      expect_sym(")");
      return t;
    }
    error("expected a label term");
    ++pos;
    return LabelTerm::mk_var(labvar("_err"));
  }

  // ---- pure atoms ------------------------------------------------------------

  // A pure operand is classified by the operators it contains; a bare name is
  // resolved against the uses recorded so far (spatial parts come first).
  struct Operand {
    enum class K { Arith, Perm, Label, Bare } k = K::Arith;
    ArithTerm a;
    PermTerm p;
    LabelTerm l;
    std::string bare;
    SourcePos pos;
  };

  Operand parse_pure_operand() {
    Operand out;
    out.pos = cur().pos;
    // Bare name not followed by an operator that pins the theory?
    if (cur().kind == Tok::Ident && !is_reserved(cur().text)) {
      const Token& nxt = peek();
      bool label_follow = (nxt.kind == Tok::Ident && (nxt.text == "o" || nxt.text == "ow")) ||
                          (nxt.kind == Tok::Sym && nxt.text == "^");
      bool arith_follow = nxt.kind == Tok::Sym && (nxt.text == "+" || nxt.text == "-");
      bool perm_follow = false;
      if (nxt.kind == Tok::Sym && nxt.text == "(") {
        perm_follow = (peek(2).kind == Tok::Sym && peek(2).text == "+" &&
                       peek(3).kind == Tok::Sym && peek(3).text == ")") ||
                      (peek(2).kind == Tok::Ident && peek(2).text == "x" &&
                       peek(3).kind == Tok::Sym && peek(3).text == ")");
      }
      if (label_follow) {
        // o/ow/^ pin the operand to the label theory (permission terms have
        // no postfix operators).
        out.k = Operand::K::Label;
        out.l = parse_label();
        return out;
      }
      if (perm_follow) {
        out.k = Operand::K::Perm;
        out.p = parse_perm();
        return out;
      }
      if (arith_follow) {
        out.k = Operand::K::Arith;
        out.a = parse_arith();
        return out;
      }
      // Bare single name: defer classification.
      out.k = Operand::K::Bare;
      out.bare = cur().text;
      ++pos;
      return out;
    }
    if (cur().kind == Tok::Int) {
      // Could be an integer or a rational permission constant.
      if (peek().kind == Tok::Sym && peek().text == "/") {
        out.k = Operand::K::Perm;
        out.p = parse_perm();
        return out;
      }
      long long first = cur().num;
      ++pos;
      if (sym("+") || sym("-")) {
        --pos;
        out.k = Operand::K::Arith;
        out.a = parse_arith();
        return out;
      }
      if (at_triple("+") || at_triple("x")) {
        if (first != 1) error("integer permission constant must be 1");
        PermTerm t = PermTerm::top();
        while (at_triple("+") || at_triple("x")) {
          bool add = at_triple("+");
          pos += 3;
          PermTerm r = parse_perm_factor();
          t = add ? PermTerm::add(std::move(t), std::move(r))
                  : PermTerm::mul(std::move(t), std::move(r));
        }
        out.k = Operand::K::Perm;
        out.p = std::move(t);
        return out;
      }
      out.k = Operand::K::Arith;
      out.a = ArithTerm::mk_const(first);
      return out;
    }
    if (eat_ident("nil")) {
      out.k = Operand::K::Arith;
      out.a = ArithTerm::mk_var(nil_var());
      return out;
    }
    if (sym("(")) {
      // Parenthesized group: decide label vs permission by the operators
      // inside the parentheses (labels are the common case, used under _|_).
      size_t j = pos + 1;
      int depth = 1;
      bool perm = false, label = false;
      while (j < toks.size() && depth > 0) {
        const Token& t = toks[j];
        if (t.kind == Tok::Sym && t.text == "(") ++depth;
        if (t.kind == Tok::Sym && t.text == ")") --depth;
        if (t.kind == Tok::Sym && (t.text == "/" || t.text == "+")) perm = true;
        if (t.kind == Tok::Ident && (t.text == "o" || t.text == "ow")) label = true;
        if (t.kind == Tok::Sym && t.text == "^") label = true;
        ++j;
      }
      if (label) perm = false;
      if (perm) {
        out.k = Operand::K::Perm;
        out.p = parse_perm();
      } else {
        out.k = Operand::K::Label;
        out.l = parse_label();
      }
      return out;
    }
    if (sym("-") && peek().kind == Tok::Int) {
      out.k = Operand::K::Arith;
      out.a = parse_arith();
      return out;
    }
    error("expected a pure term");
    ++pos;
    out.k = Operand::K::Arith;
    out.a = ArithTerm::mk_const(0);
    return out;
  }

  ArithTerm operand_as_arith(Operand& o) {
    switch (o.k) {
      case Operand::K::Arith: return o.a;
      case Operand::K::Bare: return ArithTerm::mk_var(value_var(o.bare));
      default:
        errs.push_back({o.pos, "expected a value term"});
        return ArithTerm::mk_const(0);
    }
  }
  PermTerm operand_as_perm(Operand& o) {
    switch (o.k) {
      case Operand::K::Perm: return o.p;
      case Operand::K::Bare: return PermTerm::mk_var(perm_var(o.bare));
      case Operand::K::Arith:
        if (o.a.kind == ArithTerm::Kind::Const && o.a.num == 1) return PermTerm::top();
        [[fallthrough]];
      default:
        errs.push_back({o.pos, "expected a permission term"});
        return PermTerm::top();
    }
  }
  LabelTerm operand_as_label(Operand& o) {
    switch (o.k) {
      case Operand::K::Label: return o.l;
      case Operand::K::Bare: return LabelTerm::mk_var(label_var(o.bare));
      default:
        errs.push_back({o.pos, "expected a label term"});
        return LabelTerm::mk_var(labvar("_err"));
    }
  }

  NameUse bare_use(const std::string& n) {
    auto it = uses.find(n);
    return it == uses.end() ? NameUse::Value : it->second;
  }

  std::optional<PureAtom> parse_pure_atom() {
    if (eat_ident("true")) return std::nullopt;  // `true` adds nothing
    Operand a = parse_pure_operand();
    if (eat_sym("_|_")) {
      Operand b = parse_pure_operand();
      return mk_disjoint(operand_as_label(a), operand_as_label(b));
    }
    bool neq = false;
    if (eat_sym("!=")) {
      neq = true;
    } else if (!eat_sym("=") && !eat_sym("==")) {
      error("expected '=', '!=' or '_|_' in a pure constraint");
      return std::nullopt;
    }
    Operand b = parse_pure_operand();
    if (neq) return mk_neq(operand_as_arith(a), operand_as_arith(b));

    auto cls = [&](const Operand& o) {
      if (o.k == Operand::K::Bare) {
        switch (bare_use(o.bare)) {
          case NameUse::Label: return Operand::K::Label;
          case NameUse::PermVar: return Operand::K::Perm;
          case NameUse::Value: return Operand::K::Arith;
        }
      }
      return o.k;
    };
    Operand::K ka = cls(a), kb = cls(b);
    Operand::K k = Operand::K::Arith;
    if (ka == Operand::K::Label || kb == Operand::K::Label)
      k = Operand::K::Label;
    else if (ka == Operand::K::Perm || kb == Operand::K::Perm)
      k = Operand::K::Perm;
    if (k == Operand::K::Label) return mk_label_eq(operand_as_label(a), operand_as_label(b));
    if (k == Operand::K::Perm) return mk_perm_eq(operand_as_perm(a), operand_as_perm(b));
    return mk_eq(operand_as_arith(a), operand_as_arith(b));
  }

  // ---- spatial formulas ------------------------------------------------------

  Spatial parse_spatial() {
    Spatial first = parse_spatial_unit();
    bool strong = false, weak = false;
    std::vector<Spatial> kids;
    kids.push_back(std::move(first));
    for (;;) {
      if (sym("*")) {
        ++pos;
        strong = true;
      } else if (at_triple("+")) {
        pos += 3;
        weak = true;
      } else {
        break;
      }
      if (strong && weak) {
        error("mixing '*' and '(+)' needs parentheses");
        weak = strong = true;  // keep parsing; error already recorded
      }
      kids.push_back(parse_spatial_unit());
    }
    if (kids.size() == 1) return std::move(kids.front());
    return weak && !strong ? Spatial::wstar(std::move(kids)) : Spatial::star(std::move(kids));
  }

  Spatial parse_spatial_unit() {
    Spatial s = parse_spatial_prefix();
    while (sym("^")) {
      ++pos;
      s = Spatial::scaled(std::move(s), parse_perm_factor());
    }
    return s;
  }

  Spatial parse_spatial_prefix() {
    if (eat_sym("@")) {
      LabelTerm l = parse_label_scaled();
      Spatial inner = parse_spatial_prefix();
      // `@a x |-> y ^ p` scales the labeled cell, so the suffix is consumed
      // by the caller; nested `@a (...) ^ p` comes through parentheses.
      return Spatial::labeled(std::move(l), std::move(inner));
    }
    return parse_spatial_atom();
  }

  Spatial parse_spatial_atom() {
    if (eat_ident("emp")) return Spatial::emp();
    if (eat_sym("(")) {
      Spatial s = parse_spatial();
      expect_sym(")");
      return s;
    }
    if (cur().kind == Tok::Ident && !is_reserved(cur().text)) {
      std::string n = cur().text;
      // predicate instance?
      if (peek().kind == Tok::Sym && peek().text == "(") {
        // Not a weak-star continuation: name(  is always a predicate.
        ++pos;  // name
        ++pos;  // (
        std::vector<VarId> args;
        if (!sym(")")) {
          for (;;) {
            if (eat_ident("nil"))
              args.push_back(nil_var());
            else
              args.push_back(value_var(expect_name("a predicate argument")));
            if (!eat_sym(",")) break;
          }
        }
        expect_sym(")");
        return Spatial::mk_pred(n, std::move(args));
      }
      if (peek().kind == Tok::Sym && peek().text == "|->") {
        ++pos;  // name
        ++pos;  // |->
        std::vector<VarId> fields;
        for (;;) {
          if (eat_ident("nil")) {
            fields.push_back(nil_var());
          } else {
            fields.push_back(value_var(expect_name("a field value")));
          }
          if (!eat_sym(",")) break;
        }
        return Spatial::cell(value_var(n), std::move(fields));
      }
      error("expected a spatial atom ('" + n + "' is neither 'x |-> ...' nor 'P(...)')");
      ++pos;
      return Spatial::emp();
    }
    error("expected a spatial atom");
    ++pos;
    return Spatial::emp();
  }

  // ---- symbolic heaps and formulas -------------------------------------------

  SymbolicHeap parse_symbolic_heap() {
    SymbolicHeap sh;
    std::set<std::string> outer_bound = bound_here;
    std::vector<std::string> binder_names;
    while (eat_ident("exists")) {
      for (;;) {
        std::string n = expect_name("a bound variable");
        if (n == "nil") error("'nil' cannot be bound");
        binder_names.push_back(n);
        bound_here.insert(n);
        if (!eat_sym(",")) break;
      }
      expect_sym(".");
    }
    // Binder kinds are fixed by first use inside the body; remember the
    // pre-existing uses so we can restore shadowed names afterwards.
    std::map<std::string, std::optional<NameUse>> saved;
    for (const auto& n : binder_names) {
      auto it = uses.find(n);
      saved[n] = it == uses.end() ? std::nullopt : std::optional<NameUse>(it->second);
      uses.erase(n);
    }

    sh.spatial = parse_spatial();
    while (eat_sym("&&")) {
      auto atom = parse_pure_atom();
      if (atom) sh.pure.push_back(std::move(*atom));
    }

    for (const auto& n : binder_names) {
      NameUse u = bare_use(n);
      VarKind k = u == NameUse::Label ? VarKind::Label
                  : (u == NameUse::PermVar || mode == FormulaMode::Spec) ? VarKind::Logical
                                                                         : VarKind::Program;
      sh.bound.push_back(VarId{n, k});
      uses.erase(n);
      if (saved[n]) uses[n] = *saved[n];
    }
    bound_here = std::move(outer_bound);
    return sh;
  }

  Formula parse_formula_toplevel() {
    Formula f;
    f.disjuncts.push_back(parse_symbolic_heap());
    while (eat_sym("\\/")) f.disjuncts.push_back(parse_symbolic_heap());
    return f;
  }

  // ---- declarations ------------------------------------------------------------

  void parse_record() {
    RecordDecl r;
    r.pos = cur().pos;
    ++pos;  // record
    r.name = expect_name("a record name");
    expect_sym("(");
    for (;;) {
      r.fields.push_back(expect_name("a field name"));
      if (!eat_sym(",")) break;
    }
    expect_sym(")");
    expect_sym(";");
    for (const auto& other : file.records)
      if (other.name == r.name) error("duplicate record '" + r.name + "'");
    file.records.push_back(std::move(r));
  }

  void parse_predicates() {
    ++pos;  // predicates
    expect_sym("{");
    while (!sym("}") && cur().kind != Tok::Eof) parse_rule();
    expect_sym("}");
  }

  void parse_rule() {
    // body => @a P(params) ;  — scan ahead for '=>' and read the head first
    // so parameter kinds are in scope while parsing the body.
    size_t body_start = pos;
    size_t arrow = pos;
    while (arrow < toks.size() && !(toks[arrow].kind == Tok::Sym && toks[arrow].text == "=>") &&
           !(toks[arrow].kind == Tok::Sym && toks[arrow].text == ";"))
      ++arrow;
    if (arrow >= toks.size() || toks[arrow].text != "=>") {
      error("expected '=>' in a predicate rule");
      while (!eat_sym(";") && cur().kind != Tok::Eof) ++pos;
      return;
    }

    pos = arrow + 1;
    expect_sym("@");
    VarId label_param = labvar(expect_name("a head label"));
    register_use(label_param.name, NameUse::Label);
    std::string pname = expect_name("a predicate name");
    expect_sym("(");
    std::vector<VarId> params;
    std::set<std::string> saved_scope = program_scope;
    if (!sym(")")) {
      for (;;) {
        std::string n = expect_name("a parameter");
        params.push_back(pvar(n));
        program_scope.insert(n);
        if (!eat_sym(",")) break;
      }
    }
    expect_sym(")");
    size_t after_head = pos;

    pos = body_start;
    FormulaMode saved_mode = mode;
    mode = FormulaMode::Spec;
    SymbolicHeap body = parse_symbolic_heap();
    mode = saved_mode;
    if (pos != arrow) error("trailing tokens before '=>' in a predicate rule");

    pos = after_head;
    expect_sym(";");
    program_scope = std::move(saved_scope);

    auto& def = file.defs.preds[pname];
    if (def.rules.empty()) def.arity = params.size();
    def.rules.push_back(InductiveRule{std::move(params), label_param, std::move(body)});
  }

  void parse_entail() {
    EntailQuery q;
    q.pos = cur().pos;
    ++pos;  // entail
    expect_sym("{");
    FormulaMode saved = mode;
    mode = FormulaMode::Entail;
    q.lhs = parse_symbolic_heap();
    expect_sym("|-");
    q.rhs = parse_symbolic_heap();
    mode = saved;
    expect_sym("}");
    file.entailments.push_back(std::move(q));
  }

  // ---- functions -----------------------------------------------------------------

  void parse_function() {
    FunctionDecl f;
    f.pos = cur().pos;
    ++pos;  // function
    f.name = expect_name("a function name");
    expect_sym("(");
    std::set<std::string> saved_scope = program_scope;
    for (;;) {
      std::string n = expect_name("a parameter");
      f.params.push_back(pvar(n));
      program_scope.insert(n);
      if (!eat_sym(",")) break;
    }
    expect_sym(")");
    if (f.params.size() > 2) error("a function takes at most (by-ref, by-value) parameters");

    FormulaMode saved_mode = mode;
    mode = FormulaMode::Spec;
    while (ident("req")) {
      ++pos;
      SpecPair sp;
      sp.pre = parse_symbolic_heap();
      if (!eat_ident("ens")) error("expected 'ens' after 'req'");
      sp.post = parse_symbolic_heap();
      eat_sym(";");
      f.specs.push_back(std::move(sp));
    }
    mode = saved_mode;
    if (f.specs.empty()) error("function '" + f.name + "' needs at least one req/ens pair");

    expect_sym("{");
    f.body = parse_block();
    expect_sym("}");
    program_scope = std::move(saved_scope);

    for (const auto& other : file.functions)
      if (other.name == f.name) error("duplicate function '" + f.name + "'");
    file.functions.push_back(std::move(f));
  }

  std::vector<Stmt> parse_block() {
    std::vector<Stmt> out;
    while (!sym("}") && cur().kind != Tok::Eof) {
      if (ident("local")) {
        Stmt s;
        s.kind = Stmt::Kind::Local;
        s.pos = cur().pos;
        ++pos;
        std::string n = expect_name("a local variable");
        s.lhs = pvar(n);
        expect_sym(";");
        bool added = program_scope.insert(n).second;
        s.body = parse_block();
        if (added) program_scope.erase(n);
        out.push_back(std::move(s));
        return out;
      }
      out.push_back(parse_stmt());
      eat_sym(";");
    }
    return out;
  }

  std::vector<Stmt> parse_braced_block() {
    expect_sym("{");
    std::vector<Stmt> b = parse_block();
    expect_sym("}");
    return b;
  }

  VarId stmt_var() {
    std::string n = expect_name("a variable");
    if (n != "nil" && !program_scope.count(n))
      error("unknown variable '" + n + "'");
    return n == "nil" ? nil_var() : pvar(n);
  }

  Stmt parse_stmt() {
    Stmt s;
    s.pos = cur().pos;
    if (eat_ident("skip")) {
      s.kind = Stmt::Kind::Skip;
      return s;
    }
    if (ident("atomic")) {
      error("'atomic' blocks are not supported");
      // Skip a balanced block to recover.
      ++pos;
      while (cur().kind != Tok::Eof && !sym("{")) ++pos;
      int depth = 0;
      do {
        if (sym("{")) ++depth;
        if (sym("}")) --depth;
        ++pos;
      } while (cur().kind != Tok::Eof && depth > 0);
      return s;
    }
    if (eat_ident("free")) {
      s.kind = Stmt::Kind::Free;
      s.lhs = stmt_var();
      return s;
    }
    if (eat_ident("join")) {
      s.kind = Stmt::Kind::Join;
      expect_sym("(");
      s.lhs = stmt_var();
      expect_sym(")");
      return s;
    }
    if (ident("if")) {
      ++pos;
      s.kind = Stmt::Kind::If;
      expect_sym("(");
      s.cond = parse_condition();
      expect_sym(")");
      s.then_branch = parse_braced_block();
      if (eat_ident("else")) s.else_branch = parse_braced_block();
      return s;
    }
    if (ident("par")) {
      ++pos;
      s.kind = Stmt::Kind::Par;
      expect_sym("{");
      parse_call_into(s.callee, s.args);
      expect_sym("}");
      expect_sym("{");
      parse_call_into(s.callee2, s.args2);
      expect_sym("}");
      return s;
    }
    if (sym("[")) {  // [x.f] = v
      ++pos;
      s.kind = Stmt::Kind::Store;
      s.lhs = stmt_var();
      s.field = parse_field_suffix();
      expect_sym("]");
      expect_sym("=");
      s.rhs_var = stmt_var();
      return s;
    }
    // Starts with a variable: assignment, load, malloc, fork, or a call.
    if (cur().kind == Tok::Ident && !is_reserved(cur().text)) {
      if (peek().kind == Tok::Sym && peek().text == "(") {  // call
        s.kind = Stmt::Kind::Call;
        parse_call_into(s.callee, s.args);
        return s;
      }
      s.lhs = stmt_var();
      if (!eat_sym("=")) {
        error("expected '=' or '(' after variable");
        return s;
      }
      if (eat_ident("malloc")) {
        s.kind = Stmt::Kind::Malloc;
        expect_sym("(");
        expect_sym(")");
        return s;
      }
      if (eat_ident("fork")) {
        s.kind = Stmt::Kind::Fork;
        expect_sym("(");
        s.callee = expect_name("a function name");
        while (eat_sym(",")) s.args.push_back(stmt_var());
        expect_sym(")");
        return s;
      }
      if (sym("[")) {  // x = [y.f]
        ++pos;
        s.kind = Stmt::Kind::Load;
        s.rhs_var = stmt_var();
        s.field = parse_field_suffix();
        expect_sym("]");
        return s;
      }
      s.kind = Stmt::Kind::Assign;
      s.expr = parse_arith_program();
      return s;
    }
    error("expected a statement, found '" + cur().text + "'");
    ++pos;
    return s;
  }

  // Program expressions only mention program variables and literals.
  ArithTerm parse_arith_program() {
    std::set<std::string> no_uses;  // kinds don't change inside statements
    ArithTerm t = parse_arith_prog_atom();
    while (sym("+") || sym("-")) {
      bool minus = sym("-");
      ++pos;
      ArithTerm r = parse_arith_prog_atom();
      if (minus) {
        if (r.kind == ArithTerm::Kind::Const)
          r.num = -r.num;
        else
          error("subtraction is only supported with an integer literal");
      }
      t = ArithTerm::add(std::move(t), std::move(r));
    }
    return t;
  }

  ArithTerm parse_arith_prog_atom() {
    if (cur().kind == Tok::Int) {
      long long v = cur().num;
      ++pos;
      return ArithTerm::mk_const(v);
    }
    if (eat_ident("nil")) return ArithTerm::mk_var(nil_var());
    if (cur().kind == Tok::Ident && !is_reserved(cur().text))
      return ArithTerm::mk_var(stmt_var());
    error("expected a program expression");
    ++pos;
    return ArithTerm::mk_const(0);
  }

  PureAtom parse_condition() {
    ArithTerm a = parse_arith_program();
    bool neq = false;
    if (eat_sym("!=")) {
      neq = true;
    } else if (!eat_sym("==") && !eat_sym("=")) {
      error("expected '==' or '!=' in a condition");
    }
    ArithTerm b = parse_arith_program();
    return neq ? mk_neq(std::move(a), std::move(b)) : mk_eq(std::move(a), std::move(b));
  }

  int parse_field_suffix() {
    if (!eat_sym(".")) return 0;
    std::string f = expect_name("a field name");
    auto idx = file.field_index(f);
    if (!idx) {
      error("unknown field '" + f + "'");
      return 0;
    }
    return *idx;
  }

  void parse_call_into(std::string& callee, std::vector<VarId>& args) {
    callee = expect_name("a function name");
    expect_sym("(");
    if (!sym(")")) {
      for (;;) {
        args.push_back(stmt_var());
        if (!eat_sym(",")) break;
      }
    }
    expect_sym(")");
  }

  // ---- top level --------------------------------------------------------------

  void parse_file() {
    while (cur().kind != Tok::Eof) {
      if (ident("record")) {
        parse_record();
      } else if (ident("predicates")) {
        parse_predicates();
      } else if (ident("function")) {
        parse_function();
      } else if (ident("entail")) {
        parse_entail();
      } else {
        error("expected 'record', 'predicates', 'function' or 'entail'");
        ++pos;
      }
    }
  }

  void validate() {
    for (const auto& e : check_env(file.defs)) {
      std::string where = e.pred + (e.rule_index >= 0 ? " rule " + std::to_string(e.rule_index) : "");
      errs.push_back({SourcePos{}, "predicate " + where + ": " + e.message});
    }
    std::function<void(const FunctionDecl&, const std::vector<Stmt>&)> walk =
        [&](const FunctionDecl& f, const std::vector<Stmt>& body) {
          for (const auto& s : body) {
            if (s.kind == Stmt::Kind::Call || s.kind == Stmt::Kind::Fork) {
              check_call(s.callee, s.args.size(), s.pos);
            } else if (s.kind == Stmt::Kind::Par) {
              check_call(s.callee, s.args.size(), s.pos);
              check_call(s.callee2, s.args2.size(), s.pos);
            }
            walk(f, s.then_branch);
            walk(f, s.else_branch);
            walk(f, s.body);
          }
        };
    for (const auto& f : file.functions) walk(f, f.body);

    if (!file.records.empty()) {
      std::function<void(const Spatial&)> check_cells = [&](const Spatial& s) {
        if (s.kind == Spatial::Kind::Cell && !file.arity_declared(s.fields.size()))
          errs.push_back({SourcePos{}, "no record shape with " + std::to_string(s.fields.size()) +
                                           " fields is declared"});
        for (const auto& k : s.kids) check_cells(k);
      };
      for (const auto& [n, d] : file.defs.preds)
        for (const auto& r : d.rules) check_cells(r.body.spatial);
      for (const auto& f : file.functions)
        for (const auto& sp : f.specs) {
          check_cells(sp.pre.spatial);
          check_cells(sp.post.spatial);
        }
    }
  }

  void check_call(const std::string& callee, size_t n_args, SourcePos p) {
    const FunctionDecl* f = file.find_function(callee);
    if (!f) {
      errs.push_back({p, "call to undeclared function '" + callee + "'"});
      return;
    }
    if (f->params.size() != n_args)
      errs.push_back({p, "'" + callee + "' expects " + std::to_string(f->params.size()) +
                             " arguments, got " + std::to_string(n_args)});
  }
};

}  // namespace

ParseResult parse_program(const std::string& text) {
  ParseResult res;
  Parser p;
  Lexer lex(text, &p.errs);
  p.toks = lex.run();
  p.mode = FormulaMode::Spec;
  p.parse_file();
  p.validate();
  res.errors = std::move(p.errs);
  if (res.errors.empty()) res.file = std::move(p.file);
  return res;
}

FormulaResult parse_formula(const std::string& text) {
  FormulaResult res;
  Parser p;
  Lexer lex(text, &p.errs);
  p.toks = lex.run();
  p.mode = FormulaMode::Standalone;
  Formula f = p.parse_formula_toplevel();
  if (p.cur().kind != Tok::Eof) p.error("trailing input after formula");
  res.errors = std::move(p.errs);
  if (res.errors.empty()) res.formula = std::move(f);
  return res;
}

}  // namespace slp
