#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "slp/ast.hpp"
#include "slp/defs.hpp"

namespace slp {

struct SourcePos {
  int line = 0;
  int col = 0;
};

// Statements of the annotated imperative language. A function body is a
// sequence; `local` scopes the tail of its block.
struct Stmt {
  enum class Kind : uint8_t {
    Skip,
    Store,   // [x.f] = v
    Load,    // x = [y.f]
    Malloc,  // x = malloc()
    Free,    // free x
    Assign,  // x = E
    Local,   // local x; <rest of block>
    If,      // if (cond) { } else { }
    Call,    // f(x) or f(x, y)
    Par,     // par { f(x1) } { g(x2) }
    Fork,    // t = fork(f, x) / fork(f, x, y)
    Join,    // join(t)
  };
  Kind kind = Kind::Skip;
  SourcePos pos;

  VarId lhs;                  // Store target / Load dst / Assign dst / Malloc dst / Free/Join var / Fork token
  VarId rhs_var;              // Store value / Load src
  int field = 0;              // Store/Load field index
  ArithTerm expr;             // Assign rhs
  PureAtom cond = ArithRel{};  // If condition
  std::vector<Stmt> then_branch, else_branch;
  std::vector<Stmt> body;     // Local tail
  std::string callee;         // Call/Fork/Par(first)
  std::vector<VarId> args;    // Call/Fork actuals
  std::string callee2;        // Par second
  std::vector<VarId> args2;   // Par second actuals
};

struct SpecPair {
  SymbolicHeap pre, post;
};

struct FunctionDecl {
  std::string name;
  std::vector<VarId> params;  // 1 (by-ref) or 2 (by-ref, by-value)
  std::vector<SpecPair> specs;
  std::vector<Stmt> body;
  SourcePos pos;

  const VarId& ref_param() const { return params[0]; }
  bool has_val_param() const { return params.size() > 1; }
  const VarId& val_param() const { return params[1]; }
};

struct RecordDecl {
  std::string name;
  std::vector<std::string> fields;
  SourcePos pos;
};

struct EntailQuery {
  SymbolicHeap lhs, rhs;
  SourcePos pos;
};

struct SourceFile {
  std::vector<RecordDecl> records;
  DefEnv defs;
  std::vector<FunctionDecl> functions;
  std::vector<EntailQuery> entailments;

  const FunctionDecl* find_function(const std::string& n) const {
    for (const auto& f : functions)
      if (f.name == n) return &f;
    return nullptr;
  }
  bool arity_declared(size_t n) const {
    for (const auto& r : records)
      if (r.fields.size() == n) return true;
    return false;
  }
  // Field name -> index, searching declared records.
  std::optional<int> field_index(const std::string& fname) const {
    for (const auto& r : records)
      for (size_t i = 0; i < r.fields.size(); ++i)
        if (r.fields[i] == fname) return static_cast<int>(i);
    return std::nullopt;
  }
};

struct ParseError {
  SourcePos pos;
  std::string message;
};

struct ParseResult {
  std::optional<SourceFile> file;
  std::vector<ParseError> errors;
  bool ok() const { return file.has_value() && errors.empty(); }
};

ParseResult parse_program(const std::string& text);

// Standalone formula parsing (value variables default to Program kind unless
// bound; label/permission kinds come from their positions).
struct FormulaResult {
  std::optional<Formula> formula;
  std::vector<ParseError> errors;
};
FormulaResult parse_formula(const std::string& text);

}  // namespace slp
