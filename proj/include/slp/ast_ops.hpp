#pragma once

#include <map>
#include <set>
#include <stdexcept>

#include "slp/ast.hpp"

namespace slp {

// ---------------------------------------------------------------------------
// Free variables
// ---------------------------------------------------------------------------

void free_vars_into(const ArithTerm& t, std::set<VarId>& out);
void free_vars_into(const PermTerm& t, std::set<VarId>& out);
void free_vars_into(const LabelTerm& t, std::set<VarId>& out);
void free_vars_into(const PureAtom& a, std::set<VarId>& out);
void free_vars_into(const Spatial& s, std::set<VarId>& out);

std::set<VarId> free_vars(const Spatial& s);
std::set<VarId> free_vars(const SymbolicHeap& sh);  // minus binders
std::set<VarId> free_vars(const Formula& f);

// All variable occurrences including binders (for freshness pools).
std::set<VarId> all_vars(const SymbolicHeap& sh);

// ---------------------------------------------------------------------------
// Substitution (simultaneous, capture-avoiding, kind-checked)
// ---------------------------------------------------------------------------

struct SubstError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Subst {
  std::map<VarId, ArithTerm> val;   // Program/Logical value variables
  std::map<VarId, PermTerm> perm;   // Logical permission variables
  std::map<VarId, LabelTerm> lab;   // Label variables

  bool empty() const { return val.empty() && perm.empty() && lab.empty(); }

  // Routes by the source variable's kind; throws SubstError on a kind clash.
  void add_var(const VarId& from, const VarId& to);
  void add_val(const VarId& from, ArithTerm t);
  void add_perm(const VarId& from, PermTerm t);
  void add_label(const VarId& from, LabelTerm t);

  std::set<VarId> range_vars() const;
  void erase(const VarId& v);
  bool maps(const VarId& v) const;
};

ArithTerm subst(const ArithTerm& t, const Subst& m);
PermTerm subst(const PermTerm& t, const Subst& m);
LabelTerm subst(const LabelTerm& t, const Subst& m);
PureAtom subst(const PureAtom& a, const Subst& m);
Spatial subst(const Spatial& s, const Subst& m);  // spatial positions need Var images
SymbolicHeap subst(const SymbolicHeap& sh, const Subst& m);
Formula subst(const Formula& f, const Subst& m);

// ---------------------------------------------------------------------------
// Fresh names
// ---------------------------------------------------------------------------

// Deterministic fresh-name source: base, base1, base2, ... skipping a pool of
// names already in use. One generator per query/function keeps output stable.
class FreshGen {
 public:
  void reserve(const std::set<VarId>& vs);
  void reserve(const VarId& v);
  VarId fresh(const VarId& base);
  VarId fresh_like(const std::string& base_name, VarKind kind);

 private:
  std::set<std::string> used_;  // names are unique across kinds for readability
};

// How a variable is used inside a formula; drives renaming and enumeration.
enum class VarUse : uint8_t { Value, Perm, Label };

std::map<VarId, VarUse> var_uses(const SymbolicHeap& sh);
VarUse use_of(const std::map<VarId, VarUse>& uses, const VarId& v);

// Kind-correct variable-for-variable renaming entry.
void add_renaming(Subst& s, const VarId& from, const VarId& to, VarUse use);

// Renames every binder of `sh` away from `avoid` (and from its own free vars).
SymbolicHeap fresh_rename(const SymbolicHeap& sh, const std::set<VarId>& avoid);
SymbolicHeap fresh_rename(const SymbolicHeap& sh, const std::set<VarId>& avoid, FreshGen& gen);

// ---------------------------------------------------------------------------
// AC normal form: flattens nested * / (+), drops emp children, sorts children
// by the structural order. Idempotent.
// ---------------------------------------------------------------------------

Spatial ac_normalize(const Spatial& s);
SymbolicHeap ac_normalize(const SymbolicHeap& sh);

// Folds constant permission arithmetic (products always, sums when defined).
PermTerm perm_fold(const PermTerm& t);

}  // namespace slp
