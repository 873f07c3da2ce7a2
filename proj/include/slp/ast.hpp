#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "slp/perm.hpp"

namespace slp {

// ---------------------------------------------------------------------------
// Variables
// ---------------------------------------------------------------------------

enum class VarKind : uint8_t { Program, Logical, Label };

struct VarId {
  std::string name;
  VarKind kind = VarKind::Program;

  bool operator==(const VarId& o) const { return kind == o.kind && name == o.name; }
  bool operator<(const VarId& o) const {
    if (kind != o.kind) return kind < o.kind;
    return name < o.name;
  }
};

inline VarId nil_var() { return VarId{"nil", VarKind::Program}; }
inline bool is_nil(const VarId& v) { return v.kind == VarKind::Program && v.name == "nil"; }

inline VarId pvar(std::string n) { return VarId{std::move(n), VarKind::Program}; }
inline VarId lvar(std::string n) { return VarId{std::move(n), VarKind::Logical}; }
inline VarId labvar(std::string n) { return VarId{std::move(n), VarKind::Label}; }

// ---------------------------------------------------------------------------
// Value (arithmetic) terms: x | k | t + t
// ---------------------------------------------------------------------------

struct ArithTerm {
  enum class Kind : uint8_t { Var, Const, Add };
  Kind kind = Kind::Const;
  VarId var;
  long long num = 0;
  std::vector<ArithTerm> args;  // two entries for Add

  static ArithTerm mk_var(VarId v) {
    ArithTerm t;
    t.kind = Kind::Var;
    t.var = std::move(v);
    return t;
  }
  static ArithTerm mk_const(long long k) {
    ArithTerm t;
    t.kind = Kind::Const;
    t.num = k;
    return t;
  }
  static ArithTerm add(ArithTerm a, ArithTerm b) {
    ArithTerm t;
    t.kind = Kind::Add;
    t.args.push_back(std::move(a));
    t.args.push_back(std::move(b));
    return t;
  }
};

// ---------------------------------------------------------------------------
// Permission terms: c | v | p (+) p | p (x) p
// ---------------------------------------------------------------------------

struct PermTerm {
  enum class Kind : uint8_t { Const, Var, Add, Mul };
  Kind kind = Kind::Const;
  Rat value = Rat(1);  // Const; invariant 0 < value <= 1
  VarId var;           // Var; Logical kind
  std::vector<PermTerm> args;

  static PermTerm mk_const(Rat r) {
    PermTerm t;
    t.kind = Kind::Const;
    t.value = std::move(r);
    return t;
  }
  static PermTerm top() { return mk_const(Rat(1)); }
  static PermTerm mk_var(VarId v) {
    PermTerm t;
    t.kind = Kind::Var;
    t.var = std::move(v);
    return t;
  }
  static PermTerm add(PermTerm a, PermTerm b) {
    PermTerm t;
    t.kind = Kind::Add;
    t.args.push_back(std::move(a));
    t.args.push_back(std::move(b));
    return t;
  }
  static PermTerm mul(PermTerm a, PermTerm b) {
    PermTerm t;
    t.kind = Kind::Mul;
    t.args.push_back(std::move(a));
    t.args.push_back(std::move(b));
    return t;
  }
  bool is_top() const { return kind == Kind::Const && value == 1; }
};

// ---------------------------------------------------------------------------
// Label terms: a | l o l | l ow l | l ^ p
// ---------------------------------------------------------------------------

struct LabelTerm {
  enum class Kind : uint8_t { Var, Strong, Weak, Scaled };
  Kind kind = Kind::Var;
  VarId var;                    // Var; Label kind
  std::vector<LabelTerm> args;  // two for Strong/Weak, one for Scaled
  std::vector<PermTerm> scale;  // one for Scaled

  static LabelTerm mk_var(VarId v) {
    LabelTerm t;
    t.var = std::move(v);
    return t;
  }
  static LabelTerm strong(LabelTerm a, LabelTerm b) {
    LabelTerm t;
    t.kind = Kind::Strong;
    t.args.push_back(std::move(a));
    t.args.push_back(std::move(b));
    return t;
  }
  static LabelTerm weak(LabelTerm a, LabelTerm b) {
    LabelTerm t;
    t.kind = Kind::Weak;
    t.args.push_back(std::move(a));
    t.args.push_back(std::move(b));
    return t;
  }
  static LabelTerm scaled(LabelTerm l, PermTerm p) {
    LabelTerm t;
    t.kind = Kind::Scaled;
    t.args.push_back(std::move(l));
    t.scale.push_back(std::move(p));
    return t;
  }
};

// ---------------------------------------------------------------------------
// Pure atoms
// ---------------------------------------------------------------------------

struct ArithRel {  // e1 = e2 or e1 != e2
  bool neq = false;
  ArithTerm lhs, rhs;
};

struct PermRel {  // p1 = p2
  PermTerm lhs, rhs;
};

struct LabelRel {  // l1 = l2 or l1 _|_ l2 (disjoint stored in canonical order)
  bool disjoint = false;
  LabelTerm lhs, rhs;
};

using PureAtom = std::variant<ArithRel, PermRel, LabelRel>;

PureAtom mk_eq(ArithTerm a, ArithTerm b);
PureAtom mk_neq(ArithTerm a, ArithTerm b);
PureAtom mk_perm_eq(PermTerm a, PermTerm b);
PureAtom mk_label_eq(LabelTerm a, LabelTerm b);
PureAtom mk_disjoint(LabelTerm a, LabelTerm b);  // canonicalizes argument order

// ---------------------------------------------------------------------------
// Spatial formulas
// ---------------------------------------------------------------------------

struct Spatial {
  enum class Kind : uint8_t { Emp, Cell, Pred, Star, WStar, Scaled, Labeled };
  Kind kind = Kind::Emp;
  VarId head;                   // Cell
  std::vector<VarId> fields;    // Cell contents / Pred arguments
  std::string pred;             // Pred name
  int unfold_depth = 0;         // Pred: search bookkeeping; never compared
  std::vector<Spatial> kids;    // Star/WStar (>=2), Scaled/Labeled (1)
  std::vector<PermTerm> perm;   // Scaled (1)
  std::vector<LabelTerm> label;  // Labeled (1)

  static Spatial emp() { return Spatial{}; }
  static Spatial cell(VarId h, std::vector<VarId> fs) {
    Spatial s;
    s.kind = Kind::Cell;
    s.head = std::move(h);
    s.fields = std::move(fs);
    return s;
  }
  static Spatial mk_pred(std::string name, std::vector<VarId> args, int depth = 0) {
    Spatial s;
    s.kind = Kind::Pred;
    s.pred = std::move(name);
    s.fields = std::move(args);
    s.unfold_depth = depth;
    return s;
  }
  static Spatial star(std::vector<Spatial> ks);   // flattens trivial cases
  static Spatial wstar(std::vector<Spatial> ks);  // flattens trivial cases
  static Spatial scaled(Spatial inner, PermTerm p) {
    Spatial s;
    s.kind = Kind::Scaled;
    s.kids.push_back(std::move(inner));
    s.perm.push_back(std::move(p));
    return s;
  }
  static Spatial labeled(LabelTerm l, Spatial inner) {
    Spatial s;
    s.kind = Kind::Labeled;
    s.kids.push_back(std::move(inner));
    s.label.push_back(std::move(l));
    return s;
  }
  bool is_emp() const { return kind == Kind::Emp; }
};

// (@_l core)^p — the canonical shape of a matched atom.
Spatial atom(LabelTerm l, Spatial core, PermTerm p);

struct SymbolicHeap {
  std::vector<VarId> bound;  // existentials, distinct, never `nil`
  Spatial spatial;
  std::vector<PureAtom> pure;  // conjunction
};

struct Formula {
  std::vector<SymbolicHeap> disjuncts;  // nonempty
};

// ---------------------------------------------------------------------------
// Total structural order (constructor rank first, then heads, then parts).
// Drives AC-normalization and keeps the proof search reproducible.
// ---------------------------------------------------------------------------

int cmp(const VarId& a, const VarId& b);
int cmp(const ArithTerm& a, const ArithTerm& b);
int cmp(const PermTerm& a, const PermTerm& b);
int cmp(const LabelTerm& a, const LabelTerm& b);
int cmp(const PureAtom& a, const PureAtom& b);
int cmp(const Spatial& a, const Spatial& b);  // ignores unfold_depth
int cmp(const SymbolicHeap& a, const SymbolicHeap& b);

inline bool equal(const ArithTerm& a, const ArithTerm& b) { return cmp(a, b) == 0; }
inline bool equal(const PermTerm& a, const PermTerm& b) { return cmp(a, b) == 0; }
inline bool equal(const LabelTerm& a, const LabelTerm& b) { return cmp(a, b) == 0; }
inline bool equal(const PureAtom& a, const PureAtom& b) { return cmp(a, b) == 0; }
inline bool equal(const Spatial& a, const Spatial& b) { return cmp(a, b) == 0; }
inline bool equal(const SymbolicHeap& a, const SymbolicHeap& b) { return cmp(a, b) == 0; }

}  // namespace slp
