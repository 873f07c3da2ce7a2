#include "slp/print.hpp"

#include <sstream>

namespace slp {

namespace {

// Precedence climbing for terms: atoms never need parens; binary chains get
// parens when nested under a different operator.

std::string arith_str(const ArithTerm& t, bool parent_add) {
  switch (t.kind) {
    case ArithTerm::Kind::Var: return t.var.name;
    case ArithTerm::Kind::Const: return std::to_string(t.num);
    case ArithTerm::Kind::Add: {
      // x + -1 prints as x - 1
      std::string l = arith_str(t.args[0], true);
      const ArithTerm& r = t.args[1];
      std::string out;
      if (r.kind == ArithTerm::Kind::Const && r.num < 0)
        out = l + " - " + std::to_string(-r.num);
      else
        out = l + " + " + arith_str(r, true);
      (void)parent_add;  // + is associative; no parens needed in chains
      return out;
    }
  }
  return "?";
}

std::string perm_str(const PermTerm& t, int parent_prec) {
  // prec: 1 = (+), 2 = (x), 3 = atom
  switch (t.kind) {
    case PermTerm::Kind::Const: return rat_to_string(t.value);
    case PermTerm::Kind::Var: return t.var.name;
    case PermTerm::Kind::Add: {
      std::string s = perm_str(t.args[0], 1) + " (+) " + perm_str(t.args[1], 1);
      return parent_prec > 1 ? "(" + s + ")" : s;
    }
    case PermTerm::Kind::Mul: {
      std::string s = perm_str(t.args[0], 2) + " (x) " + perm_str(t.args[1], 2);
      return parent_prec > 2 ? "(" + s + ")" : s;
    }
  }
  return "?";
}

std::string label_str(const LabelTerm& t, int parent_prec) {
  // prec: 1 = o/ow, 2 = ^, 3 = atom
  switch (t.kind) {
    case LabelTerm::Kind::Var: return t.var.name;
    case LabelTerm::Kind::Strong:
    case LabelTerm::Kind::Weak: {
      const char* op = t.kind == LabelTerm::Kind::Strong ? " o " : " ow ";
      std::string s = label_str(t.args[0], 1) + op + label_str(t.args[1], 2);
      return parent_prec > 1 ? "(" + s + ")" : s;
    }
    case LabelTerm::Kind::Scaled: {
      std::string s = label_str(t.args[0], 3) + "^" + perm_str(t.scale[0], 3);
      return parent_prec > 2 ? "(" + s + ")" : s;
    }
  }
  return "?";
}

// Spatial precedence: 1 = * / (+) chains, 2 = @, 3 = ^ suffix, 4 = atom.
std::string spatial_str(const Spatial& s, int parent_prec) {
  switch (s.kind) {
    case Spatial::Kind::Emp: return "emp";
    case Spatial::Kind::Cell: {
      std::string out = s.head.name + " |-> ";
      for (size_t i = 0; i < s.fields.size(); ++i) {
        if (i) out += ",";
        out += s.fields[i].name;
      }
      return out;
    }
    case Spatial::Kind::Pred: {
      std::string out = s.pred + "(";
      for (size_t i = 0; i < s.fields.size(); ++i) {
        if (i) out += ",";
        out += s.fields[i].name;
      }
      return out + ")";
    }
    case Spatial::Kind::Labeled: {
      std::string inner = spatial_str(s.kids[0], 2);
      // cells/preds attach directly: @a x |-> y
      if (s.kids[0].kind == Spatial::Kind::Star || s.kids[0].kind == Spatial::Kind::WStar ||
          s.kids[0].kind == Spatial::Kind::Scaled)
        inner = "(" + spatial_str(s.kids[0], 0) + ")";
      std::string out = "@" + label_str(s.label[0], 3) + " " + inner;
      return parent_prec > 2 ? "(" + out + ")" : out;
    }
    case Spatial::Kind::Scaled: {
      const Spatial& in = s.kids[0];
      // `@a x |-> y ^ 1/2` reads as the scaled labeled cell, so a labeled
      // atom needs no parentheses under its own scale.
      bool labeled_atom = in.kind == Spatial::Kind::Labeled &&
                          (in.kids[0].kind == Spatial::Kind::Cell ||
                           in.kids[0].kind == Spatial::Kind::Pred);
      std::string inner = labeled_atom ? spatial_str(in, 2)
                          : (in.kind == Spatial::Kind::Cell || in.kind == Spatial::Kind::Pred ||
                             in.kind == Spatial::Kind::Emp)
                              ? spatial_str(in, 3)
                              : "(" + spatial_str(in, 0) + ")";
      std::string out = inner + " ^ " + perm_str(s.perm[0], 3);
      return parent_prec > 3 ? "(" + out + ")" : out;
    }
    case Spatial::Kind::Star:
    case Spatial::Kind::WStar: {
      const char* op = s.kind == Spatial::Kind::Star ? " * " : " (+) ";
      std::string out;
      for (size_t i = 0; i < s.kids.size(); ++i) {
        if (i) out += op;
        // mixed chains always parenthesized
        bool need = s.kids[i].kind == Spatial::Kind::Star || s.kids[i].kind == Spatial::Kind::WStar;
        out += need ? "(" + spatial_str(s.kids[i], 0) + ")" : spatial_str(s.kids[i], 2);
      }
      return parent_prec > 1 ? "(" + out + ")" : out;
    }
  }
  return "?";
}

}  // namespace

std::string pretty(const ArithTerm& t) { return arith_str(t, false); }
std::string pretty(const PermTerm& t) { return perm_str(t, 0); }
std::string pretty(const LabelTerm& t) { return label_str(t, 0); }

std::string pretty(const PureAtom& a) {
  if (const auto* ar = std::get_if<ArithRel>(&a))
    return pretty(ar->lhs) + (ar->neq ? " != " : " = ") + pretty(ar->rhs);
  if (const auto* pr = std::get_if<PermRel>(&a)) return pretty(pr->lhs) + " = " + pretty(pr->rhs);
  const auto& lr = std::get<LabelRel>(a);
  return pretty(lr.lhs) + (lr.disjoint ? " _|_ " : " = ") + pretty(lr.rhs);
}

std::string pretty(const Spatial& s) { return spatial_str(s, 0); }

std::string pretty(const SymbolicHeap& sh) {
  std::string out;
  if (!sh.bound.empty()) {
    out += "exists ";
    for (size_t i = 0; i < sh.bound.size(); ++i) {
      if (i) out += ",";
      out += sh.bound[i].name;
    }
    out += ". ";
  }
  out += spatial_str(sh.spatial, 0);
  if (sh.pure.empty()) {
    if (sh.spatial.is_emp()) out += " && true";
  } else {
    for (const auto& a : sh.pure) out += " && " + pretty(a);
  }
  return out;
}

std::string pretty(const Formula& f) {
  std::string out;
  for (size_t i = 0; i < f.disjuncts.size(); ++i) {
    if (i) out += " \\/ ";
    out += f.disjuncts.size() > 1 ? "(" + pretty(f.disjuncts[i]) + ")" : pretty(f.disjuncts[i]);
  }
  return out;
}

}  // namespace slp
