#include "slp/ast.hpp"

namespace slp {

PureAtom mk_eq(ArithTerm a, ArithTerm b) { return ArithRel{false, std::move(a), std::move(b)}; }
PureAtom mk_neq(ArithTerm a, ArithTerm b) { return ArithRel{true, std::move(a), std::move(b)}; }
PureAtom mk_perm_eq(PermTerm a, PermTerm b) { return PermRel{std::move(a), std::move(b)}; }
PureAtom mk_label_eq(LabelTerm a, LabelTerm b) { return LabelRel{false, std::move(a), std::move(b)}; }

PureAtom mk_disjoint(LabelTerm a, LabelTerm b) {
  if (cmp(b, a) < 0) std::swap(a, b);
  return LabelRel{true, std::move(a), std::move(b)};
}

Spatial Spatial::star(std::vector<Spatial> ks) {
  if (ks.empty()) return emp();
  if (ks.size() == 1) return std::move(ks.front());
  Spatial s;
  s.kind = Kind::Star;
  s.kids = std::move(ks);
  return s;
}

Spatial Spatial::wstar(std::vector<Spatial> ks) {
  if (ks.empty()) return emp();
  if (ks.size() == 1) return std::move(ks.front());
  Spatial s;
  s.kind = Kind::WStar;
  s.kids = std::move(ks);
  return s;
}

Spatial atom(LabelTerm l, Spatial core, PermTerm p) {
  Spatial labeled = Spatial::labeled(std::move(l), std::move(core));
  if (p.is_top()) return labeled;
  return Spatial::scaled(std::move(labeled), std::move(p));
}

// --------------------------------------------------------------------------
// Structural comparison
// --------------------------------------------------------------------------

namespace {

template <typename T>
int cmp_vec(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (size_t i = 0; i < a.size(); ++i) {
    int c = cmp(a[i], b[i]);
    if (c != 0) return c;
  }
  return 0;
}

int cmp_int(long long a, long long b) { return a < b ? -1 : (a > b ? 1 : 0); }

}  // namespace

int cmp(const VarId& a, const VarId& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  return a.name.compare(b.name) < 0 ? -1 : (a.name == b.name ? 0 : 1);
}

int cmp(const ArithTerm& a, const ArithTerm& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  switch (a.kind) {
    case ArithTerm::Kind::Var: return cmp(a.var, b.var);
    case ArithTerm::Kind::Const: return cmp_int(a.num, b.num);
    case ArithTerm::Kind::Add: return cmp_vec(a.args, b.args);
  }
  return 0;
}

int cmp(const PermTerm& a, const PermTerm& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  switch (a.kind) {
    case PermTerm::Kind::Const:
      return a.value < b.value ? -1 : (a.value == b.value ? 0 : 1);
    case PermTerm::Kind::Var: return cmp(a.var, b.var);
    case PermTerm::Kind::Add:
    case PermTerm::Kind::Mul: return cmp_vec(a.args, b.args);
  }
  return 0;
}

int cmp(const LabelTerm& a, const LabelTerm& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  switch (a.kind) {
    case LabelTerm::Kind::Var: return cmp(a.var, b.var);
    case LabelTerm::Kind::Strong:
    case LabelTerm::Kind::Weak: return cmp_vec(a.args, b.args);
    case LabelTerm::Kind::Scaled: {
      int c = cmp_vec(a.args, b.args);
      if (c != 0) return c;
      return cmp_vec(a.scale, b.scale);
    }
  }
  return 0;
}

int cmp(const PureAtom& a, const PureAtom& b) {
  if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
  if (const auto* ar = std::get_if<ArithRel>(&a)) {
    const auto& br = std::get<ArithRel>(b);
    if (ar->neq != br.neq) return ar->neq < br.neq ? -1 : 1;
    int c = cmp(ar->lhs, br.lhs);
    if (c != 0) return c;
    return cmp(ar->rhs, br.rhs);
  }
  if (const auto* pr = std::get_if<PermRel>(&a)) {
    const auto& br = std::get<PermRel>(b);
    int c = cmp(pr->lhs, br.lhs);
    if (c != 0) return c;
    return cmp(pr->rhs, br.rhs);
  }
  const auto& lr = std::get<LabelRel>(a);
  const auto& br = std::get<LabelRel>(b);
  if (lr.disjoint != br.disjoint) return lr.disjoint < br.disjoint ? -1 : 1;
  int c = cmp(lr.lhs, br.lhs);
  if (c != 0) return c;
  return cmp(lr.rhs, br.rhs);
}

int cmp(const Spatial& a, const Spatial& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  switch (a.kind) {
    case Spatial::Kind::Emp: return 0;
    case Spatial::Kind::Cell: {
      int c = cmp(a.head, b.head);
      if (c != 0) return c;
      return cmp_vec(a.fields, b.fields);
    }
    case Spatial::Kind::Pred: {
      int c = a.pred.compare(b.pred);
      if (c != 0) return c < 0 ? -1 : 1;
      return cmp_vec(a.fields, b.fields);
    }
    case Spatial::Kind::Star:
    case Spatial::Kind::WStar: return cmp_vec(a.kids, b.kids);
    case Spatial::Kind::Scaled: {
      int c = cmp_vec(a.kids, b.kids);
      if (c != 0) return c;
      return cmp_vec(a.perm, b.perm);
    }
    case Spatial::Kind::Labeled: {
      int c = cmp_vec(a.label, b.label);
      if (c != 0) return c;
      return cmp_vec(a.kids, b.kids);
    }
  }
  return 0;
}

int cmp(const SymbolicHeap& a, const SymbolicHeap& b) {
  int c = cmp_vec(a.bound, b.bound);
  if (c != 0) return c;
  c = cmp(a.spatial, b.spatial);
  if (c != 0) return c;
  return cmp_vec(a.pure, b.pure);
}

}  // namespace slp
