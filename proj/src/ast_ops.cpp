#include "slp/ast_ops.hpp"

#include <algorithm>

namespace slp {

// --------------------------------------------------------------------------
// Free variables
// --------------------------------------------------------------------------

void free_vars_into(const ArithTerm& t, std::set<VarId>& out) {
  switch (t.kind) {
    case ArithTerm::Kind::Var:
      if (!is_nil(t.var)) out.insert(t.var);
      break;
    case ArithTerm::Kind::Const: break;
    case ArithTerm::Kind::Add:
      for (const auto& a : t.args) free_vars_into(a, out);
      break;
  }
}

void free_vars_into(const PermTerm& t, std::set<VarId>& out) {
  switch (t.kind) {
    case PermTerm::Kind::Var: out.insert(t.var); break;
    case PermTerm::Kind::Const: break;
    default:
      for (const auto& a : t.args) free_vars_into(a, out);
      break;
  }
}

void free_vars_into(const LabelTerm& t, std::set<VarId>& out) {
  switch (t.kind) {
    case LabelTerm::Kind::Var: out.insert(t.var); break;
    case LabelTerm::Kind::Scaled:
      free_vars_into(t.args[0], out);
      free_vars_into(t.scale[0], out);
      break;
    default:
      for (const auto& a : t.args) free_vars_into(a, out);
      break;
  }
}

void free_vars_into(const PureAtom& a, std::set<VarId>& out) {
  if (const auto* ar = std::get_if<ArithRel>(&a)) {
    free_vars_into(ar->lhs, out);
    free_vars_into(ar->rhs, out);
  } else if (const auto* pr = std::get_if<PermRel>(&a)) {
    free_vars_into(pr->lhs, out);
    free_vars_into(pr->rhs, out);
  } else {
    const auto& lr = std::get<LabelRel>(a);
    free_vars_into(lr.lhs, out);
    free_vars_into(lr.rhs, out);
  }
}

void free_vars_into(const Spatial& s, std::set<VarId>& out) {
  switch (s.kind) {
    case Spatial::Kind::Emp: break;
    case Spatial::Kind::Cell:
      if (!is_nil(s.head)) out.insert(s.head);
      for (const auto& f : s.fields)
        if (!is_nil(f)) out.insert(f);
      break;
    case Spatial::Kind::Pred:
      for (const auto& f : s.fields)
        if (!is_nil(f)) out.insert(f);
      break;
    case Spatial::Kind::Scaled:
      free_vars_into(s.perm[0], out);
      free_vars_into(s.kids[0], out);
      break;
    case Spatial::Kind::Labeled:
      free_vars_into(s.label[0], out);
      free_vars_into(s.kids[0], out);
      break;
    default:
      for (const auto& k : s.kids) free_vars_into(k, out);
      break;
  }
}

std::set<VarId> free_vars(const Spatial& s) {
  std::set<VarId> out;
  free_vars_into(s, out);
  return out;
}

std::set<VarId> free_vars(const SymbolicHeap& sh) {
  std::set<VarId> out;
  free_vars_into(sh.spatial, out);
  for (const auto& a : sh.pure) free_vars_into(a, out);
  for (const auto& b : sh.bound) out.erase(b);
  return out;
}

std::set<VarId> free_vars(const Formula& f) {
  std::set<VarId> out;
  for (const auto& d : f.disjuncts) {
    auto s = free_vars(d);
    out.insert(s.begin(), s.end());
  }
  return out;
}

std::set<VarId> all_vars(const SymbolicHeap& sh) {
  std::set<VarId> out;
  free_vars_into(sh.spatial, out);
  for (const auto& a : sh.pure) free_vars_into(a, out);
  for (const auto& b : sh.bound) out.insert(b);
  return out;
}

// --------------------------------------------------------------------------
// Substitution
// --------------------------------------------------------------------------

void Subst::add_var(const VarId& from, const VarId& to) {
  // Program and logical value variables share the value sort; labels do not.
  if ((from.kind == VarKind::Label) != (to.kind == VarKind::Label))
    throw SubstError("kind mismatch replacing " + from.name + " by " + to.name);
  if (from.kind == VarKind::Label)
    lab[from] = LabelTerm::mk_var(to);
  else
    val[from] = ArithTerm::mk_var(to);
}

void Subst::add_val(const VarId& from, ArithTerm t) {
  if (from.kind == VarKind::Label) throw SubstError("kind mismatch: value term for label " + from.name);
  val[from] = std::move(t);
}

void Subst::add_perm(const VarId& from, PermTerm t) {
  if (from.kind != VarKind::Logical) throw SubstError("kind mismatch: permission term for " + from.name);
  perm[from] = std::move(t);
}

void Subst::add_label(const VarId& from, LabelTerm t) {
  if (from.kind != VarKind::Label) throw SubstError("kind mismatch: label term for " + from.name);
  lab[from] = std::move(t);
}

std::set<VarId> Subst::range_vars() const {
  std::set<VarId> out;
  for (const auto& [k, v] : val) free_vars_into(v, out);
  for (const auto& [k, v] : perm) free_vars_into(v, out);
  for (const auto& [k, v] : lab) free_vars_into(v, out);
  return out;
}

void Subst::erase(const VarId& v) {
  val.erase(v);
  perm.erase(v);
  lab.erase(v);
}

bool Subst::maps(const VarId& v) const {
  return val.count(v) || perm.count(v) || lab.count(v);
}

ArithTerm subst(const ArithTerm& t, const Subst& m) {
  switch (t.kind) {
    case ArithTerm::Kind::Var: {
      auto it = m.val.find(t.var);
      return it != m.val.end() ? it->second : t;
    }
    case ArithTerm::Kind::Const: return t;
    case ArithTerm::Kind::Add:
      return ArithTerm::add(subst(t.args[0], m), subst(t.args[1], m));
  }
  return t;
}

PermTerm subst(const PermTerm& t, const Subst& m) {
  switch (t.kind) {
    case PermTerm::Kind::Var: {
      auto it = m.perm.find(t.var);
      return it != m.perm.end() ? it->second : t;
    }
    case PermTerm::Kind::Const: return t;
    case PermTerm::Kind::Add:
      return PermTerm::add(subst(t.args[0], m), subst(t.args[1], m));
    case PermTerm::Kind::Mul:
      return PermTerm::mul(subst(t.args[0], m), subst(t.args[1], m));
  }
  return t;
}

LabelTerm subst(const LabelTerm& t, const Subst& m) {
  switch (t.kind) {
    case LabelTerm::Kind::Var: {
      auto it = m.lab.find(t.var);
      return it != m.lab.end() ? it->second : t;
    }
    case LabelTerm::Kind::Strong:
      return LabelTerm::strong(subst(t.args[0], m), subst(t.args[1], m));
    case LabelTerm::Kind::Weak:
      return LabelTerm::weak(subst(t.args[0], m), subst(t.args[1], m));
    case LabelTerm::Kind::Scaled:
      return LabelTerm::scaled(subst(t.args[0], m), subst(t.scale[0], m));
  }
  return t;
}

PureAtom subst(const PureAtom& a, const Subst& m) {
  if (const auto* ar = std::get_if<ArithRel>(&a))
    return ArithRel{ar->neq, subst(ar->lhs, m), subst(ar->rhs, m)};
  if (const auto* pr = std::get_if<PermRel>(&a))
    return PermRel{subst(pr->lhs, m), subst(pr->rhs, m)};
  const auto& lr = std::get<LabelRel>(a);
  if (lr.disjoint) return mk_disjoint(subst(lr.lhs, m), subst(lr.rhs, m));
  return LabelRel{false, subst(lr.lhs, m), subst(lr.rhs, m)};
}

namespace {

VarId subst_spatial_var(const VarId& v, const Subst& m) {
  auto it = m.val.find(v);
  if (it == m.val.end()) return v;
  if (it->second.kind != ArithTerm::Kind::Var)
    throw SubstError("non-variable term substituted into a spatial position for " + v.name);
  return it->second.var;
}

}  // namespace

Spatial subst(const Spatial& s, const Subst& m) {
  switch (s.kind) {
    case Spatial::Kind::Emp: return s;
    case Spatial::Kind::Cell: {
      std::vector<VarId> fs;
      fs.reserve(s.fields.size());
      for (const auto& f : s.fields) fs.push_back(subst_spatial_var(f, m));
      return Spatial::cell(subst_spatial_var(s.head, m), std::move(fs));
    }
    case Spatial::Kind::Pred: {
      std::vector<VarId> fs;
      fs.reserve(s.fields.size());
      for (const auto& f : s.fields) fs.push_back(subst_spatial_var(f, m));
      return Spatial::mk_pred(s.pred, std::move(fs), s.unfold_depth);
    }
    case Spatial::Kind::Scaled:
      return Spatial::scaled(subst(s.kids[0], m), subst(s.perm[0], m));
    case Spatial::Kind::Labeled:
      return Spatial::labeled(subst(s.label[0], m), subst(s.kids[0], m));
    case Spatial::Kind::Star:
    case Spatial::Kind::WStar: {
      std::vector<Spatial> ks;
      ks.reserve(s.kids.size());
      for (const auto& k : s.kids) ks.push_back(subst(k, m));
      Spatial out;
      out.kind = s.kind;
      out.kids = std::move(ks);
      return out;
    }
  }
  return s;
}

SymbolicHeap subst(const SymbolicHeap& sh, const Subst& m) {
  Subst eff = m;
  for (const auto& b : sh.bound) eff.erase(b);

  SymbolicHeap cur = sh;
  // Capture avoidance: rename binders that occur in the substitution's range.
  std::set<VarId> range = eff.range_vars();
  bool clash = false;
  for (const auto& b : cur.bound)
    if (range.count(b)) clash = true;
  if (clash) {
    std::set<VarId> avoid = all_vars(cur);
    avoid.insert(range.begin(), range.end());
    cur = fresh_rename(cur, avoid);
  }
  if (eff.empty()) return cur;

  SymbolicHeap out;
  out.bound = cur.bound;
  out.spatial = subst(cur.spatial, eff);
  out.pure.reserve(cur.pure.size());
  for (const auto& a : cur.pure) out.pure.push_back(subst(a, eff));
  return out;
}

Formula subst(const Formula& f, const Subst& m) {
  Formula out;
  out.disjuncts.reserve(f.disjuncts.size());
  for (const auto& d : f.disjuncts) out.disjuncts.push_back(subst(d, m));
  return out;
}

// --------------------------------------------------------------------------
// Fresh names
// --------------------------------------------------------------------------

void FreshGen::reserve(const std::set<VarId>& vs) {
  for (const auto& v : vs) used_.insert(v.name);
}

void FreshGen::reserve(const VarId& v) { used_.insert(v.name); }

VarId FreshGen::fresh(const VarId& base) { return fresh_like(base.name, base.kind); }

VarId FreshGen::fresh_like(const std::string& base_name, VarKind kind) {
  // Strip a trailing numeric suffix so w3 renames to w4, not w31.
  std::string stem = base_name;
  while (stem.size() > 1 && isdigit(static_cast<unsigned char>(stem.back()))) stem.pop_back();
  if (stem.empty()) stem = "v";
  if (stem != "nil" && !used_.count(stem) && stem == base_name) {
    used_.insert(stem);
    return VarId{stem, kind};
  }
  for (int i = 1;; ++i) {
    std::string cand = stem + std::to_string(i);
    if (!used_.count(cand)) {
      used_.insert(cand);
      return VarId{cand, kind};
    }
  }
}

namespace {

void scan_uses(const ArithTerm& t, std::map<VarId, VarUse>& out) {
  if (t.kind == ArithTerm::Kind::Var) out.emplace(t.var, VarUse::Value);
  for (const auto& a : t.args) scan_uses(a, out);
}
void scan_uses(const PermTerm& t, std::map<VarId, VarUse>& out) {
  if (t.kind == PermTerm::Kind::Var) out.emplace(t.var, VarUse::Perm);
  for (const auto& a : t.args) scan_uses(a, out);
}
void scan_uses(const LabelTerm& t, std::map<VarId, VarUse>& out) {
  if (t.kind == LabelTerm::Kind::Var) out.emplace(t.var, VarUse::Label);
  for (const auto& a : t.args) scan_uses(a, out);
  for (const auto& p : t.scale) scan_uses(p, out);
}
void scan_uses(const PureAtom& a, std::map<VarId, VarUse>& out) {
  if (const auto* ar = std::get_if<ArithRel>(&a)) {
    scan_uses(ar->lhs, out);
    scan_uses(ar->rhs, out);
  } else if (const auto* pr = std::get_if<PermRel>(&a)) {
    scan_uses(pr->lhs, out);
    scan_uses(pr->rhs, out);
  } else {
    const auto& lr = std::get<LabelRel>(a);
    scan_uses(lr.lhs, out);
    scan_uses(lr.rhs, out);
  }
}
void scan_uses(const Spatial& s, std::map<VarId, VarUse>& out) {
  if (s.kind == Spatial::Kind::Cell) {
    out.emplace(s.head, VarUse::Value);
    for (const auto& f : s.fields) out.emplace(f, VarUse::Value);
  } else if (s.kind == Spatial::Kind::Pred) {
    for (const auto& f : s.fields) out.emplace(f, VarUse::Value);
  }
  for (const auto& p : s.perm) scan_uses(p, out);
  for (const auto& l : s.label) scan_uses(l, out);
  for (const auto& k : s.kids) scan_uses(k, out);
}

}  // namespace

std::map<VarId, VarUse> var_uses(const SymbolicHeap& sh) {
  std::map<VarId, VarUse> out;
  scan_uses(sh.spatial, out);
  for (const auto& a : sh.pure) scan_uses(a, out);
  return out;
}

VarUse use_of(const std::map<VarId, VarUse>& uses, const VarId& v) {
  auto it = uses.find(v);
  if (it != uses.end()) return it->second;
  return v.kind == VarKind::Label ? VarUse::Label : VarUse::Value;
}

void add_renaming(Subst& s, const VarId& from, const VarId& to, VarUse use) {
  switch (use) {
    case VarUse::Label: s.add_label(from, LabelTerm::mk_var(to)); break;
    case VarUse::Perm: s.add_perm(from, PermTerm::mk_var(to)); break;
    case VarUse::Value: s.add_val(from, ArithTerm::mk_var(to)); break;
  }
}

SymbolicHeap fresh_rename(const SymbolicHeap& sh, const std::set<VarId>& avoid) {
  FreshGen gen;
  gen.reserve(avoid);
  return fresh_rename(sh, avoid, gen);
}

SymbolicHeap fresh_rename(const SymbolicHeap& sh, const std::set<VarId>& avoid, FreshGen& gen) {
  gen.reserve(all_vars(sh));
  std::set<std::string> avoid_names;
  for (const auto& v : avoid) avoid_names.insert(v.name);
  auto uses = var_uses(sh);
  Subst ren;
  std::vector<VarId> new_bound;
  new_bound.reserve(sh.bound.size());
  for (const auto& b : sh.bound) {
    // collision by name: two variables spelled alike shadow each other in
    // every later context, whatever their kinds
    if (!avoid_names.count(b.name)) {
      new_bound.push_back(b);
      continue;
    }
    VarId nb = gen.fresh(b);
    add_renaming(ren, b, nb, use_of(uses, b));
    new_bound.push_back(nb);
  }
  if (ren.empty()) return sh;

  SymbolicHeap body;  // substitute under the binders directly
  body.spatial = subst(sh.spatial, ren);
  for (const auto& a : sh.pure) body.pure.push_back(subst(a, ren));
  body.bound = std::move(new_bound);
  return body;
}

// --------------------------------------------------------------------------
// AC normal form
// --------------------------------------------------------------------------

namespace {

void collect_ac(Spatial&& s, Spatial::Kind kind, std::vector<Spatial>& out) {
  if (s.kind == kind) {
    for (auto& k : s.kids) collect_ac(std::move(k), kind, out);
  } else if (s.kind != Spatial::Kind::Emp) {
    out.push_back(std::move(s));
  }
}

}  // namespace

Spatial ac_normalize(const Spatial& s) {
  switch (s.kind) {
    case Spatial::Kind::Emp:
    case Spatial::Kind::Cell:
    case Spatial::Kind::Pred: return s;
    case Spatial::Kind::Scaled:
      return Spatial::scaled(ac_normalize(s.kids[0]), s.perm[0]);
    case Spatial::Kind::Labeled:
      return Spatial::labeled(s.label[0], ac_normalize(s.kids[0]));
    case Spatial::Kind::Star:
    case Spatial::Kind::WStar: {
      std::vector<Spatial> flat;
      for (const auto& k : s.kids) collect_ac(ac_normalize(k), s.kind, flat);
      std::stable_sort(flat.begin(), flat.end(),
                       [](const Spatial& a, const Spatial& b) { return cmp(a, b) < 0; });
      if (flat.empty()) return Spatial::emp();
      if (flat.size() == 1) return std::move(flat.front());
      Spatial out;
      out.kind = s.kind;
      out.kids = std::move(flat);
      return out;
    }
  }
  return s;
}

SymbolicHeap ac_normalize(const SymbolicHeap& sh) {
  SymbolicHeap out = sh;
  out.spatial = ac_normalize(sh.spatial);
  return out;
}

PermTerm perm_fold(const PermTerm& t) {
  if (t.kind != PermTerm::Kind::Add && t.kind != PermTerm::Kind::Mul) return t;
  PermTerm a = perm_fold(t.args[0]);
  PermTerm b = perm_fold(t.args[1]);
  if (a.kind == PermTerm::Kind::Const && b.kind == PermTerm::Kind::Const) {
    if (t.kind == PermTerm::Kind::Mul) return PermTerm::mk_const(a.value * b.value);
    Rat sum = a.value + b.value;
    if (sum <= 1) return PermTerm::mk_const(sum);
  }
  return t.kind == PermTerm::Kind::Add ? PermTerm::add(std::move(a), std::move(b))
                                       : PermTerm::mul(std::move(a), std::move(b));
}

}  // namespace slp
