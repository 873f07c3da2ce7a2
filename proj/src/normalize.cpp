#include "slp/normalize.hpp"

#include <cassert>

namespace slp {

namespace {

bool is_core(const Spatial& s) {
  return s.kind == Spatial::Kind::Cell || s.kind == Spatial::Kind::Pred;
}

// A matched atom in canonical shape: core, @l core, (core)^p, (@l core)^p.
bool is_atom_shape(const Spatial& s) {
  const Spatial* cur = &s;
  if (cur->kind == Spatial::Kind::Scaled) cur = &cur->kids[0];
  if (cur->kind == Spatial::Kind::Labeled) cur = &cur->kids[0];
  return is_core(*cur);
}

LabelTerm scale_components(const LabelTerm& l, const PermTerm& p) {
  switch (l.kind) {
    case LabelTerm::Kind::Strong:
      return LabelTerm::strong(scale_components(l.args[0], p), scale_components(l.args[1], p));
    case LabelTerm::Kind::Weak:
      return LabelTerm::weak(scale_components(l.args[0], p), scale_components(l.args[1], p));
    default: return LabelTerm::scaled(l, p);
  }
}

size_t subtree_size(const Spatial& s) {
  size_t n = 1;
  for (const auto& k : s.kids) n += subtree_size(k);
  return n;
}

// Termination potential: every scale/label wrapper sitting on a non-atomic
// subtree pays for that subtree. Each rewrite strictly reduces it.
size_t wrapper_potential(const Spatial& s) {
  size_t n = 0;
  if (s.kind == Spatial::Kind::Scaled && !is_atom_shape(s.kids[0]))
    n += 1 + subtree_size(s.kids[0]);
  if (s.kind == Spatial::Kind::Scaled && s.kids[0].kind == Spatial::Kind::Scaled)
    n += 1 + subtree_size(s.kids[0]);
  if (s.kind == Spatial::Kind::Labeled && !is_core(s.kids[0])) n += 1 + subtree_size(s.kids[0]);
  if (s.kind == Spatial::Kind::Scaled && s.perm[0].is_top()) n += 1;
  for (const auto& k : s.kids) n += wrapper_potential(k);
  return n;
}

struct Distributor {
  const PureCtx& ctx;
  bool rhs;
  std::vector<PureAtom>* out;

  // Returns true when `fact` already follows from the context; otherwise the
  // fact is emitted for the caller's side of the sequent.
  void note(PureAtom fact) {
    if (const auto* lr = std::get_if<LabelRel>(&fact)) {
      if (!lr->disjoint && ctx.eq_labels(lr->lhs, lr->rhs)) return;
      if (lr->disjoint && ctx.disjoint_labels(lr->lhs, lr->rhs)) return;
    }
    out->push_back(std::move(fact));
  }

  Spatial run(Spatial s) {
    for (;;) {
      size_t before = wrapper_potential(s);
      if (before == 0) return s;
      bool changed = false;
      s = step(std::move(s), changed);
      if (!changed) return s;
      size_t after = wrapper_potential(s);
      assert(after < before);
      (void)before;
      (void)after;
    }
  }

  // One innermost-leftmost rewrite per call.
  Spatial step(Spatial s, bool& changed) {
    for (auto& k : s.kids) {
      k = step(std::move(k), changed);
      if (changed) return s;
    }
    switch (s.kind) {
      case Spatial::Kind::Scaled: {
        Spatial& in = s.kids[0];
        const PermTerm& p = s.perm[0];
        if (p.is_top()) {
          changed = true;
          return std::move(in);
        }
        if (in.kind == Spatial::Kind::Emp) {
          changed = true;  // scaling an empty heap yields an empty heap
          return Spatial::emp();
        }
        if (in.kind == Spatial::Kind::Star ||
            (!rhs && in.kind == Spatial::Kind::WStar)) {
          std::vector<Spatial> kids;
          kids.reserve(in.kids.size());
          for (auto& k : in.kids) kids.push_back(Spatial::scaled(std::move(k), p));
          changed = true;
          Spatial out;
          out.kind = in.kind;
          out.kids = std::move(kids);
          return out;
        }
        if (!rhs && in.kind == Spatial::Kind::Scaled) {
          changed = true;
          return Spatial::scaled(std::move(in.kids[0]), perm_fold(PermTerm::mul(in.perm[0], p)));
        }
        if (in.kind == Spatial::Kind::Labeled && !is_core(in.kids[0])) {
          // (@l K)^p with a compound K: the label names K's heap directly.
          auto comp = footprint_label(in.kids[0]);
          if (comp) {
            note(mk_label_eq(in.label[0], *comp));
            changed = true;
            return Spatial::scaled(std::move(in.kids[0]), p);
          }
        }
        return s;
      }
      case Spatial::Kind::Labeled: {
        Spatial& in = s.kids[0];
        const LabelTerm& l = s.label[0];
        if (in.kind == Spatial::Kind::Emp) {
          // @l emp pins l to the empty region, disjoint from everything.
          note(mk_disjoint(l, l));
          changed = true;
          return Spatial::emp();
        }
        if (in.kind == Spatial::Kind::Labeled) {
          note(mk_label_eq(l, in.label[0]));
          changed = true;
          return std::move(in);
        }
        if (in.kind == Spatial::Kind::Star || in.kind == Spatial::Kind::WStar) {
          auto comp = footprint_label(in);
          if (comp) {
            note(mk_label_eq(l, *comp));
            changed = true;
            return std::move(in);
          }
          return s;
        }
        if (in.kind == Spatial::Kind::Scaled) {
          // @l (K^p): the label names the scaled heap.
          auto comp = footprint_label(in);
          if (comp) {
            note(mk_label_eq(l, *comp));
            changed = true;
            return std::move(in);
          }
          return s;
        }
        return s;  // labeled core atom: canonical
      }
      default: return s;
    }
  }
};

}  // namespace

std::optional<LabelTerm> footprint_label(const Spatial& s) {
  switch (s.kind) {
    case Spatial::Kind::Emp: return std::nullopt;  // callers skip emp leaves
    case Spatial::Kind::Cell:
    case Spatial::Kind::Pred: return std::nullopt;
    case Spatial::Kind::Labeled: return s.label[0];
    case Spatial::Kind::Scaled: {
      auto inner = footprint_label(s.kids[0]);
      if (!inner) return std::nullopt;
      return scale_components(*inner, s.perm[0]);
    }
    case Spatial::Kind::Star:
    case Spatial::Kind::WStar: {
      std::optional<LabelTerm> acc;
      for (const auto& k : s.kids) {
        if (k.is_emp()) continue;
        auto fl = footprint_label(k);
        if (!fl) return std::nullopt;
        if (!acc)
          acc = *fl;
        else
          acc = s.kind == Spatial::Kind::Star ? LabelTerm::strong(*acc, *fl)
                                              : LabelTerm::weak(*acc, *fl);
      }
      return acc;
    }
  }
  return std::nullopt;
}

RewriteResult push_scale_inward(const Spatial& s, const PureCtx& ctx) {
  RewriteResult res;
  Distributor d{ctx, false, &res.emitted};
  res.spatial = ac_normalize(d.run(ac_normalize(s)));
  return res;
}

RewriteResult push_scale_inward_rhs(const Spatial& s, const PureCtx& ctx) {
  RewriteResult res;
  Distributor d{ctx, true, &res.emitted};
  res.spatial = ac_normalize(d.run(ac_normalize(s)));
  return res;
}

// ---------------------------------------------------------------------------
// Weak-to-strong recovery
// ---------------------------------------------------------------------------

namespace {

struct AtomParts {
  LabelTerm label;          // present for every joinable atom
  std::vector<PermTerm> scales;
  const Spatial* core = nullptr;
};

std::optional<AtomParts> atom_parts(const Spatial& s) {
  AtomParts out;
  const Spatial* cur = &s;
  while (cur->kind == Spatial::Kind::Scaled) {
    out.scales.push_back(cur->perm[0]);
    cur = &cur->kids[0];
  }
  if (cur->kind != Spatial::Kind::Labeled) return std::nullopt;
  out.label = cur->label[0];
  cur = &cur->kids[0];
  if (!is_core(*cur)) return std::nullopt;
  out.core = cur;
  return out;
}

PermTerm scales_product(const std::vector<PermTerm>& ss) {
  if (ss.empty()) return PermTerm::top();
  PermTerm acc = ss.back();  // innermost first
  for (auto it = std::next(ss.rbegin()); it != ss.rend(); ++it) acc = PermTerm::mul(acc, *it);
  return acc;
}

bool same_core(const PureCtx& ctx, const Spatial& a, const Spatial& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Spatial::Kind::Cell) {
    if (a.fields.size() != b.fields.size()) return false;
    if (!ctx.eq_values(a.head, b.head)) return false;
    for (size_t i = 0; i < a.fields.size(); ++i)
      if (!ctx.eq_values(a.fields[i], b.fields[i])) return false;
    return true;
  }
  if (a.pred != b.pred || a.fields.size() != b.fields.size()) return false;
  for (size_t i = 0; i < a.fields.size(); ++i)
    if (!ctx.eq_values(a.fields[i], b.fields[i])) return false;
  return true;
}

// group i of a weak conjunction: its top-level strong atoms
std::vector<const Spatial*> group_atoms(const Spatial& g) {
  std::vector<const Spatial*> out;
  if (g.kind == Spatial::Kind::Star) {
    for (const auto& k : g.kids)
      if (is_atom_shape(k)) out.push_back(&k);
  } else if (is_atom_shape(g)) {
    out.push_back(&g);
  }
  return out;
}

Spatial group_without(const Spatial& g, const Spatial* removed) {
  if (&g == removed) return Spatial::emp();
  if (g.kind != Spatial::Kind::Star) return g;
  std::vector<Spatial> kids;
  for (const auto& k : g.kids)
    if (&k != removed) kids.push_back(k);
  return Spatial::star(std::move(kids));
}

struct Measure {
  size_t atoms = 0;
  size_t weak_edges = 0;
};

Measure measure_of(const Spatial& s) {
  Measure m;
  if (is_core(s)) m.atoms = 1;
  if (s.kind == Spatial::Kind::WStar) m.weak_edges += s.kids.size();
  for (const auto& k : s.kids) {
    Measure km = measure_of(k);
    m.atoms += km.atoms;
    m.weak_edges += km.weak_edges;
  }
  return m;
}

bool measure_lt(const Measure& a, const Measure& b) {
  if (a.atoms != b.atoms) return a.atoms < b.atoms;
  return a.weak_edges < b.weak_edges;
}

struct Strengthener {
  const PureCtx& ctx;

  bool sum_defined(const PermTerm& a, const PermTerm& b) const {
    // provably a + b <= 1
    return ctx.entails(mk_perm_eq(PermTerm::add(a, b), PermTerm::add(a, b))) ==
           Entailment::Valid;
  }

  // One rewrite somewhere in the tree; innermost first.
  Spatial step(Spatial s, bool& changed) {
    for (auto& k : s.kids) {
      k = step(std::move(k), changed);
      if (changed) return s;
    }
    if (s.kind != Spatial::Kind::WStar) return s;

    // Shared-part join: (A^p1 * B) (+) (A^p2 * C) becomes A^(p1(+)p2) * (B (+) C).
    for (size_t i = 0; i < s.kids.size(); ++i) {
      for (size_t j = i + 1; j < s.kids.size(); ++j) {
        auto ai = group_atoms(s.kids[i]);
        auto aj = group_atoms(s.kids[j]);
        for (const Spatial* pa : ai) {
          auto pi = atom_parts(*pa);
          if (!pi) continue;
          for (const Spatial* pb : aj) {
            auto pj = atom_parts(*pb);
            if (!pj) continue;
            if (!ctx.eq_labels(pi->label, pj->label)) continue;
            if (!same_core(ctx, *pi->core, *pj->core)) continue;
            PermTerm ei = scales_product(pi->scales), ej = scales_product(pj->scales);
            if (!sum_defined(ei, ej)) continue;

            Spatial joined = atom(pi->label, *pi->core, perm_fold(PermTerm::add(ei, ej)));
            Spatial rest_i = group_without(s.kids[i], pa);
            Spatial rest_j = group_without(s.kids[j], pb);
            std::vector<Spatial> rests;
            if (!rest_i.is_emp()) rests.push_back(std::move(rest_i));
            if (!rest_j.is_emp()) rests.push_back(std::move(rest_j));
            std::vector<Spatial> star_kids;
            star_kids.push_back(std::move(joined));
            if (rests.size() == 2)
              star_kids.push_back(Spatial::wstar(std::move(rests)));
            else if (rests.size() == 1)
              star_kids.push_back(std::move(rests[0]));

            std::vector<Spatial> new_children;
            for (size_t k2 = 0; k2 < s.kids.size(); ++k2)
              if (k2 != i && k2 != j) new_children.push_back(s.kids[k2]);
            new_children.push_back(Spatial::star(std::move(star_kids)));
            changed = true;
            return Spatial::wstar(std::move(new_children));
          }
        }
      }
    }

    // Disjointness upgrade: children with provably disjoint footprints
    // separate strongly.
    for (size_t i = 0; i < s.kids.size(); ++i) {
      auto fi = footprint_label(s.kids[i]);
      if (!fi) continue;
      for (size_t j = i + 1; j < s.kids.size(); ++j) {
        auto fj = footprint_label(s.kids[j]);
        if (!fj) continue;
        if (!ctx.disjoint_labels(*fi, *fj)) continue;
        std::vector<Spatial> star_kids{s.kids[i], s.kids[j]};
        std::vector<Spatial> new_children;
        for (size_t k2 = 0; k2 < s.kids.size(); ++k2)
          if (k2 != i && k2 != j) new_children.push_back(s.kids[k2]);
        new_children.push_back(Spatial::star(std::move(star_kids)));
        changed = true;
        return Spatial::wstar(std::move(new_children));
      }
    }
    return s;
  }
};

}  // namespace

SymbolicHeap strengthen_separation(const SymbolicHeap& sh) {
  PureCtx ctx(sh.pure);
  Strengthener st{ctx};
  SymbolicHeap out = sh;
  out.spatial = ac_normalize(out.spatial);
  for (;;) {
    bool changed = false;
    Measure before = measure_of(out.spatial);
    Spatial next = st.step(std::move(out.spatial), changed);
    next = ac_normalize(std::move(next));
    if (!changed) {
      out.spatial = std::move(next);
      return out;
    }
    Measure after = measure_of(next);
    assert(measure_lt(after, before));
    (void)before;
    (void)after;
    out.spatial = std::move(next);
  }
}

}  // namespace slp
