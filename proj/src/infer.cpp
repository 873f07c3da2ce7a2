#include "slp/infer.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "slp/print.hpp"

namespace slp {

namespace {

// ---------------------------------------------------------------------------
// Atom access within a spatial tree (through * and (+) nodes only)
// ---------------------------------------------------------------------------

bool is_core(const Spatial& s) {
  return s.kind == Spatial::Kind::Cell || s.kind == Spatial::Kind::Pred;
}

struct AtomRef {
  std::vector<int> path;
  bool strong_path = true;  // every chain node on the way down is *
  std::optional<LabelTerm> label;
  std::vector<PermTerm> scales;  // outermost first
  const Spatial* core = nullptr;
  const Spatial* node = nullptr;
};

std::optional<AtomRef> decompose_atom(const Spatial& s) {
  AtomRef ref;
  const Spatial* cur = &s;
  while (cur->kind == Spatial::Kind::Scaled) {
    ref.scales.push_back(cur->perm[0]);
    cur = &cur->kids[0];
  }
  if (cur->kind == Spatial::Kind::Labeled) {
    ref.label = cur->label[0];
    cur = &cur->kids[0];
  }
  if (!is_core(*cur)) return std::nullopt;
  ref.core = cur;
  ref.node = &s;
  return ref;
}

void atoms_rec(const Spatial& s, std::vector<int>& path, bool strong,
               std::vector<AtomRef>& out) {
  if (s.kind == Spatial::Kind::Star || s.kind == Spatial::Kind::WStar) {
    bool strong2 = strong && s.kind == Spatial::Kind::Star;
    for (int i = 0; i < static_cast<int>(s.kids.size()); ++i) {
      path.push_back(i);
      atoms_rec(s.kids[i], path, strong2, out);
      path.pop_back();
    }
    return;
  }
  auto ref = decompose_atom(s);
  if (ref) {
    ref->path = path;
    ref->strong_path = strong;
    out.push_back(std::move(*ref));
  }
}

std::vector<AtomRef> atoms_of(const Spatial& root) {
  std::vector<AtomRef> out;
  std::vector<int> path;
  atoms_rec(root, path, true, out);
  return out;
}

// Structural surgery: plants the replacement without normalizing, so other
// recorded paths into the same tree stay valid. Callers normalize the final
// result once.
Spatial replace_at(const Spatial& root, const std::vector<int>& path, const Spatial& repl,
                   size_t i = 0) {
  if (i == path.size()) return repl;
  Spatial out = root;
  out.kids[path[i]] = replace_at(root.kids[path[i]], path, repl, i + 1);
  return out;
}

Spatial remove_at(const Spatial& root, const std::vector<int>& path) {
  return replace_at(root, path, Spatial::emp());
}

// Subtrees guaranteed domain-disjoint from the atom at `path`: the other
// children of every * node along the way.
std::vector<const Spatial*> strong_siblings(const Spatial& root, const std::vector<int>& path) {
  std::vector<const Spatial*> out;
  const Spatial* cur = &root;
  for (int idx : path) {
    if (cur->kind == Spatial::Kind::Star) {
      for (int i = 0; i < static_cast<int>(cur->kids.size()); ++i)
        if (i != idx) out.push_back(&cur->kids[i]);
    }
    cur = &cur->kids[idx];
  }
  return out;
}

// Does removing this atom leave something it is *-separated from?
bool has_strong_sibling(const Spatial& root, const std::vector<int>& path) {
  return !strong_siblings(root, path).empty();
}

// Are two atoms *-separated from each other (their lowest common chain node
// is a *)?
bool strongly_separated(const Spatial& root, const std::vector<int>& a,
                        const std::vector<int>& b) {
  const Spatial* cur = &root;
  size_t i = 0;
  while (i < a.size() && i < b.size() && a[i] == b[i]) {
    cur = &cur->kids[a[i]];
    ++i;
  }
  return cur->kind == Spatial::Kind::Star;
}

LabelTerm strip_label_scales(const LabelTerm& t) {
  switch (t.kind) {
    case LabelTerm::Kind::Var: return t;
    case LabelTerm::Kind::Scaled: return strip_label_scales(t.args[0]);
    case LabelTerm::Kind::Strong:
      return LabelTerm::strong(strip_label_scales(t.args[0]), strip_label_scales(t.args[1]));
    case LabelTerm::Kind::Weak:
      return LabelTerm::weak(strip_label_scales(t.args[0]), strip_label_scales(t.args[1]));
  }
  return t;
}

PermTerm fold_scales(const std::vector<PermTerm>& ss) {
  if (ss.empty()) return PermTerm::top();
  PermTerm acc = ss.back();
  for (auto it = std::next(ss.rbegin()); it != ss.rend(); ++it)
    acc = perm_fold(PermTerm::mul(acc, *it));
  return acc;
}

void add_atom_unique(std::vector<PureAtom>& pure, PureAtom a) {
  for (const auto& p : pure)
    if (equal(p, a)) return;
  pure.push_back(std::move(a));
}

bool occurs_in(const VarId& v, const SymbolicHeap& sh) {
  auto fv = free_vars(sh);
  return fv.count(v) > 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

InferEngine::InferEngine(const DefEnv& env, SearchLimits lim, SolverCfg solver)
    : env_(env), lim_(lim), solver_(std::move(solver)) {
  for (const auto& [name, def] : env.preds)
    for (const auto& rule : def.rules) {
      names_.reserve(all_vars(rule.body));
      for (const auto& p : rule.params) names_.reserve(p);
      names_.reserve(rule.label_param);
    }
}

Sequent InferEngine::make_sequent(const SymbolicHeap& lhs, const SymbolicHeap& rhs) {
  Sequent s;
  std::set<VarId> avoid = free_vars(lhs);
  {
    auto rv = free_vars(rhs);
    avoid.insert(rv.begin(), rv.end());
  }
  names_.reserve(avoid);

  SymbolicHeap l = fresh_rename(lhs, avoid, names_);
  for (const auto& b : l.bound) avoid.insert(b);
  l.bound.clear();

  SymbolicHeap r = fresh_rename(rhs, avoid, names_);
  for (const auto& b : r.bound) s.inst.insert(b);
  r.bound.clear();

  std::set<VarId> lfree = free_vars(l);
  for (const auto& v : free_vars(r))
    if (!lfree.count(v) && v.kind != VarKind::Program) s.inst.insert(v);

  PureCtx lctx(l.pure, solver_);
  auto lr = push_scale_inward(l.spatial, lctx);
  l.spatial = lr.spatial;
  for (auto& a : lr.emitted) add_atom_unique(l.pure, std::move(a));
  // recover strong separation the hypothesis's own facts justify
  l = strengthen_separation(l);

  PureCtx rctx(r.pure, solver_);
  auto rr = push_scale_inward_rhs(r.spatial, rctx);
  r.spatial = rr.spatial;
  for (auto& a : rr.emitted) add_atom_unique(r.pure, std::move(a));

  s.lhs = ac_normalize(l);
  s.rhs = ac_normalize(r);
  return s;
}

// ---------------------------------------------------------------------------
// Steps
// ---------------------------------------------------------------------------

StepResult InferEngine::step_hypothesis(const Sequent& s) {
  StepResult out;
  if (s.rhs.pure.empty()) return out;
  PureCtx ctx(s.lhs.pure, solver_);
  std::vector<PureAtom> rest;
  bool any = false;
  for (const auto& a : s.rhs.pure) {
    if (ctx.entails(a) == Entailment::Valid)
      any = true;
    else
      rest.push_back(a);
  }
  if (!any) return out;
  out.applied = true;
  out.rule = "hypothesis";
  Sequent prem = s;
  prem.rhs.pure = std::move(rest);
  out.premises.push_back(std::move(prem));
  return out;
}

// Matching machinery shared by the match and goal-structure steps.
namespace {

struct MatchCtx {
  const Sequent& s;
  PureCtx lctx;
  InferEngine* eng;
  const SolverCfg& solver;

  MatchCtx(const Sequent& seq, InferEngine* e, const SolverCfg& cfg)
      : s(seq), lctx(seq.lhs.pure, cfg), eng(e), solver(cfg) {}

  bool free_inst(const VarId& v) const {
    if (!s.inst.count(v)) return false;
    return !occurs_in(v, s.lhs);
  }

  bool same_core(const Spatial& l, const Spatial& r) const {
    if (l.kind != r.kind) return false;
    if (l.kind == Spatial::Kind::Pred && (l.pred != r.pred)) return false;
    return l.fields.size() == r.fields.size();
  }

  // Accumulated effects of one candidate pairing.
  struct Effects {
    std::vector<PureAtom> lhs_eqs;
    std::vector<PureAtom> rhs_obligations;
    Subst bind;
    bool ok = true;

    void bind_value(const VarId& rv, const VarId& lv) {
      lhs_eqs.push_back(mk_eq(ArithTerm::mk_var(rv), ArithTerm::mk_var(lv)));
      if (!(rv == lv)) bind.add_var(rv, lv);
    }
  };

  // Head/argument matching for cores.
  bool match_core(const Spatial& l, const Spatial& r, Effects& eff) {
    if (!same_core(l, r)) return false;
    if (l.kind == Spatial::Kind::Cell) {
      if (!lctx.eq_values(l.head, r.head)) return false;
      for (size_t i = 0; i < l.fields.size(); ++i) {
        const VarId& rf = r.fields[i];
        const VarId& lf = l.fields[i];
        if (free_inst(rf) && !eff.bind.maps(rf)) {
          eff.bind_value(rf, lf);
        } else if (lctx.eq_values(lf, rf)) {
          // already settled
        } else {
          eff.rhs_obligations.push_back(mk_eq(ArithTerm::mk_var(lf), ArithTerm::mk_var(rf)));
        }
      }
      return true;
    }
    for (size_t i = 0; i < l.fields.size(); ++i) {
      const VarId& rf = r.fields[i];
      const VarId& lf = l.fields[i];
      if (free_inst(rf) && !eff.bind.maps(rf)) {
        eff.bind_value(rf, lf);
      } else if (!lctx.eq_values(lf, rf)) {
        return false;  // predicate arguments must align
      }
    }
    return true;
  }

  bool match_label(const AtomRef& l, const AtomRef& r, Effects& eff) {
    if (!r.label) return true;  // unlabeled goal claims less
    if (!l.label) return false;
    const LabelTerm& rt = *r.label;
    if (rt.kind == LabelTerm::Kind::Var && free_inst(rt.var) && !eff.bind.maps(rt.var)) {
      eff.lhs_eqs.push_back(mk_label_eq(rt, *l.label));
      eff.bind.add_label(rt.var, *l.label);
      return true;
    }
    return lctx.eq_labels(*l.label, rt);
  }

  enum class PermMatch { No, Full, Split };

  PermMatch match_perm(const AtomRef& l, const AtomRef& r, Effects& eff, Rat& leftover) {
    PermTerm pl = fold_scales(l.scales);
    PermTerm pr = fold_scales(r.scales);
    if (pr.kind == PermTerm::Kind::Var && free_inst(pr.var) && !eff.bind.maps(pr.var)) {
      eff.lhs_eqs.push_back(mk_perm_eq(pr, pl));
      eff.bind.add_perm(pr.var, pl);
      return PermMatch::Full;
    }
    if (lctx.eq_perms(pl, pr)) return PermMatch::Full;
    auto cl = lctx.perm_const(pl);
    auto cr = lctx.perm_const(pr);
    if (cl && cr && *cr < *cl) {
      leftover = *cl - *cr;
      return PermMatch::Split;
    }
    return PermMatch::No;
  }

  // Emits the disjointness fact recorded when a strongly separated atom is
  // consumed, unless it already follows from the premise.
  void emit_sep_fact(const AtomRef& l, const Spatial& lhs_rest,
                     const std::vector<PureAtom>& premise_pure,
                     std::vector<PureAtom>& sink) {
    if (!l.label) return;
    auto rest_label = footprint_label(lhs_rest);
    if (!rest_label) return;
    PureAtom fact =
        mk_disjoint(strip_label_scales(*l.label), strip_label_scales(*rest_label));
    PureCtx after(premise_pure, solver);
    const auto& lr = std::get<LabelRel>(fact);
    if (after.disjoint_labels(lr.lhs, lr.rhs)) return;
    add_atom_unique(sink, std::move(fact));
  }
};

}  // namespace

StepResult InferEngine::step_match(const Sequent& s) {
  StepResult out;
  MatchCtx mc(s, this, solver_);
  auto rhs_atoms = atoms_of(s.rhs.spatial);
  auto lhs_atoms = atoms_of(s.lhs.spatial);
  // predicate matches first, then cells, in goal order
  std::stable_sort(rhs_atoms.begin(), rhs_atoms.end(), [](const AtomRef& a, const AtomRef& b) {
    return (a.core->kind == Spatial::Kind::Pred) > (b.core->kind == Spatial::Kind::Pred);
  });

  for (const auto& r : rhs_atoms) {
    bool rhs_strong = has_strong_sibling(s.rhs.spatial, r.path);
    for (const auto& l : lhs_atoms) {
      if (rhs_strong && !l.strong_path) continue;
      MatchCtx::Effects eff;
      if (!mc.match_core(*l.core, *r.core, eff)) continue;
      if (!mc.match_label(l, r, eff)) continue;
      Rat leftover;
      auto pm = mc.match_perm(l, r, eff, leftover);
      if (pm == MatchCtx::PermMatch::No) continue;

      Sequent prem;
      prem.inst = s.inst;
      Spatial lhs_rest = remove_at(s.lhs.spatial, l.path);
      if (pm == MatchCtx::PermMatch::Split) {
        // the residue of the split cell shares its region with the goal side
        Spatial residue = atom(*l.label, *l.core, PermTerm::mk_const(leftover));
        lhs_rest = lhs_rest.is_emp()
                       ? std::move(residue)
                       : ac_normalize(Spatial::wstar({std::move(residue), std::move(lhs_rest)}));
      }
      prem.lhs.spatial = ac_normalize(lhs_rest);
      prem.lhs.pure = s.lhs.pure;
      for (auto& a : eff.lhs_eqs) add_atom_unique(prem.lhs.pure, std::move(a));
      if (l.strong_path)
        mc.emit_sep_fact(l, remove_at(s.lhs.spatial, l.path), prem.lhs.pure, prem.lhs.pure);

      if (check_sat(prem.lhs.pure, solver_) == Sat3::Unsat) continue;  // wrong guess

      SymbolicHeap rhs_rest;
      rhs_rest.spatial = remove_at(s.rhs.spatial, r.path);
      rhs_rest.pure = s.rhs.pure;
      for (auto& a : eff.rhs_obligations) add_atom_unique(rhs_rest.pure, std::move(a));
      prem.rhs = subst(rhs_rest, eff.bind);
      prem.rhs.spatial = ac_normalize(prem.rhs.spatial);

      out.applied = true;
      bool cell = l.core->kind == Spatial::Kind::Cell;
      out.rule = l.strong_path ? (cell ? "match-cell-sep" : "match-sep")
                               : (cell ? "match-cell" : "match");
      out.premises.push_back(std::move(prem));
      return out;
    }
  }
  return out;
}

StepResult InferEngine::step_weak_goal(const Sequent& s) {
  StepResult out;
  if (s.rhs.spatial.kind != Spatial::Kind::WStar) return out;
  MatchCtx mc(s, this, solver_);
  auto lhs_atoms = atoms_of(s.lhs.spatial);
  const auto& groups = s.rhs.spatial.kids;

  // -- share-split: one strongly held region feeds several weak groups
  {
    // atoms of each goal group
    std::vector<std::vector<AtomRef>> gatoms(groups.size());
    for (size_t g = 0; g < groups.size(); ++g) gatoms[g] = atoms_of(groups[g]);

    for (size_t g0 = 0; g0 < groups.size() && !out.applied; ++g0) {
      for (const auto& seedAtom : gatoms[g0]) {
        // find a strong source for this atom's core
        for (const auto& l : lhs_atoms) {
          if (!l.strong_path || !l.label) continue;
          MatchCtx::Effects eff;
          if (!mc.match_core(*l.core, *seedAtom.core, eff)) continue;
          // gather one matching atom from every other group that has one
          std::vector<std::pair<size_t, const AtomRef*>> pieces{{g0, &seedAtom}};
          for (size_t g1 = 0; g1 < groups.size(); ++g1) {
            if (g1 == g0) continue;
            for (const auto& cand : gatoms[g1]) {
              MatchCtx::Effects probe = eff;
              if (mc.match_core(*l.core, *cand.core, probe)) {
                pieces.push_back({g1, &cand});
                break;
              }
            }
          }
          if (pieces.size() < 2) continue;

          // labels must instantiate (or equal) the source's; permissions sum up
          MatchCtx::Effects all;
          bool ok = true;
          std::optional<PermTerm> sum;
          for (auto& [g, atomp] : pieces) {
            if (!mc.match_core(*l.core, *atomp->core, all)) {
              ok = false;
              break;
            }
            if (!mc.match_label(l, *atomp, all)) {
              ok = false;
              break;
            }
            PermTerm piece = fold_scales(atomp->scales);
            piece = subst(piece, all.bind);
            sum = sum ? PermTerm::add(*sum, piece) : piece;
          }
          if (!ok) continue;
          PermTerm source = fold_scales(l.scales);
          all.lhs_eqs.push_back(mk_perm_eq(source, *sum));

          Sequent prem;
          prem.inst = s.inst;
          prem.lhs.spatial = ac_normalize(remove_at(s.lhs.spatial, l.path));
          prem.lhs.pure = s.lhs.pure;
          for (auto& a : all.lhs_eqs) add_atom_unique(prem.lhs.pure, std::move(a));
          mc.emit_sep_fact(l, prem.lhs.spatial, prem.lhs.pure, prem.lhs.pure);
          if (check_sat(prem.lhs.pure, solver_) == Sat3::Unsat) continue;

          // goal: every piece removed from its group (group-relative paths
          // get the group index prefixed)
          Spatial goal = s.rhs.spatial;
          for (auto& [g, atomp] : pieces) {
            std::vector<int> full{static_cast<int>(g)};
            full.insert(full.end(), atomp->path.begin(), atomp->path.end());
            goal = remove_at(goal, full);
          }
          SymbolicHeap rhs_rest;
          rhs_rest.spatial = goal;
          rhs_rest.pure = s.rhs.pure;
          for (auto& a : all.rhs_obligations) add_atom_unique(rhs_rest.pure, std::move(a));
          prem.rhs = subst(rhs_rest, all.bind);
          prem.rhs.spatial = ac_normalize(prem.rhs.spatial);

          out.applied = true;
          out.rule = "share-split";
          out.premises.push_back(std::move(prem));
          return out;
        }
      }
    }
  }

  // -- regroup-weak: match every goal atom to a distinct source; sources
  //    inside one goal group must be strongly separated from each other
  {
    MatchCtx::Effects eff;
    std::vector<size_t> used;
    std::vector<std::vector<size_t>> per_group_sources(groups.size());
    bool ok = true;
    for (size_t g = 0; g < groups.size() && ok; ++g) {
      auto gas = atoms_of(groups[g]);
      if (gas.empty()) {
        ok = false;  // a group without atoms (nested structure): not handled
        break;
      }
      // groups must be fully consumed: every spatial item is an atom
      size_t items = groups[g].kind == Spatial::Kind::Star ? groups[g].kids.size() : 1;
      if (gas.size() != items) {
        ok = false;
        break;
      }
      for (const auto& ra : gas) {
        bool found = false;
        for (size_t li = 0; li < lhs_atoms.size() && !found; ++li) {
          if (std::find(used.begin(), used.end(), li) != used.end()) continue;
          const auto& l = lhs_atoms[li];
          MatchCtx::Effects probe = eff;
          if (!mc.match_core(*l.core, *ra.core, probe)) continue;
          if (!mc.match_label(l, ra, probe)) continue;
          Rat leftover;
          if (mc.match_perm(l, ra, probe, leftover) != MatchCtx::PermMatch::Full) continue;
          // in-group sources are pairwise strongly separated
          bool sep = true;
          for (size_t other : per_group_sources[g])
            if (!strongly_separated(s.lhs.spatial, lhs_atoms[other].path, l.path)) sep = false;
          if (!sep) continue;
          eff = probe;
          used.push_back(li);
          per_group_sources[g].push_back(li);
          found = true;
        }
        if (!found) {
          ok = false;
          break;
        }
      }
    }
    if (ok && !used.empty()) {
      Sequent prem;
      prem.inst = s.inst;
      // remove all sources, deepest paths first
      std::vector<size_t> order = used;
      std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return lhs_atoms[a].path > lhs_atoms[b].path;
      });
      Spatial lrest = s.lhs.spatial;
      for (size_t li : order) lrest = remove_at(lrest, lhs_atoms[li].path);
      prem.lhs.spatial = ac_normalize(lrest);
      prem.lhs.pure = s.lhs.pure;
      for (auto& a : eff.lhs_eqs) add_atom_unique(prem.lhs.pure, std::move(a));
      // cross-group disjointness for strongly separated sources
      for (size_t g1 = 0; g1 < groups.size(); ++g1)
        for (size_t g2 = g1 + 1; g2 < groups.size(); ++g2)
          for (size_t a1 : per_group_sources[g1])
            for (size_t a2 : per_group_sources[g2]) {
              const auto& la = lhs_atoms[a1];
              const auto& lb = lhs_atoms[a2];
              if (!la.label || !lb.label) continue;
              if (!strongly_separated(s.lhs.spatial, la.path, lb.path)) continue;
              add_atom_unique(prem.lhs.pure,
                              mk_disjoint(strip_label_scales(*la.label),
                                          strip_label_scales(*lb.label)));
            }
      if (check_sat(prem.lhs.pure, solver_) != Sat3::Unsat) {
        SymbolicHeap rhs_rest;
        rhs_rest.spatial = Spatial::emp();
        rhs_rest.pure = s.rhs.pure;
        prem.rhs = subst(rhs_rest, eff.bind);
        out.applied = true;
        out.rule = "regroup-weak";
        out.premises.push_back(std::move(prem));
        return out;
      }
    }
  }
  return out;
}

StepResult InferEngine::step_strong_goal(const Sequent& s) {
  StepResult out;
  // -- share-join: two weak copies of the same region rebuild a stronger one
  MatchCtx mc(s, this, solver_);
  auto rhs_atoms = atoms_of(s.rhs.spatial);
  // locate a weak chain on the hypothesis side
  std::function<const Spatial*(const Spatial&, std::vector<int>&)> find_wstar =
      [&](const Spatial& sp, std::vector<int>& path) -> const Spatial* {
    if (sp.kind == Spatial::Kind::WStar) return &sp;
    if (sp.kind == Spatial::Kind::Star) {
      for (int i = 0; i < static_cast<int>(sp.kids.size()); ++i) {
        path.push_back(i);
        if (const Spatial* f = find_wstar(sp.kids[i], path)) return f;
        path.pop_back();
      }
    }
    return nullptr;
  };
  std::vector<int> wpath;
  const Spatial* wnode = find_wstar(s.lhs.spatial, wpath);
  if (!wnode) return out;

  for (const auto& r : rhs_atoms) {
    // two pieces with one label across distinct weak children
    auto pieces_of = [&](const Spatial& g) { return atoms_of(g); };
    for (size_t i = 0; i < wnode->kids.size(); ++i) {
      for (const auto& pa : pieces_of(wnode->kids[i])) {
        if (!pa.label) continue;
        MatchCtx::Effects eff;
        if (!mc.match_core(*pa.core, *r.core, eff)) continue;
        for (size_t j = i + 1; j < wnode->kids.size(); ++j) {
          for (const auto& pb : pieces_of(wnode->kids[j])) {
            if (!pb.label) continue;
            if (!mc.lctx.eq_labels(*pa.label, *pb.label)) continue;
            MatchCtx::Effects eff2 = eff;
            if (!mc.match_core(*pa.core, *pb.core, eff2)) continue;
            // label and permission against the goal atom
            if (!mc.match_label(pa, r, eff2)) continue;
            PermTerm sum = perm_fold(
                PermTerm::add(fold_scales(pa.scales), fold_scales(pb.scales)));
            PermTerm goal_perm = fold_scales(r.scales);
            if (goal_perm.kind == PermTerm::Kind::Var && mc.free_inst(goal_perm.var) &&
                !eff2.bind.maps(goal_perm.var)) {
              eff2.lhs_eqs.push_back(mk_perm_eq(goal_perm, sum));
              eff2.bind.add_perm(goal_perm.var, sum);
            } else if (!mc.lctx.eq_perms(goal_perm, sum)) {
              continue;
            }

            // rebuild: both pieces leave their groups
            Spatial groups = *wnode;
            std::vector<std::pair<size_t, const AtomRef*>> rm{{i, &pa}, {j, &pb}};
            for (auto& [gi, ap] : rm) {
              std::vector<int> p{static_cast<int>(gi)};
              p.insert(p.end(), ap->path.begin(), ap->path.end());
              groups = remove_at(groups, p);
            }
            Sequent prem;
            prem.inst = s.inst;
            prem.lhs.spatial = ac_normalize(replace_at(s.lhs.spatial, wpath, groups));
            prem.lhs.pure = s.lhs.pure;
            for (auto& a : eff2.lhs_eqs) add_atom_unique(prem.lhs.pure, std::move(a));
            if (check_sat(prem.lhs.pure, solver_) == Sat3::Unsat) continue;
            SymbolicHeap rhs_rest;
            rhs_rest.spatial = remove_at(s.rhs.spatial, r.path);
            rhs_rest.pure = s.rhs.pure;
            prem.rhs = subst(rhs_rest, eff2.bind);
            prem.rhs.spatial = ac_normalize(prem.rhs.spatial);
            out.applied = true;
            out.rule = "share-join";
            out.premises.push_back(std::move(prem));
            return out;
          }
        }
      }
    }
  }

  // -- regroup-strong: goal regroups weak-of-strong into strong-of-weak,
  //    justified by a recorded cross disjointness
  if (s.rhs.spatial.kind == Spatial::Kind::Star) {
    // all goal children that are weak groups must be consumed together
    std::vector<size_t> weak_groups;
    for (size_t i = 0; i < s.rhs.spatial.kids.size(); ++i)
      if (s.rhs.spatial.kids[i].kind == Spatial::Kind::WStar) weak_groups.push_back(i);
    if (weak_groups.size() >= 2 && wnode) {
      MatchCtx::Effects eff;
      std::vector<size_t> used;
      std::vector<std::optional<LabelTerm>> group_labels(weak_groups.size());
      auto lhs_atoms = atoms_of(s.lhs.spatial);
      bool ok = true;
      for (size_t wg = 0; wg < weak_groups.size() && ok; ++wg) {
        const Spatial& g = s.rhs.spatial.kids[weak_groups[wg]];
        auto gas = atoms_of(g);
        size_t items = g.kids.size();
        if (gas.size() != items) {
          ok = false;
          break;
        }
        std::vector<LabelTerm> src_labels;
        for (const auto& ra : gas) {
          bool found = false;
          for (size_t li = 0; li < lhs_atoms.size() && !found; ++li) {
            if (std::find(used.begin(), used.end(), li) != used.end()) continue;
            const auto& l = lhs_atoms[li];
            if (!l.label) continue;
            MatchCtx::Effects probe = eff;
            if (!mc.match_core(*l.core, *ra.core, probe)) continue;
            if (!mc.match_label(l, ra, probe)) continue;
            Rat leftover;
            if (mc.match_perm(l, ra, probe, leftover) != MatchCtx::PermMatch::Full) continue;
            eff = probe;
            used.push_back(li);
            src_labels.push_back(strip_label_scales(*l.label));
            found = true;
          }
          if (!found) ok = false;
        }
        if (ok && !src_labels.empty()) {
          LabelTerm acc = src_labels[0];
          for (size_t k = 1; k < src_labels.size(); ++k) acc = LabelTerm::weak(acc, src_labels[k]);
          group_labels[wg] = acc;
        }
      }
      if (ok) {
        // required cross facts between the rebuilt strong groups
        bool provable = true;
        for (size_t a = 0; a < group_labels.size() && provable; ++a)
          for (size_t b = a + 1; b < group_labels.size() && provable; ++b)
            if (group_labels[a] && group_labels[b] &&
                !mc.lctx.disjoint_labels(*group_labels[a], *group_labels[b]))
              provable = false;
        if (provable) {
          Sequent prem;
          prem.inst = s.inst;
          std::vector<size_t> order = used;
          std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
            return lhs_atoms[x].path > lhs_atoms[y].path;
          });
          Spatial lrest = s.lhs.spatial;
          for (size_t li : order) lrest = remove_at(lrest, lhs_atoms[li].path);
          prem.lhs.spatial = ac_normalize(lrest);
          prem.lhs.pure = s.lhs.pure;
          for (auto& a : eff.lhs_eqs) add_atom_unique(prem.lhs.pure, std::move(a));
          if (check_sat(prem.lhs.pure, solver_) != Sat3::Unsat) {
            SymbolicHeap rhs_rest;
            rhs_rest.spatial = s.rhs.spatial;
            std::vector<size_t> wg_order = weak_groups;
            std::sort(wg_order.rbegin(), wg_order.rend());
            for (size_t wg : wg_order)
              rhs_rest.spatial = remove_at(rhs_rest.spatial, {static_cast<int>(wg)});
            rhs_rest.pure = s.rhs.pure;
            prem.rhs = subst(rhs_rest, eff.bind);
            prem.rhs.spatial = ac_normalize(prem.rhs.spatial);
            out.applied = true;
            out.rule = "regroup-strong";
            out.premises.push_back(std::move(prem));
            return out;
          }
        }
      }
    }
  }
  return out;
}

StepResult InferEngine::step_scale_pair(const Sequent& s) {
  StepResult out;
  if (pi_depth_ > 0) return out;
  // compound scaled components with equal exponents on both sides reduce to
  // a plain entailment between the unscaled parts
  auto find_scaled = [](const Spatial& root) {
    std::vector<std::pair<std::vector<int>, const Spatial*>> res;
    if (root.kind == Spatial::Kind::Scaled && root.kids[0].kind != Spatial::Kind::Cell &&
        root.kids[0].kind != Spatial::Kind::Pred && root.kids[0].kind != Spatial::Kind::Labeled)
      res.push_back({{}, &root});
    if (root.kind == Spatial::Kind::Star)
      for (int i = 0; i < static_cast<int>(root.kids.size()); ++i) {
        const Spatial& k = root.kids[i];
        if (k.kind == Spatial::Kind::Scaled && k.kids[0].kind != Spatial::Kind::Cell &&
            k.kids[0].kind != Spatial::Kind::Pred && k.kids[0].kind != Spatial::Kind::Labeled)
          res.push_back({{i}, &k});
      }
    return res;
  };
  auto ls = find_scaled(s.lhs.spatial);
  auto rs = find_scaled(s.rhs.spatial);
  if (ls.empty() || rs.empty()) return out;
  PureCtx lctx(s.lhs.pure, solver_);
  for (const auto& [lp, ln] : ls)
    for (const auto& [rp, rn] : rs) {
      if (!lctx.eq_perms(ln->perm[0], rn->perm[0])) continue;
      // side condition: the scaled parts entail with an empty frame
      SymbolicHeap sub_l;
      sub_l.spatial = ln->kids[0];
      sub_l.pure = s.lhs.pure;
      SymbolicHeap sub_r;
      sub_r.spatial = rn->kids[0];
      InferEngine nested(env_, SearchLimits{lim_.max_unfold, lim_.max_nodes / 4, lim_.max_trees},
                         solver_);
      nested.pi_depth_ = pi_depth_ + 1;
      auto side = nested.infer_emp(sub_l, sub_r);
      if (!side.frames) continue;
      Sequent prem;
      prem.inst = s.inst;
      prem.lhs.spatial = ac_normalize(remove_at(s.lhs.spatial, lp));
      prem.lhs.pure = s.lhs.pure;
      prem.rhs.spatial = ac_normalize(remove_at(s.rhs.spatial, rp));
      prem.rhs.pure = s.rhs.pure;
      out.applied = true;
      out.rule = "scale-pair";
      out.premises.push_back(std::move(prem));
      return out;
    }
  return out;
}

StepResult InferEngine::step_unfold(const Sequent& s) {
  StepResult out;
  PureCtx lctx(s.lhs.pure, solver_);
  auto lhs_atoms = atoms_of(s.lhs.spatial);
  auto rhs_atoms = atoms_of(s.rhs.spatial);

  // hypothesis-side unfolding when the goal mentions something reachable
  // from the predicate's root argument
  auto reach_of = [&](const VarId& root) {
    std::set<VarId> reach{root};
    bool grew = true;
    while (grew) {
      grew = false;
      for (const auto& l : lhs_atoms) {
        if (l.core->kind != Spatial::Kind::Cell) continue;
        bool in = false;
        for (const auto& rv : reach)
          if (lctx.eq_values(l.core->head, rv)) in = true;
        if (!in) continue;
        for (const auto& f : l.core->fields)
          if (!is_nil(f) && reach.insert(f).second) grew = true;
      }
    }
    return reach;
  };

  for (const auto& l : lhs_atoms) {
    if (l.core->kind != Spatial::Kind::Pred) continue;
    if (l.core->unfold_depth >= lim_.max_unfold) continue;
    if (l.core->fields.empty()) continue;
    std::set<VarId> reach = reach_of(l.core->fields[0]);
    bool triggered = false;
    for (const auto& r : rhs_atoms) {
      const VarId& head = r.core->kind == Spatial::Kind::Cell
                              ? r.core->head
                              : (r.core->fields.empty() ? nil_var() : r.core->fields[0]);
      for (const auto& rv : reach)
        if (lctx.eq_values(head, rv)) triggered = true;
    }
    if (!triggered) continue;

    LabelTerm lab = l.label ? *l.label
                            : LabelTerm::mk_var(names_.fresh_like("r", VarKind::Label));
    std::set<VarId> avoid = all_vars(s.lhs);
    auto av2 = all_vars(s.rhs);
    avoid.insert(av2.begin(), av2.end());
    auto cases = unfold(env_, lab, l.core->pred, l.core->fields, fold_scales(l.scales), avoid,
                        names_, l.core->unfold_depth + 1);
    for (auto& c : cases) {
      Sequent prem;
      prem.inst = s.inst;
      SymbolicHeap open = c;
      open.bound.clear();  // fresh names are already unique
      prem.lhs.pure = s.lhs.pure;
      for (auto& a : open.pure) add_atom_unique(prem.lhs.pure, a);
      PureCtx cctx(prem.lhs.pure, solver_);
      auto rw = push_scale_inward(open.spatial, cctx);
      for (auto& a : rw.emitted) add_atom_unique(prem.lhs.pure, std::move(a));
      prem.lhs.spatial = ac_normalize(replace_at(s.lhs.spatial, l.path, rw.spatial));
      prem.rhs = s.rhs;
      out.premises.push_back(std::move(prem));
    }
    out.applied = true;
    out.rule = "unfold-left";
    return out;
  }

  // goal-side unfolding: one alternative per rule, explored in tree copies
  for (const auto& r : rhs_atoms) {
    if (r.core->kind != Spatial::Kind::Pred) continue;
    if (r.core->unfold_depth >= lim_.max_unfold) continue;
    if (!env_.find(r.core->pred)) continue;
    LabelTerm lab = r.label ? *r.label
                            : LabelTerm::mk_var(names_.fresh_like("r", VarKind::Label));
    std::set<VarId> avoid = all_vars(s.lhs);
    auto av2 = all_vars(s.rhs);
    avoid.insert(av2.begin(), av2.end());
    auto cases = unfold(env_, lab, r.core->pred, r.core->fields, fold_scales(r.scales), avoid,
                        names_, r.core->unfold_depth + 1);
    PureCtx lctx2(s.lhs.pure, solver_);
    for (auto& c : cases) {
      Sequent prem;
      prem.inst = s.inst;
      prem.lhs = s.lhs;
      SymbolicHeap open = c;
      for (const auto& b : open.bound) prem.inst.insert(b);
      open.bound.clear();
      prem.rhs.pure = s.rhs.pure;
      for (auto& a : open.pure) add_atom_unique(prem.rhs.pure, a);
      auto rw = push_scale_inward_rhs(open.spatial, lctx2);
      for (auto& a : rw.emitted) add_atom_unique(prem.rhs.pure, std::move(a));
      prem.rhs.spatial = ac_normalize(replace_at(s.rhs.spatial, r.path, rw.spatial));
      out.premises.push_back(std::move(prem));
    }
    out.applied = true;
    out.branching = true;
    out.rule = "unfold-right";
    return out;
  }
  return out;
}

StepResult InferEngine::next_step(const Sequent& s) {
  StepResult r = step_hypothesis(s);
  if (r.applied) return r;
  r = step_scale_pair(s);
  if (r.applied) return r;
  r = step_weak_goal(s);
  if (r.applied) return r;
  r = step_match(s);
  if (r.applied) return r;
  r = step_strong_goal(s);
  if (r.applied) return r;
  r = step_unfold(s);
  return r;
}

// ---------------------------------------------------------------------------
// Search
// ---------------------------------------------------------------------------

namespace {

bool goal_trivial(const Sequent& s) {
  return s.rhs.spatial.is_emp() && s.rhs.pure.empty();
}

SymbolicHeap frame_of(const Sequent& s) {
  SymbolicHeap f;
  f.spatial = ac_normalize(s.lhs.spatial);
  for (const auto& a : s.lhs.pure) add_atom_unique(f.pure, a);
  return f;
}

void dump(const ProofTree& t, int node, int depth, std::ostringstream& os) {
  const ProofNode& n = t.nodes[node];
  for (int i = 0; i < depth; ++i) os << "  ";
  os << (n.rule.empty() ? (n.status == ProofNode::Status::Done ? "done" : "open")
                        : n.rule)
     << ": " << pretty(n.seq.lhs) << " |- " << pretty(n.seq.rhs);
  if (n.status == ProofNode::Status::Done && n.rule == "axiom")
    os << "  [frame " << pretty(n.frame) << "]";
  os << "\n";
  for (int c : n.children) dump(t, c, depth + 1, os);
}

}  // namespace

std::string EvalResult::proof_text() const {
  std::ostringstream os;
  if (!proof.nodes.empty()) dump(proof, 0, 0, os);
  return os.str();
}

EvalResult InferEngine::run(const SymbolicHeap& lhs, const SymbolicHeap& rhs, bool require_emp) {
  EvalResult res;
  Sequent root = make_sequent(lhs, rhs);

  std::vector<ProofTree> forest(1);
  forest[0].nodes.push_back(ProofNode{root, "", {}, ProofNode::Status::Open, {}});
  forest[0].open.push_back(0);

  int nodes = 1;
  size_t active = 0;
  while (active < forest.size()) {
    ProofTree& tree = forest[active];
    if (tree.open.empty()) {
      // complete: collect the frames in node order
      FrameSet fs;
      for (const auto& n : tree.nodes)
        if (n.status == ProofNode::Status::Done && n.rule == "axiom") fs.frames.push_back(n.frame);
      if (require_emp) {
        bool all_emp = true;
        for (const auto& f : fs.frames)
          if (!f.spatial.is_emp()) all_emp = false;
        if (!all_emp) {
          ++active;
          continue;
        }
      }
      res.frames = std::move(fs);
      res.proof = std::move(tree);
      res.stats.nodes = nodes;
      res.stats.trees = static_cast<int>(forest.size());
      return res;
    }
    int leaf = tree.open.back();

    // closing conditions
    Sequent& seq = tree.nodes[leaf].seq;
    if (check_sat(seq.lhs.pure, solver_) == Sat3::Unsat) {
      tree.open.pop_back();
      tree.nodes[leaf].status = ProofNode::Status::Pruned;
      tree.nodes[leaf].rule = "contradiction";
      continue;
    }
    if (goal_trivial(seq)) {
      tree.open.pop_back();
      tree.nodes[leaf].status = ProofNode::Status::Done;
      tree.nodes[leaf].rule = "axiom";
      tree.nodes[leaf].frame = frame_of(seq);
      continue;
    }

    if (nodes >= lim_.max_nodes) {
      ++active;  // out of budget for this tree; try another (they share the
                 // global counter, so this drains quickly)
      continue;
    }

    StepResult step = next_step(seq);
    if (!step.applied) {
      ++active;  // stuck: abandon this tree
      continue;
    }

    tree.open.pop_back();
    tree.nodes[leaf].rule = step.rule;
    if (!step.branching) {
      for (auto& prem : step.premises) {
        int id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(ProofNode{std::move(prem), "", {}, ProofNode::Status::Open, {}});
        tree.nodes[leaf].children.push_back(id);
        tree.open.push_back(id);
        ++nodes;
      }
      continue;
    }
    // branching: alternative k goes to its own copy of the tree
    ProofTree snapshot = tree;
    bool first = true;
    size_t insert_at = active + 1;
    for (auto& prem : step.premises) {
      if (first) {
        int id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(ProofNode{prem, "", {}, ProofNode::Status::Open, {}});
        tree.nodes[leaf].children.push_back(id);
        tree.open.push_back(id);
        ++nodes;
        first = false;
        continue;
      }
      if (static_cast<int>(forest.size()) >= lim_.max_trees) break;
      ProofTree copy = snapshot;
      int id = static_cast<int>(copy.nodes.size());
      copy.nodes[leaf].rule = step.rule;
      copy.nodes.push_back(ProofNode{prem, "", {}, ProofNode::Status::Open, {}});
      copy.nodes[leaf].children.push_back(id);
      copy.open.push_back(id);
      forest.insert(forest.begin() + static_cast<long>(insert_at++), std::move(copy));
      ++nodes;
    }
  }

  res.stats.nodes = nodes;
  res.stats.trees = static_cast<int>(forest.size());
  return res;  // unknown
}

EvalResult InferEngine::infer(const SymbolicHeap& lhs, const SymbolicHeap& rhs) {
  return run(lhs, rhs, false);
}

EvalResult InferEngine::infer_emp(const SymbolicHeap& lhs, const SymbolicHeap& rhs) {
  return run(lhs, rhs, true);
}

}  // namespace slp
