#include "slp/oracle.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "slp/print.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace slp {

namespace {

// ---------------------------------------------------------------------------
// p-heap algebra
// ---------------------------------------------------------------------------

std::optional<PHeap> strong_compose(const PHeap& a, const PHeap& b) {
  PHeap out = a;
  for (const auto& [l, c] : b) {
    if (out.count(l)) return std::nullopt;
    out[l] = c;
  }
  return out;
}

std::optional<PHeap> weak_compose(const PHeap& a, const PHeap& b) {
  PHeap out = a;
  for (const auto& [l, c] : b) {
    auto it = out.find(l);
    if (it == out.end()) {
      out[l] = c;
      continue;
    }
    if (!(it->second.fields == c.fields)) return std::nullopt;
    Rat sum = it->second.perm + c.perm;
    if (sum > 1) return std::nullopt;
    it->second.perm = sum;
  }
  return out;
}

PHeap scale_heap(const PHeap& h, const Rat& r) {
  PHeap out = h;
  for (auto& [l, c] : out) c.perm *= r;
  return out;
}

// h = r * h' has the unique solution h' = (1/r) * h, valid only if every
// share stays within the full permission.
std::optional<PHeap> unscale_heap(const PHeap& h, const Rat& r) {
  PHeap out = h;
  for (auto& [l, c] : out) {
    Rat p = c.perm / r;
    if (p > 1) return std::nullopt;
    c.perm = p;
  }
  return out;
}

bool doms_disjoint(const PHeap& a, const PHeap& b) {
  for (const auto& [l, c] : a)
    if (b.count(l)) return false;
  return true;
}

std::vector<Rat> closure_set(const Bounds& b) {
  std::set<Rat> cur(b.perm_menu.begin(), b.perm_menu.end());
  auto ok = [&](const Rat& r) {
    return r > 0 && r <= 1 && denominator(r) <= b.max_denominator;
  };
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<Rat> items(cur.begin(), cur.end());
    for (const auto& x : items)
      for (const auto& y : items) {
        Rat cands[3] = {Rat(x + y), Rat(x * y), Rat(x - y)};
        for (const auto& cand : cands)
          if (ok(cand) && cur.insert(cand).second) grew = true;
      }
  }
  return {cur.begin(), cur.end()};
}

// ---------------------------------------------------------------------------
// Binder classification
// ---------------------------------------------------------------------------

std::map<VarId, VarUse> uses_of(const SymbolicHeap& sh) { return var_uses(sh); }

struct BinderSplit {
  std::vector<VarId> values, perms, labels;
};

BinderSplit split_binders(const SymbolicHeap& sh) {
  auto uses = uses_of(sh);
  BinderSplit out;
  for (const auto& v : sh.bound) {
    auto it = uses.find(v);
    VarUse u = it == uses.end() ? (v.kind == VarKind::Label ? VarUse::Label : VarUse::Value)
                                : it->second;
    if (v.kind == VarKind::Label || u == VarUse::Label)
      out.labels.push_back(v);
    else if (u == VarUse::Perm)
      out.perms.push_back(v);
    else
      out.values.push_back(v);
  }
  return out;
}

// Rule bodies get generation-unique names so that nested unfoldings of the
// same predicate never collide, and the head label is pinned explicitly.
struct RuleInstance {
  SymbolicHeap body;
  std::vector<VarId> params;
  VarId self_label;
};

RuleInstance instantiate_rule(const InductiveRule& rule, FreshGen& names) {
  RuleInstance out;
  Subst ren;
  for (const auto& p : rule.params) {
    VarId fp = names.fresh(p);
    ren.add_var(p, fp);
    out.params.push_back(fp);
  }
  out.self_label = names.fresh(rule.label_param);
  ren.add_label(rule.label_param, LabelTerm::mk_var(out.self_label));
  SymbolicHeap body = subst(rule.body, ren);
  // binders too: every name in this instance is unique to it
  std::set<VarId> avoid;
  for (const auto& b : body.bound) avoid.insert(b);
  out.body = fresh_rename(body, avoid, names);
  return out;
}

// ---------------------------------------------------------------------------
// Satisfaction (continuation-passing so splits can backtrack)
// ---------------------------------------------------------------------------

struct Evaluator {
  const DefEnv& env;
  const Bounds& b;
  std::vector<Rat> candidates;
  std::vector<Val> universe;
  FreshGen names;

  std::map<VarId, Val> vals;
  std::map<VarId, Rat> perms;
  std::map<VarId, PHeap> labels;
  std::set<VarId> pending_labels;

  Evaluator(const Model& m, const DefEnv& e, const Bounds& bb)
      : env(e), b(bb), vals(m.stack), perms(m.perms), labels(m.labels) {
    candidates = closure_set(b);
    for (long long k : b.ints) universe.push_back(Val::num(k));
    for (int l = 1; l <= b.max_locs; ++l) universe.push_back(Val::loc(l));
    for (const auto& [name, def] : env.preds)
      for (const auto& rule : def.rules) {
        names.reserve(all_vars(rule.body));
        for (const auto& p : rule.params) names.reserve(p);
        names.reserve(rule.label_param);
      }
    for (const auto& [v, unused] : m.stack) names.reserve(v);
    for (const auto& [v, unused] : m.perms) names.reserve(v);
    for (const auto& [v, unused] : m.labels) names.reserve(v);
  }

  std::optional<Val> eval(const ArithTerm& t) const {
    switch (t.kind) {
      case ArithTerm::Kind::Var: {
        if (is_nil(t.var)) return Val::num(0);
        auto it = vals.find(t.var);
        if (it == vals.end()) return std::nullopt;
        return it->second;
      }
      case ArithTerm::Kind::Const: return Val::num(t.num);
      case ArithTerm::Kind::Add: {
        auto a = eval(t.args[0]), c = eval(t.args[1]);
        if (!a || !c) return std::nullopt;
        if (a->is_loc && c->is_loc) return std::nullopt;
        return Val{a->is_loc || c->is_loc, a->n + c->n};
      }
    }
    return std::nullopt;
  }

  std::optional<Rat> eval(const PermTerm& t) const {
    switch (t.kind) {
      case PermTerm::Kind::Const: return t.value;
      case PermTerm::Kind::Var: {
        auto it = perms.find(t.var);
        if (it == perms.end()) return std::nullopt;
        return it->second;
      }
      case PermTerm::Kind::Add: {
        auto a = eval(t.args[0]), c = eval(t.args[1]);
        if (!a || !c) return std::nullopt;
        Rat s = *a + *c;
        if (s > 1) return std::nullopt;
        return s;
      }
      case PermTerm::Kind::Mul: {
        auto a = eval(t.args[0]), c = eval(t.args[1]);
        if (!a || !c) return std::nullopt;
        return *a * *c;
      }
    }
    return std::nullopt;
  }

  std::optional<PHeap> eval(const LabelTerm& t) const {
    switch (t.kind) {
      case LabelTerm::Kind::Var: {
        auto it = labels.find(t.var);
        if (it == labels.end()) return std::nullopt;
        return it->second;
      }
      case LabelTerm::Kind::Strong: {
        auto a = eval(t.args[0]), c = eval(t.args[1]);
        if (!a || !c) return std::nullopt;
        return strong_compose(*a, *c);
      }
      case LabelTerm::Kind::Weak: {
        auto a = eval(t.args[0]), c = eval(t.args[1]);
        if (!a || !c) return std::nullopt;
        return weak_compose(*a, *c);
      }
      case LabelTerm::Kind::Scaled: {
        auto a = eval(t.args[0]);
        auto r = eval(t.scale[0]);
        if (!a || !r) return std::nullopt;
        return scale_heap(*a, *r);
      }
    }
    return std::nullopt;
  }

  bool eval(const PureAtom& a) const {
    if (const auto* ar = std::get_if<ArithRel>(&a)) {
      auto l = eval(ar->lhs), r = eval(ar->rhs);
      if (!l || !r) return false;
      return ar->neq ? !(*l == *r) : *l == *r;
    }
    if (const auto* pr = std::get_if<PermRel>(&a)) {
      auto l = eval(pr->lhs), r = eval(pr->rhs);
      if (!l || !r) return false;
      return *l == *r;
    }
    const auto& lr = std::get<LabelRel>(a);
    auto l = eval(lr.lhs), r = eval(lr.rhs);
    if (!l || !r) return false;
    return lr.disjoint ? doms_disjoint(*l, *r) : *l == *r;
  }

  using Cont = std::function<bool()>;

  bool spatial(const Spatial& s, const PHeap& h, int depth, const Cont& k) {
    switch (s.kind) {
      case Spatial::Kind::Emp: return h.empty() && k();
      case Spatial::Kind::Cell: {
        auto hv = eval(ArithTerm::mk_var(s.head));
        if (!hv || !hv->is_loc || hv->n < 1 || hv->n > b.max_locs) return false;
        if (h.size() != 1) return false;
        auto it = h.begin();
        if (it->first != hv->n || it->second.perm != 1) return false;
        if (it->second.fields.size() != s.fields.size()) return false;
        for (size_t i = 0; i < s.fields.size(); ++i) {
          auto fv = eval(ArithTerm::mk_var(s.fields[i]));
          if (!fv || !(*fv == it->second.fields[i])) return false;
        }
        return k();
      }
      case Spatial::Kind::Pred: {
        if (depth <= 0) return false;
        const PredDef* def = env.find(s.pred);
        if (!def || def->arity != s.fields.size()) return false;
        std::vector<Val> args;
        for (const auto& f : s.fields) {
          auto v = eval(ArithTerm::mk_var(f));
          if (!v) return false;
          args.push_back(*v);
        }
        for (const auto& rule : def->rules) {
          RuleInstance inst = instantiate_rule(rule, names);
          for (size_t i = 0; i < inst.params.size(); ++i) vals[inst.params[i]] = args[i];
          labels[inst.self_label] = h;
          bool ok = sheap(inst.body, h, depth - 1, k);
          for (const auto& p : inst.params) vals.erase(p);
          labels.erase(inst.self_label);
          if (ok) return true;
        }
        return false;
      }
      case Spatial::Kind::Star:
      case Spatial::Kind::WStar:
        return split_chain(s, 0, h, depth, k);
      case Spatial::Kind::Scaled: {
        auto r = eval(s.perm[0]);
        if (!r) return false;
        auto inner = unscale_heap(h, *r);
        if (!inner) return false;
        return spatial(s.kids[0], *inner, depth, k);
      }
      case Spatial::Kind::Labeled: {
        const LabelTerm& lt = s.label[0];
        if (lt.kind == LabelTerm::Kind::Var && pending_labels.count(lt.var)) {
          pending_labels.erase(lt.var);
          labels[lt.var] = h;
          bool ok = spatial(s.kids[0], h, depth, k);
          labels.erase(lt.var);
          pending_labels.insert(lt.var);
          return ok;
        }
        auto lh = eval(lt);
        if (!lh || !(*lh == h)) return false;
        return spatial(s.kids[0], h, depth, k);
      }
    }
    return false;
  }

  bool split_chain(const Spatial& chain, size_t idx, const PHeap& h, int depth, const Cont& k) {
    if (idx + 1 == chain.kids.size()) return spatial(chain.kids[idx], h, depth, k);
    std::vector<long long> locs;
    locs.reserve(h.size());
    for (const auto& [l, c] : h) locs.push_back(l);
    PHeap left, right;
    bool strong = chain.kind == Spatial::Kind::Star;
    return split_rec(chain, idx, h, locs, 0, left, right, depth, k, strong);
  }

  bool split_rec(const Spatial& chain, size_t idx, const PHeap& h,
                 const std::vector<long long>& locs, size_t li, PHeap& left, PHeap& right,
                 int depth, const Cont& k, bool strong) {
    if (li == locs.size()) {
      PHeap right_copy = right;
      return spatial(chain.kids[idx], left, depth, [this, &chain, idx, right_copy, depth, &k]() {
        return split_chain(chain, idx + 1, right_copy, depth, k);
      });
    }
    long long loc = locs[li];
    const PCell& c = h.at(loc);
    left[loc] = c;
    if (split_rec(chain, idx, h, locs, li + 1, left, right, depth, k, strong)) {
      left.erase(loc);
      return true;
    }
    left.erase(loc);
    right[loc] = c;
    if (split_rec(chain, idx, h, locs, li + 1, left, right, depth, k, strong)) {
      right.erase(loc);
      return true;
    }
    right.erase(loc);
    if (!strong) {
      for (const auto& p1 : candidate_splits(c.perm)) {
        left[loc] = PCell{c.fields, p1};
        right[loc] = PCell{c.fields, c.perm - p1};
        if (split_rec(chain, idx, h, locs, li + 1, left, right, depth, k, strong)) {
          left.erase(loc);
          right.erase(loc);
          return true;
        }
        left.erase(loc);
        right.erase(loc);
      }
    }
    return false;
  }

  std::vector<Rat> candidate_splits(const Rat& p) const {
    std::set<Rat> seen;
    for (const auto& c : candidates) {
      if (c > 0 && c < p) {
        seen.insert(c);
        seen.insert(p - c);
      }
    }
    return {seen.begin(), seen.end()};
  }

  bool sheap(const SymbolicHeap& sh, const PHeap& h, int depth, const Cont& k) {
    BinderSplit bs = split_binders(sh);
    for (const auto& v : bs.labels) pending_labels.insert(v);
    bool ok = enum_binders(sh, h, depth, bs.values, bs.perms, 0, k);
    for (const auto& v : bs.labels) pending_labels.erase(v);
    return ok;
  }

  bool enum_binders(const SymbolicHeap& sh, const PHeap& h, int depth,
                    const std::vector<VarId>& vb, const std::vector<VarId>& pb, size_t i,
                    const Cont& k) {
    if (i < vb.size()) {
      for (const auto& v : universe) {
        vals[vb[i]] = v;
        if (enum_binders(sh, h, depth, vb, pb, i + 1, k)) {
          vals.erase(vb[i]);
          return true;
        }
      }
      vals.erase(vb[i]);
      return false;
    }
    size_t pi = i - vb.size();
    if (pi < pb.size()) {
      for (const auto& r : candidates) {
        perms[pb[pi]] = r;
        if (enum_binders(sh, h, depth, vb, pb, i + 1, k)) {
          perms.erase(pb[pi]);
          return true;
        }
      }
      perms.erase(pb[pi]);
      return false;
    }
    return spatial(sh.spatial, h, depth, [this, &sh, &k]() {
      for (const auto& a : sh.pure)
        if (!eval(a)) return false;
      return k();
    });
  }
};

}  // namespace

bool holds(const Model& m, const SymbolicHeap& sh, const DefEnv& env, const Bounds& b) {
  Evaluator ev(m, env, b);
  ev.names.reserve(all_vars(sh));
  return ev.sheap(sh, m.heap, b.unfold_depth, []() { return true; });
}

bool holds(const Model& m, const Formula& f, const DefEnv& env, const Bounds& b) {
  for (const auto& d : f.disjuncts)
    if (holds(m, d, env, b)) return true;
  return false;
}

std::string model_to_string(const Model& m) {
  std::ostringstream os;
  auto heap_str = [&](const PHeap& h) {
    std::string out = "{";
    bool first = true;
    for (const auto& [l, c] : h) {
      if (!first) out += ", ";
      first = false;
      out += "L" + std::to_string(l) + " -> (";
      for (size_t i = 0; i < c.fields.size(); ++i) {
        if (i) out += ",";
        const Val& v = c.fields[i];
        out += v.is_loc ? "L" + std::to_string(v.n) : std::to_string(v.n);
      }
      out += ")@" + rat_to_string(c.perm);
    }
    return out + "}";
  };
  os << "stack:";
  for (const auto& [v, val] : m.stack)
    os << " " << v.name << "="
       << (val.is_loc ? "L" + std::to_string(val.n) : std::to_string(val.n));
  os << " | perms:";
  for (const auto& [v, r] : m.perms) os << " " << v.name << "=" << rat_to_string(r);
  os << " | labels:";
  for (const auto& [v, h] : m.labels) os << " " << v.name << "=" << heap_str(h);
  os << " | heap: " << heap_str(m.heap);
  return os.str();
}

// ---------------------------------------------------------------------------
// Witness generation
// ---------------------------------------------------------------------------

namespace {

struct Witness {
  PHeap heap;
  std::map<VarId, PHeap> labels;  // label pins discovered so far
};

struct Generator {
  Evaluator& ev;
  long long budget;
  bool exhausted = false;

  void bump(size_t n) {
    if (static_cast<long long>(n) > budget) exhausted = true;
  }

  std::vector<Witness> gen_spatial(const Spatial& s, int depth,
                                   const std::vector<Witness>& seeds) {
    std::vector<Witness> out;
    switch (s.kind) {
      case Spatial::Kind::Emp:
        for (const auto& w : seeds) out.push_back(Witness{{}, w.labels});
        break;
      case Spatial::Kind::Cell: {
        auto hv = ev.eval(ArithTerm::mk_var(s.head));
        if (!hv || !hv->is_loc || hv->n < 1 || hv->n > ev.b.max_locs) break;
        std::vector<Val> fields;
        bool ok = true;
        for (const auto& f : s.fields) {
          auto fv = ev.eval(ArithTerm::mk_var(f));
          if (!fv) {
            ok = false;
            break;
          }
          fields.push_back(*fv);
        }
        if (!ok) break;
        PHeap h;
        h[hv->n] = PCell{std::move(fields), Rat(1)};
        for (const auto& w : seeds) out.push_back(Witness{h, w.labels});
        break;
      }
      case Spatial::Kind::Pred: {
        if (depth <= 0) break;
        const PredDef* def = ev.env.find(s.pred);
        if (!def || def->arity != s.fields.size()) break;
        for (const auto& rule : def->rules) {
          RuleInstance inst = instantiate_rule(rule, ev.names);
          bool ok = true;
          for (size_t i = 0; i < inst.params.size(); ++i) {
            auto v = ev.eval(ArithTerm::mk_var(s.fields[i]));
            if (!v) {
              ok = false;
              break;
            }
            ev.vals[inst.params[i]] = *v;
          }
          if (ok) {
            // rule-local pins ride along; their names are unique, and the
            // caller keeps only the labels it asked about
            for (auto& w : gen_sheap(inst.body, depth - 1, seeds, inst.self_label))
              out.push_back(std::move(w));
          }
          for (const auto& p : inst.params) ev.vals.erase(p);
          if (exhausted) break;
        }
        break;
      }
      case Spatial::Kind::Star:
      case Spatial::Kind::WStar: {
        std::vector<Witness> acc;
        for (const auto& w : seeds) acc.push_back(Witness{{}, w.labels});
        for (const auto& kid : s.kids) {
          std::vector<Witness> next;
          for (const auto& left : acc) {
            std::vector<Witness> lseed{Witness{{}, left.labels}};
            for (auto& right : gen_spatial(kid, depth, lseed)) {
              auto combined = s.kind == Spatial::Kind::Star
                                  ? strong_compose(left.heap, right.heap)
                                  : weak_compose(left.heap, right.heap);
              if (!combined) continue;
              next.push_back(Witness{std::move(*combined), std::move(right.labels)});
              bump(next.size());
              if (exhausted) break;
            }
            if (exhausted) break;
          }
          acc = std::move(next);
          if (exhausted) break;
        }
        out = std::move(acc);
        break;
      }
      case Spatial::Kind::Scaled: {
        auto r = ev.eval(s.perm[0]);
        if (!r) break;
        for (auto& w : gen_spatial(s.kids[0], depth, seeds)) {
          w.heap = scale_heap(w.heap, *r);
          bool ok = true;
          for (const auto& [l, c] : w.heap)
            if (denominator(c.perm) > ev.b.max_denominator) ok = false;
          if (ok) out.push_back(std::move(w));
        }
        break;
      }
      case Spatial::Kind::Labeled: {
        const LabelTerm& lt = s.label[0];
        for (auto& w : gen_spatial(s.kids[0], depth, seeds)) {
          if (lt.kind == LabelTerm::Kind::Var) {
            auto pinned = w.labels.find(lt.var);
            if (pinned != w.labels.end()) {
              if (pinned->second == w.heap) out.push_back(std::move(w));
              continue;
            }
            auto global = ev.labels.find(lt.var);
            if (global != ev.labels.end()) {
              if (global->second == w.heap) out.push_back(std::move(w));
              continue;
            }
            w.labels[lt.var] = w.heap;
            out.push_back(std::move(w));
          } else {
            // compound term: evaluable only from existing pins
            auto saved = ev.labels;
            for (const auto& [v, hh] : w.labels) ev.labels[v] = hh;
            auto lh = ev.eval(lt);
            ev.labels = std::move(saved);
            if (lh && *lh == w.heap) out.push_back(std::move(w));
          }
        }
        break;
      }
    }
    bump(out.size());
    if (exhausted && static_cast<long long>(out.size()) > budget)
      out.resize(static_cast<size_t>(budget));
    return out;
  }

  std::vector<Witness> gen_sheap(const SymbolicHeap& sh, int depth,
                                 const std::vector<Witness>& seeds,
                                 std::optional<VarId> self = std::nullopt) {
    BinderSplit bs = split_binders(sh);
    std::vector<Witness> out;
    enum_and_gen(sh, depth, seeds, bs.values, bs.perms, 0, self, out);
    return out;
  }

  void enum_and_gen(const SymbolicHeap& sh, int depth, const std::vector<Witness>& seeds,
                    const std::vector<VarId>& vb, const std::vector<VarId>& pb, size_t i,
                    std::optional<VarId> self, std::vector<Witness>& out) {
    if (exhausted) return;
    if (i < vb.size()) {
      for (const auto& v : ev.universe) {
        ev.vals[vb[i]] = v;
        enum_and_gen(sh, depth, seeds, vb, pb, i + 1, self, out);
      }
      ev.vals.erase(vb[i]);
      return;
    }
    size_t pi = i - vb.size();
    if (pi < pb.size()) {
      for (const auto& r : ev.candidates) {
        ev.perms[pb[pi]] = r;
        enum_and_gen(sh, depth, seeds, vb, pb, i + 1, self, out);
      }
      ev.perms.erase(pb[pi]);
      return;
    }
    for (auto& w : gen_spatial(sh.spatial, depth, seeds)) {
      if (self) w.labels[*self] = w.heap;  // the head label names the body heap
      auto saved = ev.labels;
      for (const auto& [v, hh] : w.labels) ev.labels[v] = hh;
      bool ok = true;
      for (const auto& a : sh.pure)
        if (!ev.eval(a)) {
          ok = false;
          break;
        }
      ev.labels = std::move(saved);
      if (ok) {
        out.push_back(std::move(w));
        bump(out.size());
        if (exhausted) return;
      }
    }
  }
};

}  // namespace

EntailCheck check_entail_bounded(const SymbolicHeap& lhs, const SymbolicHeap& rhs,
                                 const DefEnv& env, const Bounds& b) {
  EntailCheck res;

  std::set<VarId> lhs_free = free_vars(lhs);
  std::set<VarId> rhs_free = free_vars(rhs);

  // Hypothesis binders enumerate like free variables, renamed clear of the
  // conclusion; conclusion-only variables become existential witnesses, its
  // binders renamed clear of everything the models mention.
  std::set<VarId> avoid = rhs_free;
  avoid.insert(lhs_free.begin(), lhs_free.end());
  SymbolicHeap hyp = fresh_rename(lhs, avoid);
  for (const auto& v : hyp.bound) lhs_free.insert(v);
  hyp.bound.clear();

  SymbolicHeap goal = rhs;
  for (const auto& v : rhs_free)
    if (!lhs_free.count(v)) goal.bound.push_back(v);
  avoid.insert(lhs_free.begin(), lhs_free.end());
  goal = fresh_rename(goal, avoid);

  auto uses = uses_of(hyp);
  std::vector<VarId> value_vars, perm_vars, label_vars;
  for (const auto& v : lhs_free) {
    auto it = uses.find(v);
    VarUse u = it == uses.end() ? (v.kind == VarKind::Label ? VarUse::Label : VarUse::Value)
                                : it->second;
    if (v.kind == VarKind::Label || u == VarUse::Label)
      label_vars.push_back(v);
    else if (u == VarUse::Perm)
      perm_vars.push_back(v);
    else
      value_vars.push_back(v);
  }

  // Every label of the hypothesis must be pinned by an @ position.
  {
    std::set<VarId> pinned;
    std::function<void(const Spatial&)> scan = [&](const Spatial& s) {
      if (s.kind == Spatial::Kind::Labeled && s.label[0].kind == LabelTerm::Kind::Var)
        pinned.insert(s.label[0].var);
      for (const auto& k : s.kids) scan(k);
    };
    scan(hyp.spatial);
    for (const auto& v : label_vars)
      if (!pinned.count(v)) {
        res.kind = EntailCheck::Kind::BoundExceeded;
        res.note = "label '" + v.name + "' has no @ position in the hypothesis";
        return res;
      }
  }

  Model seed;
  Evaluator ev(seed, env, b);
  ev.names.reserve(all_vars(hyp));
  ev.names.reserve(all_vars(goal));
  Generator gen{ev, b.max_models};

  std::vector<Model> models;
  std::function<void(size_t)> enum_stack = [&](size_t i) {
    if (gen.exhausted) return;
    if (i < value_vars.size()) {
      for (const auto& v : ev.universe) {
        ev.vals[value_vars[i]] = v;
        enum_stack(i + 1);
      }
      ev.vals.erase(value_vars[i]);
      return;
    }
    size_t pi = i - value_vars.size();
    if (pi < perm_vars.size()) {
      for (const auto& r : b.perm_menu) {
        ev.perms[perm_vars[pi]] = r;
        enum_stack(i + 1);
      }
      ev.perms.erase(perm_vars[pi]);
      return;
    }
    std::vector<Witness> seeds{Witness{}};
    for (auto& w : gen.gen_sheap(hyp, b.unfold_depth, seeds)) {
      Model m;
      m.stack = ev.vals;
      m.perms = ev.perms;
      for (const auto& v : label_vars) {
        auto it = w.labels.find(v);
        if (it != w.labels.end()) m.labels[v] = it->second;
      }
      m.heap = std::move(w.heap);
      models.push_back(std::move(m));
      if (static_cast<long long>(models.size()) > b.max_models) {
        gen.exhausted = true;
        return;
      }
    }
  };
  enum_stack(0);

  if (gen.exhausted) {
    res.kind = EntailCheck::Kind::BoundExceeded;
    res.note = "witness budget exceeded";
    return res;
  }

  res.models_checked = static_cast<long long>(models.size());

  long long n = static_cast<long long>(models.size());
  long long found = -1;
#if defined(_OPENMP)
  if (b.parallel && n > 1) {
#pragma omp parallel
    {
      long long local = -1;
#pragma omp for schedule(dynamic, 8)
      for (long long i = 0; i < n; ++i) {
        if (local >= 0) continue;
        const Model& m = models[static_cast<size_t>(i)];
        if (!holds(m, lhs, env, b)) continue;  // generator cross-check
        if (!holds(m, goal, env, b)) local = i;
      }
#pragma omp critical
      {
        if (local >= 0 && (found < 0 || local < found)) found = local;
      }
    }
  } else
#endif
  {
    for (long long i = 0; i < n; ++i) {
      const Model& m = models[static_cast<size_t>(i)];
      if (!holds(m, lhs, env, b)) continue;
      if (!holds(m, goal, env, b)) {
        found = i;
        break;
      }
    }
  }

  if (found >= 0) {
    res.kind = EntailCheck::Kind::Countermodel;
    res.counter = models[static_cast<size_t>(found)];
  }
  return res;
}

std::vector<Model> enumerate_models(const std::vector<VarId>& value_vars,
                                    const std::vector<VarId>& label_vars,
                                    const std::vector<size_t>& cell_arities, const Bounds& b) {
  std::vector<Val> universe;
  for (long long k : b.ints) universe.push_back(Val::num(k));
  for (int l = 1; l <= b.max_locs; ++l) universe.push_back(Val::loc(l));

  std::vector<PCell> cells;
  for (size_t arity : cell_arities) {
    std::vector<std::vector<Val>> tuples{{}};
    for (size_t i = 0; i < arity; ++i) {
      std::vector<std::vector<Val>> next;
      for (const auto& t : tuples)
        for (const auto& v : universe) {
          auto t2 = t;
          t2.push_back(v);
          next.push_back(std::move(t2));
        }
      tuples = std::move(next);
    }
    for (const auto& t : tuples)
      for (const auto& p : b.perm_menu) cells.push_back(PCell{t, p});
  }

  std::vector<PHeap> heaps{{}};
  for (int l = 1; l <= b.max_locs; ++l) {
    std::vector<PHeap> next;
    for (const auto& h : heaps) {
      next.push_back(h);
      for (const auto& c : cells) {
        PHeap h2 = h;
        h2[l] = c;
        next.push_back(std::move(h2));
      }
    }
    heaps = std::move(next);
  }

  std::vector<Model> partial{Model{}};
  for (const auto& v : value_vars) {
    std::vector<Model> next;
    for (const auto& m : partial)
      for (const auto& val : universe) {
        Model m2 = m;
        m2.stack[v] = val;
        next.push_back(std::move(m2));
      }
    partial = std::move(next);
  }
  for (const auto& lv : label_vars) {
    std::vector<Model> next;
    for (const auto& m : partial)
      for (const auto& h : heaps) {
        Model m2 = m;
        m2.labels[lv] = h;
        next.push_back(std::move(m2));
      }
    partial = std::move(next);
  }
  std::vector<Model> out;
  for (const auto& m : partial)
    for (const auto& h : heaps) {
      Model m2 = m;
      m2.heap = h;
      out.push_back(std::move(m2));
    }
  return out;
}

}  // namespace slp
