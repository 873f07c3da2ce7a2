#include "slp/verify.hpp"

#include <chrono>
#include <functional>

#include "slp/print.hpp"

namespace slp {

const char* fail_reason_name(FailReason r) {
  switch (r) {
    case FailReason::MemorySafety: return "memory-safety";
    case FailReason::FrameSideCondition: return "frame-side-condition";
    case FailReason::JoinError: return "join-error";
    case FailReason::PostMismatch: return "post-mismatch";
    case FailReason::Leak: return "leak";
  }
  return "?";
}

bool VerificationReport::any_failed() const {
  for (const auto& f : functions)
    if (f.status == FunctionReport::Status::Failed) return true;
  return false;
}

bool VerificationReport::any_unknown() const {
  for (const auto& f : functions)
    if (f.status == FunctionReport::Status::Unknown) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Inconsistency over-approximation
// ---------------------------------------------------------------------------

namespace {

struct CellAtom {
  std::vector<int> path;
  VarId head;
  std::optional<LabelTerm> label;
  PermTerm perm = PermTerm::top();
};

void collect_cells(const Spatial& s, std::vector<int>& path, std::vector<CellAtom>& out,
                   std::vector<PermTerm>& exps) {
  if (s.kind == Spatial::Kind::Star || s.kind == Spatial::Kind::WStar) {
    for (int i = 0; i < static_cast<int>(s.kids.size()); ++i) {
      path.push_back(i);
      collect_cells(s.kids[i], path, out, exps);
      path.pop_back();
    }
    return;
  }
  const Spatial* cur = &s;
  CellAtom c;
  std::vector<PermTerm> scales;
  while (cur->kind == Spatial::Kind::Scaled) {
    scales.push_back(cur->perm[0]);
    cur = &cur->kids[0];
  }
  if (cur->kind == Spatial::Kind::Labeled) {
    c.label = cur->label[0];
    cur = &cur->kids[0];
  }
  for (const auto& p : scales) exps.push_back(p);
  if (cur->kind != Spatial::Kind::Cell) return;
  c.head = cur->head;
  c.path = path;
  if (!scales.empty()) {
    PermTerm acc = scales.back();
    for (auto it = std::next(scales.rbegin()); it != scales.rend(); ++it)
      acc = PermTerm::mul(acc, *it);
    c.perm = acc;
  }
  out.push_back(std::move(c));
}

bool lca_is_star(const Spatial& root, const std::vector<int>& a, const std::vector<int>& b) {
  const Spatial* cur = &root;
  size_t i = 0;
  while (i < a.size() && i < b.size() && a[i] == b[i]) {
    cur = &cur->kids[a[i]];
    ++i;
  }
  return cur->kind == Spatial::Kind::Star;
}

LabelTerm strip_scales_l(const LabelTerm& t) {
  switch (t.kind) {
    case LabelTerm::Kind::Var: return t;
    case LabelTerm::Kind::Scaled: return strip_scales_l(t.args[0]);
    case LabelTerm::Kind::Strong:
      return LabelTerm::strong(strip_scales_l(t.args[0]), strip_scales_l(t.args[1]));
    case LabelTerm::Kind::Weak:
      return LabelTerm::weak(strip_scales_l(t.args[0]), strip_scales_l(t.args[1]));
  }
  return t;
}

}  // namespace

bool unsat_over_approx(const SymbolicHeap& sh, const SolverCfg& cfg) {
  Spatial sp = ac_normalize(sh.spatial);
  std::vector<CellAtom> cells;
  std::vector<PermTerm> exps;
  std::vector<int> path;
  collect_cells(sp, path, cells, exps);

  std::vector<PureAtom> approx = sh.pure;
  PureCtx base(sh.pure, cfg);

  for (const auto& c : cells)
    approx.push_back(mk_neq(ArithTerm::mk_var(c.head), ArithTerm::mk_var(nil_var())));

  for (size_t i = 0; i < cells.size(); ++i)
    for (size_t j = i + 1; j < cells.size(); ++j) {
      bool separate = lca_is_star(sp, cells[i].path, cells[j].path);
      if (!separate && cells[i].label && cells[j].label) {
        separate = base.disjoint_labels(strip_scales_l(*cells[i].label),
                                        strip_scales_l(*cells[j].label));
      }
      if (separate)
        approx.push_back(
            mk_neq(ArithTerm::mk_var(cells[i].head), ArithTerm::mk_var(cells[j].head)));
    }

  // Share bounds for every exponent in the shape (sums in particular).
  for (const auto& e : exps) approx.push_back(mk_perm_eq(e, e));

  return check_sat(approx, cfg) == Sat3::Unsat;
}

// ---------------------------------------------------------------------------
// Built-in summaries
// ---------------------------------------------------------------------------

SpecPair skip_spec() { return SpecPair{{}, {}}; }

SpecPair store_spec(size_t arity, int field) {
  SpecPair sp;
  std::vector<VarId> pre_fields, post_fields;
  for (size_t i = 0; i < arity; ++i) {
    VarId u = lvar("u" + std::to_string(i));
    pre_fields.push_back(u);
    post_fields.push_back(i == static_cast<size_t>(field) ? pvar("v") : u);
  }
  sp.pre.spatial = Spatial::labeled(LabelTerm::mk_var(labvar("al")),
                                    Spatial::cell(pvar("x"), pre_fields));
  sp.post.spatial = Spatial::labeled(LabelTerm::mk_var(labvar("bl")),
                                     Spatial::cell(pvar("x"), post_fields));
  return sp;
}

SpecPair free_spec(size_t arity) {
  SpecPair sp;
  std::vector<VarId> fields;
  for (size_t i = 0; i < arity; ++i) fields.push_back(lvar("u" + std::to_string(i)));
  sp.pre.spatial = Spatial::labeled(LabelTerm::mk_var(labvar("al")),
                                    Spatial::cell(pvar("x"), fields));
  sp.post.spatial = Spatial::emp();
  return sp;
}

// ---------------------------------------------------------------------------
// Verifier
// ---------------------------------------------------------------------------

Verifier::Verifier(const SourceFile& file, VerifyOptions opts) : file_(file), opts_(opts) {}

namespace {

void stmt_vars_assigned(const std::vector<Stmt>& body, std::set<VarId>& out) {
  for (const auto& s : body) {
    switch (s.kind) {
      case Stmt::Kind::Assign:
      case Stmt::Kind::Load:
      case Stmt::Kind::Malloc:
      case Stmt::Kind::Fork: out.insert(s.lhs); break;
      default: break;
    }
    stmt_vars_assigned(s.then_branch, out);
    stmt_vars_assigned(s.else_branch, out);
    stmt_vars_assigned(s.body, out);
  }
}

void call_sites(const std::vector<Stmt>& body,
                std::vector<std::pair<std::string, VarId>>& refs) {
  for (const auto& s : body) {
    if (s.kind == Stmt::Kind::Call || s.kind == Stmt::Kind::Fork) {
      if (!s.args.empty()) refs.push_back({s.callee, s.args[0]});
    } else if (s.kind == Stmt::Kind::Par) {
      if (!s.args.empty()) refs.push_back({s.callee, s.args[0]});
      if (!s.args2.empty()) refs.push_back({s.callee2, s.args2[0]});
    }
    call_sites(s.then_branch, refs);
    call_sites(s.else_branch, refs);
    call_sites(s.body, refs);
  }
}

// Occurrences of a variable anywhere in a statement's variables.
void rename_in_stmts(std::vector<Stmt>& body, const VarId& from, const VarId& to) {
  Subst m;
  m.add_var(from, to);
  for (auto& s : body) {
    if (s.lhs == from) s.lhs = to;
    if (s.rhs_var == from) s.rhs_var = to;
    for (auto& a : s.args)
      if (a == from) a = to;
    for (auto& a : s.args2)
      if (a == from) a = to;
    s.expr = subst(s.expr, m);
    s.cond = subst(s.cond, m);
    rename_in_stmts(s.then_branch, from, to);
    rename_in_stmts(s.else_branch, from, to);
    rename_in_stmts(s.body, from, to);
  }
}

PureAtom negate_cond(const PureAtom& a) {
  const auto& ar = std::get<ArithRel>(a);
  return ArithRel{!ar.neq, ar.lhs, ar.rhs};
}

void merge_pure(SymbolicHeap& sh, const std::vector<PureAtom>& atoms) {
  for (const auto& a : atoms) {
    bool seen = false;
    for (const auto& p : sh.pure)
      if (equal(p, a)) seen = true;
    if (!seen) sh.pure.push_back(a);
  }
}

}  // namespace

const std::set<VarId>& Verifier::modset(const std::string& fname) {
  if (modsets_.empty()) {
    // fixpoint over the call graph: direct assignments plus by-reference
    // actuals of callees that modify their by-reference formal
    for (const auto& f : file_.functions) {
      std::set<VarId> direct;
      stmt_vars_assigned(f.body, direct);
      modsets_[f.name] = std::move(direct);
    }
    bool grew = true;
    while (grew) {
      grew = false;
      for (const auto& f : file_.functions) {
        std::vector<std::pair<std::string, VarId>> refs;
        call_sites(f.body, refs);
        for (const auto& [callee, actual] : refs) {
          const FunctionDecl* cf = file_.find_function(callee);
          if (!cf) continue;
          if (modsets_[callee].count(cf->ref_param()) && modsets_[f.name].insert(actual).second)
            grew = true;
        }
      }
    }
  }
  static const std::set<VarId> empty;
  auto it = modsets_.find(fname);
  return it == modsets_.end() ? empty : it->second;
}

bool Verifier::body_assigns(const FunctionDecl& f, const VarId& v) const {
  std::set<VarId> assigned;
  stmt_vars_assigned(f.body, assigned);
  return assigned.count(v) > 0;
}

Verifier::AbsState Verifier::rename_assigned(const AbsState& st, const VarId& x, VarId& fresh) {
  fresh = names_.fresh(x);
  Subst m;
  m.add_var(x, fresh);
  AbsState out;
  out.heap = subst(st.heap, m);
  for (const auto& [t, post] : st.pending) {
    if (t == x) continue;  // overwriting a token abandons it
    out.pending[t] = subst(post, m);
  }
  return out;
}

Verifier::SpecInst Verifier::instantiate_spec(const FunctionDecl& f, const SpecPair& sp,
                                              const std::vector<VarId>& actuals,
                                              const std::set<VarId>& avoid) {
  // freshen every spec-level variable (everything free except the formals),
  // then bind formals to actuals
  SpecInst out;
  std::set<VarId> spec_vars = free_vars(sp.pre);
  for (const auto& v : free_vars(sp.post)) spec_vars.insert(v);
  for (const auto& p : f.params) spec_vars.erase(p);

  names_.reserve(avoid);
  auto uses = var_uses(sp.pre);
  for (const auto& [v, u] : var_uses(sp.post)) uses.emplace(v, u);
  Subst ren;
  for (const auto& v : spec_vars) {
    VarId fv = names_.fresh(v);
    add_renaming(ren, v, fv, use_of(uses, v));
    out.locals.insert(fv);
  }
  for (size_t i = 0; i < f.params.size() && i < actuals.size(); ++i) {
    if (!(f.params[i] == actuals[i])) ren.add_var(f.params[i], actuals[i]);
  }
  out.pre = subst(sp.pre, ren);
  out.post = subst(sp.post, ren);

  // a by-value parameter keeps its initial value unless the body writes it
  if (f.has_val_param() && actuals.size() > 1 && body_assigns(f, f.val_param())) {
    VarId forgotten = names_.fresh(f.val_param());
    Subst forget;
    forget.add_var(actuals[1], forgotten);
    out.post = subst(out.post, forget);
    out.locals.insert(forgotten);
  }
  return out;
}

// Applies one summary: infers the frame for `pre`, then combines `post` with
// every frame, substituting the recorded instantiations and dropping the
// spec-local facts. One post-state disjunct per frame.
std::optional<Verifier::SummaryResult> Verifier::apply_summary(
    const AbsState& st, const SymbolicHeap& pre, const SymbolicHeap& post,
    const std::set<VarId>& spec_locals, FunctionReport& rep) {
  InferEngine eng(file_.defs, opts_.limits, opts_.solver);
  ++rep.queries;
  auto res = eng.infer(st.heap, pre);
  if (!res.frames) return std::nullopt;

  SummaryResult out;
  for (const auto& frame : res.frames->frames) {
    // bindings recorded for the spec-local variables
    Subst bind;
    for (const auto& a : frame.pure) {
      if (const auto* lr = std::get_if<LabelRel>(&a)) {
        if (!lr->disjoint && lr->lhs.kind == LabelTerm::Kind::Var &&
            spec_locals.count(lr->lhs.var) && !bind.maps(lr->lhs.var))
          bind.add_label(lr->lhs.var, lr->rhs);
      } else if (const auto* pr = std::get_if<PermRel>(&a)) {
        if (pr->lhs.kind == PermTerm::Kind::Var && spec_locals.count(pr->lhs.var) &&
            !bind.maps(pr->lhs.var))
          bind.add_perm(pr->lhs.var, pr->rhs);
      } else {
        const auto& ar = std::get<ArithRel>(a);
        if (!ar.neq && ar.lhs.kind == ArithTerm::Kind::Var && spec_locals.count(ar.lhs.var) &&
            !bind.maps(ar.lhs.var))
          bind.add_val(ar.lhs.var, ar.rhs);
      }
    }
    SymbolicHeap post_inst = subst(post, bind);
    // open what the summary leaves unconstrained
    std::set<VarId> avoid = all_vars(st.heap);
    post_inst = fresh_rename(post_inst, avoid, names_);
    post_inst.bound.clear();

    // spec variables that survive into the post (for instance the shares a
    // split handed to each thread) become state variables; everything else
    // spec-local is bookkeeping and drops out with its facts
    std::set<VarId> survivors;
    for (const auto& v : free_vars(post_inst))
      if (spec_locals.count(v)) survivors.insert(v);

    SymbolicHeap cleaned;
    cleaned.spatial = frame.spatial;
    for (const auto& a : frame.pure) {
      PureAtom a2 = subst(a, bind);
      std::set<VarId> fv;
      free_vars_into(a2, fv);
      bool local = false;
      for (const auto& v : fv)
        if (spec_locals.count(v) && !survivors.count(v)) local = true;
      if (local) continue;
      // substitution can make recorded instantiations trivial
      if (const auto* ar = std::get_if<ArithRel>(&a2))
        if (!ar->neq && equal(ar->lhs, ar->rhs)) continue;
      if (const auto* pr = std::get_if<PermRel>(&a2))
        if (equal(pr->lhs, pr->rhs)) continue;
      if (const auto* lr = std::get_if<LabelRel>(&a2))
        if (!lr->disjoint && equal(lr->lhs, lr->rhs)) continue;
      bool dup = false;
      for (const auto& e : cleaned.pure)
        if (equal(e, a2)) dup = true;
      if (!dup) cleaned.pure.push_back(std::move(a2));
    }

    SymbolicHeap combined;
    combined.spatial =
        post_inst.spatial.is_emp()
            ? cleaned.spatial
            : (cleaned.spatial.is_emp()
                   ? post_inst.spatial
                   : Spatial::wstar({post_inst.spatial, cleaned.spatial}));
    combined.pure = cleaned.pure;
    merge_pure(combined, post_inst.pure);
    combined = strengthen_separation(ac_normalize(combined));
    out.states.push_back(std::move(combined));
    out.frames.push_back(std::move(cleaned));
  }
  return out;
}

// ---------------------------------------------------------------------------
// The transformer
// ---------------------------------------------------------------------------

Verifier::PostResult Verifier::post(const Stmt& stmt, const AbsState& st0, FunctionReport& rep) {
  AbsState st = st0;
  if (unsat_over_approx(st.heap, opts_.solver)) return States{};  // dead state

  auto fail = [&](FailReason r, const std::string& detail) -> PostResult {
    return Error{r, stmt.pos, detail};
  };

  switch (stmt.kind) {
    case Stmt::Kind::Skip: return States{st};

    case Stmt::Kind::Assign: {
      VarId fresh;
      AbsState out = rename_assigned(st, stmt.lhs, fresh);
      Subst m;
      m.add_var(stmt.lhs, fresh);
      ArithTerm rhs = subst(stmt.expr, m);
      out.heap.pure.push_back(mk_eq(ArithTerm::mk_var(stmt.lhs), rhs));
      return States{out};
    }

    case Stmt::Kind::If: {
      States out;
      AbsState then_st = st, else_st = st;
      then_st.heap.pure.push_back(stmt.cond);
      else_st.heap.pure.push_back(negate_cond(stmt.cond));
      auto r1 = post_seq(stmt.then_branch, {then_st}, rep);
      if (auto* e = std::get_if<Error>(&r1)) return *e;
      auto r2 = post_seq(stmt.else_branch, {else_st}, rep);
      if (auto* e = std::get_if<Error>(&r2)) return *e;
      for (auto& s : std::get<States>(r1)) out.push_back(std::move(s));
      for (auto& s : std::get<States>(r2)) out.push_back(std::move(s));
      return out;
    }

    case Stmt::Kind::Local: {
      VarId fresh = names_.fresh(stmt.lhs);
      std::vector<Stmt> body = stmt.body;
      rename_in_stmts(body, stmt.lhs, fresh);
      return post_seq(body, {st}, rep);
    }

    case Stmt::Kind::Load: {
      // footprint: any readable share of the cell at the source
      for (const auto& rec : file_.records) {
        size_t arity = rec.fields.size();
        if (static_cast<size_t>(stmt.field) >= arity) continue;
        std::vector<VarId> fields;
        for (size_t i = 0; i < arity; ++i)
          fields.push_back(names_.fresh_like("f", VarKind::Logical));
        VarId lab = names_.fresh_like("rl", VarKind::Label);
        VarId share = names_.fresh_like("rp", VarKind::Logical);
        SymbolicHeap goal;
        goal.spatial = Spatial::scaled(
            Spatial::labeled(LabelTerm::mk_var(lab), Spatial::cell(stmt.rhs_var, fields)),
            PermTerm::mk_var(share));
        InferEngine eng(file_.defs, opts_.limits, opts_.solver);
        ++rep.queries;
        auto res = eng.infer(st.heap, goal);
        if (!res.frames) continue;

        States out;
        for (const auto& frame : res.frames->frames) {
          VarId fresh;
          AbsState next = rename_assigned(st, stmt.lhs, fresh);
          Subst m;
          m.add_var(stmt.lhs, fresh);
          SymbolicHeap combined;
          combined.spatial = subst(goal.spatial, m);
          SymbolicHeap fr = subst(frame, m);
          if (!fr.spatial.is_emp())
            combined.spatial = Spatial::wstar({combined.spatial, fr.spatial});
          combined.pure = fr.pure;
          combined.pure.push_back(
              mk_eq(ArithTerm::mk_var(stmt.lhs),
                    ArithTerm::mk_var(fields[static_cast<size_t>(stmt.field)])));
          next.heap = strengthen_separation(ac_normalize(combined));
          out.push_back(std::move(next));
        }
        return out;
      }
      return fail(FailReason::MemorySafety, "no readable cell at '" + stmt.rhs_var.name + "'");
    }

    case Stmt::Kind::Store: {
      for (const auto& rec : file_.records) {
        size_t arity = rec.fields.size();
        if (static_cast<size_t>(stmt.field) >= arity) continue;
        SpecPair spec = store_spec(arity, stmt.field);
        // formals: x (target), v (stored value)
        Subst m;
        m.add_var(pvar("x"), stmt.lhs);
        m.add_var(pvar("v"), stmt.rhs_var);
        SymbolicHeap pre = subst(spec.pre, m);
        SymbolicHeap post_sh = subst(spec.post, m);
        // fresh spec variables
        std::set<VarId> locals;
        Subst ren;
        for (const auto& v : free_vars(pre)) {
          if (v == stmt.lhs || v == stmt.rhs_var) continue;
          VarId fv = names_.fresh(v);
          ren.add_var(v, fv);
          locals.insert(fv);
        }
        VarId fresh_out = names_.fresh_like("bl", VarKind::Label);
        ren.add_var(labvar("bl"), fresh_out);
        pre = subst(pre, ren);
        post_sh = subst(post_sh, ren);

        InferEngine eng(file_.defs, opts_.limits, opts_.solver);
        ++rep.queries;
        auto res = eng.infer(st.heap, pre);
        if (!res.frames) continue;

        States out;
        for (const auto& frame : res.frames->frames) {
          // re-point the untouched fields at their matched contents
          Subst bind;
          for (const auto& a : frame.pure) {
            if (const auto* ar = std::get_if<ArithRel>(&a)) {
              if (!ar->neq && ar->lhs.kind == ArithTerm::Kind::Var &&
                  locals.count(ar->lhs.var) && !bind.maps(ar->lhs.var))
                bind.add_val(ar->lhs.var, ar->rhs);
            }
          }
          SymbolicHeap new_cell = subst(post_sh, bind);
          SymbolicHeap cleaned;
          cleaned.spatial = frame.spatial;
          std::optional<LabelTerm> old_label;
          for (const auto& a : frame.pure) {
            std::set<VarId> fv;
            free_vars_into(a, fv);
            bool local = false;
            for (const auto& v : fv)
              if (locals.count(v)) local = true;
            if (const auto* lr = std::get_if<LabelRel>(&a)) {
              if (!lr->disjoint && lr->lhs.kind == LabelTerm::Kind::Var &&
                  locals.count(lr->lhs.var))
                old_label = lr->rhs;  // the region the target cell came from
            }
            if (!local) cleaned.pure.push_back(a);
          }
          SymbolicHeap combined;
          combined.spatial = cleaned.spatial.is_emp()
                                 ? new_cell.spatial
                                 : Spatial::star({new_cell.spatial, cleaned.spatial});
          combined.pure = cleaned.pure;
          // the rewritten cell occupies the same location: everything
          // disjoint from the old region is disjoint from the new one
          if (old_label) {
            std::vector<PureAtom> copies;
            for (const auto& a : combined.pure) {
              if (const auto* lr = std::get_if<LabelRel>(&a)) {
                if (!lr->disjoint) continue;
                LabelTerm nl = LabelTerm::mk_var(fresh_out);
                if (equal(strip_scales_l(lr->lhs), strip_scales_l(*old_label)))
                  copies.push_back(mk_disjoint(nl, lr->rhs));
                else if (equal(strip_scales_l(lr->rhs), strip_scales_l(*old_label)))
                  copies.push_back(mk_disjoint(lr->lhs, nl));
              }
            }
            merge_pure(combined, copies);
          }
          AbsState next = st;
          next.heap = strengthen_separation(ac_normalize(combined));
          out.push_back(std::move(next));
        }
        return out;
      }
      return fail(FailReason::MemorySafety,
                  "no writable cell at '" + stmt.lhs.name + "' (full share required)");
    }

    case Stmt::Kind::Free: {
      for (const auto& rec : file_.records) {
        size_t arity = rec.fields.size();
        SpecPair spec = free_spec(arity);
        Subst m;
        m.add_var(pvar("x"), stmt.lhs);
        SymbolicHeap pre = subst(spec.pre, m);
        Subst ren;
        for (const auto& v : free_vars(pre)) {
          if (v == stmt.lhs) continue;
          ren.add_var(v, names_.fresh(v));
        }
        pre = subst(pre, ren);
        InferEngine eng(file_.defs, opts_.limits, opts_.solver);
        ++rep.queries;
        auto res = eng.infer(st.heap, pre);
        if (!res.frames) continue;
        States out;
        for (const auto& frame : res.frames->frames) {
          AbsState next = st;
          SymbolicHeap h = frame;
          next.heap = strengthen_separation(ac_normalize(h));
          out.push_back(std::move(next));
        }
        return out;
      }
      return fail(FailReason::MemorySafety,
                  "no cell to dispose at '" + stmt.lhs.name + "' (full share required)");
    }

    case Stmt::Kind::Malloc: {
      if (file_.records.empty())
        return fail(FailReason::MemorySafety, "no record shape declared for allocation");
      size_t arity = file_.records.front().fields.size();
      VarId fresh;
      AbsState renamed = rename_assigned(st, stmt.lhs, fresh);

      AbsState null_case = renamed;
      null_case.heap.pure.push_back(
          mk_eq(ArithTerm::mk_var(stmt.lhs), ArithTerm::mk_var(nil_var())));

      AbsState ok_case = renamed;
      std::vector<VarId> fields;
      for (size_t i = 0; i < arity; ++i) fields.push_back(names_.fresh_like("m", VarKind::Logical));
      VarId lab = names_.fresh_like("ml", VarKind::Label);
      Spatial cell = Spatial::labeled(LabelTerm::mk_var(lab), Spatial::cell(stmt.lhs, fields));
      ok_case.heap.spatial = ok_case.heap.spatial.is_emp()
                                 ? cell
                                 : Spatial::star({cell, ok_case.heap.spatial});
      ok_case.heap.spatial = ac_normalize(ok_case.heap.spatial);
      return States{null_case, ok_case};
    }

    case Stmt::Kind::Call:
    case Stmt::Kind::Par: {
      const FunctionDecl* f1 = file_.find_function(stmt.callee);
      if (!f1) return fail(FailReason::MemorySafety, "unknown function " + stmt.callee);
      const FunctionDecl* f2 = nullptr;
      if (stmt.kind == Stmt::Kind::Par) {
        f2 = file_.find_function(stmt.callee2);
        if (!f2) return fail(FailReason::MemorySafety, "unknown function " + stmt.callee2);
      }

      std::set<VarId> avoid = all_vars(st.heap);
      std::string what = stmt.kind == Stmt::Kind::Par
                             ? "par " + stmt.callee + " || " + stmt.callee2
                             : "call " + stmt.callee;

      // frame side condition: what the threads modify must not leak
      auto interference = [&](const FunctionDecl* callee, const std::vector<VarId>& actuals,
                              const std::set<VarId>& other_vars) -> bool {
        if (actuals.empty()) return false;
        if (!modset(callee->name).count(callee->ref_param())) return false;
        return other_vars.count(actuals[0]) > 0;
      };

      for (const auto& sp1 : f1->specs) {
        SpecInst i1 = instantiate_spec(*f1, sp1, stmt.args, avoid);
        std::vector<SpecInst> insts{i1};
        SymbolicHeap pre = i1.pre, post_all = i1.post;
        std::set<VarId> locals = i1.locals;
        if (f2) {
          std::set<VarId> avoid2 = avoid;
          auto a1 = all_vars(i1.pre);
          avoid2.insert(a1.begin(), a1.end());
          auto a1b = all_vars(i1.post);
          avoid2.insert(a1b.begin(), a1b.end());
          SpecInst i2 = instantiate_spec(*f2, f2->specs.front(), stmt.args2, avoid2);
          // pre1 (+) pre2 and post1 (+) post2
          SymbolicHeap both_pre;
          both_pre.bound = pre.bound;
          for (const auto& b : i2.pre.bound) both_pre.bound.push_back(b);
          both_pre.spatial = Spatial::wstar({pre.spatial, i2.pre.spatial});
          both_pre.pure = pre.pure;
          merge_pure(both_pre, i2.pre.pure);
          SymbolicHeap both_post;
          both_post.bound = post_all.bound;
          for (const auto& b : i2.post.bound) both_post.bound.push_back(b);
          both_post.spatial = Spatial::wstar({post_all.spatial, i2.post.spatial});
          both_post.pure = post_all.pure;
          merge_pure(both_post, i2.post.pure);
          pre = std::move(both_pre);
          post_all = std::move(both_post);
          locals.insert(i2.locals.begin(), i2.locals.end());

          // non-interference between the threads
          std::set<VarId> vars2 = free_vars(i2.pre);
          for (const auto& v : free_vars(i2.post)) vars2.insert(v);
          std::set<VarId> vars1 = free_vars(i1.pre);
          for (const auto& v : free_vars(i1.post)) vars1.insert(v);
          if (interference(f1, stmt.args, vars2) || interference(f2, stmt.args2, vars1))
            return fail(FailReason::FrameSideCondition,
                        "threads interfere on a modified variable");
        }

        auto combined = apply_summary(st, pre, post_all, locals, rep);
        if (!combined) continue;

        // (†) the callee must not modify free variables of the frame
        for (const auto& fr : combined->frames) {
          std::set<VarId> fv = free_vars(fr);
          if (interference(f1, stmt.args, fv) || (f2 && interference(f2, stmt.args2, fv)))
            return fail(FailReason::FrameSideCondition,
                        "modified variable occurs in the frame");
        }

        SiteInfo site{stmt.pos, what, {}};
        for (const auto& fr : combined->frames) site.frames.push_back(pretty(fr));
        rep.sites.push_back(std::move(site));

        States out;
        for (auto& h : combined->states) {
          AbsState next = st;
          next.heap = std::move(h);
          out.push_back(std::move(next));
        }
        return out;
      }
      return fail(FailReason::MemorySafety, "no applicable summary for " + what);
    }

    case Stmt::Kind::Fork: {
      const FunctionDecl* f = file_.find_function(stmt.callee);
      if (!f) return fail(FailReason::MemorySafety, "unknown function " + stmt.callee);
      std::set<VarId> avoid = all_vars(st.heap);
      for (const auto& sp : f->specs) {
        SpecInst inst = instantiate_spec(*f, sp, stmt.args, avoid);
        InferEngine eng(file_.defs, opts_.limits, opts_.solver);
        ++rep.queries;
        auto res = eng.infer(st.heap, inst.pre);
        if (!res.frames) continue;

        States out;
        for (const auto& frame : res.frames->frames) {
          // bind the spec variables, keep the rest of the frame
          Subst bind;
          for (const auto& a : frame.pure) {
            if (const auto* lr = std::get_if<LabelRel>(&a)) {
              if (!lr->disjoint && lr->lhs.kind == LabelTerm::Kind::Var &&
                  inst.locals.count(lr->lhs.var) && !bind.maps(lr->lhs.var))
                bind.add_label(lr->lhs.var, lr->rhs);
            } else if (const auto* pr = std::get_if<PermRel>(&a)) {
              if (pr->lhs.kind == PermTerm::Kind::Var && inst.locals.count(pr->lhs.var) &&
                  !bind.maps(pr->lhs.var))
                bind.add_perm(pr->lhs.var, pr->rhs);
            } else {
              const auto& ar = std::get<ArithRel>(a);
              if (!ar.neq && ar.lhs.kind == ArithTerm::Kind::Var &&
                  inst.locals.count(ar.lhs.var) && !bind.maps(ar.lhs.var))
                bind.add_val(ar.lhs.var, ar.rhs);
            }
          }
          SymbolicHeap ready = subst(inst.post, bind);
          std::set<VarId> avoid2 = all_vars(st.heap);
          ready = fresh_rename(ready, avoid2, names_);
          ready.bound.clear();

          std::set<VarId> survivors;
          for (const auto& v : free_vars(ready))
            if (inst.locals.count(v)) survivors.insert(v);

          SymbolicHeap residue;
          residue.spatial = frame.spatial;
          for (const auto& a : frame.pure) {
            PureAtom a2 = subst(a, bind);
            std::set<VarId> fv;
            free_vars_into(a2, fv);
            bool local = false;
            for (const auto& v : fv)
              if (inst.locals.count(v) && !survivors.count(v)) local = true;
            if (local) continue;
            bool dup = false;
            for (const auto& e : residue.pure)
              if (equal(e, a2)) dup = true;
            if (!dup) residue.pure.push_back(std::move(a2));
          }
          // the forked thread must not modify variables the residue mentions
          if (!stmt.args.empty() && modset(f->name).count(f->ref_param())) {
            std::set<VarId> fv = free_vars(residue);
            if (fv.count(stmt.args[0]))
              return fail(FailReason::FrameSideCondition,
                          "forked thread modifies a variable of the residual state");
          }

          VarId fresh;
          AbsState next = rename_assigned(AbsState{residue, st.pending}, stmt.lhs, fresh);
          next.pending[stmt.lhs] = ready;
          out.push_back(std::move(next));
        }
        SiteInfo site{stmt.pos, "fork " + stmt.callee, {}};
        for (const auto& s2 : out) site.frames.push_back(pretty(s2.heap));
        rep.sites.push_back(std::move(site));
        return out;
      }
      return fail(FailReason::MemorySafety, "no applicable summary for fork " + stmt.callee);
    }

    case Stmt::Kind::Join: {
      auto it = st.pending.find(stmt.lhs);
      if (it == st.pending.end())
        return fail(FailReason::JoinError,
                    "join on unknown or already joined token '" + stmt.lhs.name + "'");
      SymbolicHeap joined;
      joined.spatial = st.heap.spatial.is_emp()
                           ? it->second.spatial
                           : (it->second.spatial.is_emp()
                                  ? st.heap.spatial
                                  : Spatial::wstar({st.heap.spatial, it->second.spatial}));
      joined.pure = st.heap.pure;
      merge_pure(joined, it->second.pure);
      AbsState next;
      next.heap = strengthen_separation(ac_normalize(joined));
      next.pending = st.pending;
      next.pending.erase(stmt.lhs);
      return States{next};
    }
  }
  return fail(FailReason::MemorySafety, "unsupported statement");
}

Verifier::PostResult Verifier::post_seq(const std::vector<Stmt>& body, States sts,
                                        FunctionReport& rep) {
  for (const auto& stmt : body) {
    States next;
    for (const auto& st : sts) {
      auto r = post(stmt, st, rep);
      if (auto* e = std::get_if<Error>(&r)) return *e;
      for (auto& s : std::get<States>(r)) next.push_back(std::move(s));
    }
    sts = std::move(next);
  }
  return sts;
}

// ---------------------------------------------------------------------------

FunctionReport Verifier::verify_function(const FunctionDecl& f) {
  auto t0 = std::chrono::steady_clock::now();
  FunctionReport rep;
  rep.name = f.name;
  names_ = FreshGen{};  // per-function counter for reproducible output

  bool leak_check;
  switch (opts_.leak) {
    case VerifyOptions::LeakCheck::On: leak_check = true; break;
    case VerifyOptions::LeakCheck::Off: leak_check = false; break;
    default: {
      // library functions (called from another function) keep their frames;
      // self-recursion does not make a function a library
      bool called = false;
      for (const auto& g : file_.functions) {
        if (g.name == f.name) continue;
        std::vector<std::pair<std::string, VarId>> refs;
        call_sites(g.body, refs);
        for (const auto& [callee, a] : refs)
          if (callee == f.name) called = true;
      }
      leak_check = !called;
    }
  }

  for (const auto& sp : f.specs) {
    std::set<VarId> avoid = all_vars(sp.pre);
    names_.reserve(avoid);
    SymbolicHeap pre = fresh_rename(sp.pre, {}, names_);
    pre.bound.clear();

    AbsState st0;
    st0.heap = ac_normalize(pre);
    auto r = post_seq(f.body, {st0}, rep);
    if (auto* e = std::get_if<Error>(&r)) {
      rep.status = FunctionReport::Status::Failed;
      rep.reason = e->reason;
      rep.site = e->site;
      rep.detail = e->detail;
      break;
    }
    for (const auto& q : std::get<States>(r)) {
      InferEngine eng(file_.defs, opts_.limits, opts_.solver);
      ++rep.queries;
      auto res = leak_check ? eng.infer_emp(q.heap, sp.post) : eng.infer(q.heap, sp.post);
      if (!res.frames) {
        // distinguish a definitive mismatch from search failure where cheap:
        // a frame exists without the leak requirement means a leak
        if (leak_check) {
          InferEngine eng2(file_.defs, opts_.limits, opts_.solver);
          auto relaxed = eng2.infer(q.heap, sp.post);
          if (relaxed.frames) {
            rep.status = FunctionReport::Status::Failed;
            rep.reason = FailReason::Leak;
            rep.site = f.pos;
            rep.detail = "residual state is not empty";
            break;
          }
        }
        rep.status = FunctionReport::Status::Unknown;
        rep.site = f.pos;
        rep.detail = "post-state entailment not established";
        break;
      }
      SiteInfo site{f.pos, "summary check", {}};
      for (const auto& fr : res.frames->frames) site.frames.push_back(pretty(fr));
      rep.sites.push_back(std::move(site));
    }
    if (rep.status != FunctionReport::Status::Verified) break;
  }

  rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
  return rep;
}

VerificationReport Verifier::run() {
  VerificationReport out;
  for (const auto& f : file_.functions) out.functions.push_back(verify_function(f));
  return out;
}

}  // namespace slp
