#include "slp/pure.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "slp/ast_ops.hpp"
#include "slp/print.hpp"
#include "slp/smtlib.hpp"

namespace slp {

// ===========================================================================
// Label congruence closure + disjointness saturation
// ===========================================================================

namespace {

using PermKeyFn = std::function<std::string(const PermTerm&)>;

std::string structural_perm_key(const PermTerm& t) { return pretty(t); }

LabelTerm strip_scales(const LabelTerm& t) {
  switch (t.kind) {
    case LabelTerm::Kind::Var: return t;
    case LabelTerm::Kind::Scaled: return strip_scales(t.args[0]);
    case LabelTerm::Kind::Strong:
      return LabelTerm::strong(strip_scales(t.args[0]), strip_scales(t.args[1]));
    case LabelTerm::Kind::Weak:
      return LabelTerm::weak(strip_scales(t.args[0]), strip_scales(t.args[1]));
  }
  return t;
}

}  // namespace

struct LabelFactBase::Impl {
  struct Node {
    LabelTerm::Kind kind;
    std::string var;    // Var
    int a = -1, b = -1;  // children (Strong/Weak/Scaled)
    std::string pkey;   // Scaled
  };

  std::vector<Node> nodes;
  std::map<std::tuple<int, std::string, int, int, std::string>, int> interned;
  std::vector<int> uf;       // value equality
  std::vector<int> uf_dom;   // footprint (domain) equality, on stripped terms
  std::vector<int> strip_of;
  std::set<std::pair<int, int>> disj;  // canonical pairs of uf_dom reps
  PermKeyFn pkey_fn = structural_perm_key;

  int find(std::vector<int>& u, int x) const {
    while (u[x] != x) x = u[x] = u[u[x]];
    return x;
  }
  int find(const std::vector<int>& u, int x) const {
    while (u[x] != x) x = u[x];
    return x;
  }

  int intern(const LabelTerm& t) {
    int a = -1, b = -1;
    std::string var, pkey;
    switch (t.kind) {
      case LabelTerm::Kind::Var: var = t.var.name; break;
      case LabelTerm::Kind::Scaled:
        a = intern(t.args[0]);
        pkey = pkey_fn(t.scale[0]);
        break;
      default:
        a = intern(t.args[0]);
        b = intern(t.args[1]);
        break;
    }
    auto key = std::make_tuple(static_cast<int>(t.kind), var, a, b, pkey);
    auto it = interned.find(key);
    if (it != interned.end()) return it->second;
    int id = static_cast<int>(nodes.size());
    nodes.push_back(Node{t.kind, var, a, b, pkey});
    interned.emplace(key, id);
    uf.push_back(id);
    uf_dom.push_back(id);
    strip_of.push_back(-1);
    return id;
  }

  int intern_with_strip(const LabelTerm& t) {
    int id = intern(t);
    if (strip_of[id] < 0) {
      int s = intern(strip_scales(t));
      strip_of[id] = s;
      if (strip_of[s] < 0) strip_of[s] = s;
    }
    return id;
  }

  void unite(std::vector<int>& u, int x, int y) {
    x = find(u, x);
    y = find(u, y);
    if (x != y) u[std::max(x, y)] = std::min(x, y);
  }

  // Congruence fixpoint over both unions. Node counts are tiny, so the
  // quadratic sweep is fine.
  void congruence() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t i = 0; i < nodes.size(); ++i) {
        for (size_t j = i + 1; j < nodes.size(); ++j) {
          const Node &n = nodes[i], &m = nodes[j];
          if (n.kind != m.kind || n.var != m.var) continue;
          bool kids_eq = (n.a < 0 || find(uf, n.a) == find(uf, m.a)) &&
                         (n.b < 0 || find(uf, n.b) == find(uf, m.b));
          if (kids_eq && n.pkey == m.pkey && find(uf, (int)i) != find(uf, (int)j)) {
            unite(uf, (int)i, (int)j);
            changed = true;
          }
          bool kids_dom = (n.a < 0 || find(uf_dom, n.a) == find(uf_dom, m.a)) &&
                          (n.b < 0 || find(uf_dom, n.b) == find(uf_dom, m.b));
          // In footprint space scaling is transparent, handled via strips; the
          // remaining composites are congruent on footprint-equal children.
          if (n.kind != LabelTerm::Kind::Scaled && kids_dom &&
              find(uf_dom, (int)i) != find(uf_dom, (int)j)) {
            unite(uf_dom, (int)i, (int)j);
            changed = true;
          }
        }
      }
    }
  }

  void add_disj(int x, int y, std::vector<std::pair<int, int>>& work) {
    x = find(uf_dom, x);
    y = find(uf_dom, y);
    auto p = std::minmax(x, y);
    if (disj.insert({p.first, p.second}).second) work.push_back({p.first, p.second});
  }

  bool has_disj(int x, int y) const {
    x = find(uf_dom, x);
    y = find(uf_dom, y);
    auto p = std::minmax(x, y);
    if (disj.count({p.first, p.second})) return true;
    // An empty region (disjoint from itself) is disjoint from everything.
    if (disj.count({x, x}) || disj.count({y, y})) return true;
    return false;
  }

  // Saturation: components of a composite inherit disjointness; strong
  // composition is only defined on disjoint parts; empty regions are
  // disjoint from everything.
  void saturate(const std::vector<std::pair<int, int>>& seeds) {
    std::vector<std::pair<int, int>> work;
    // (c) every strong composition in the base
    for (size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].kind != LabelTerm::Kind::Strong) continue;
      int na = nodes[i].a, nb = nodes[i].b;  // strip_id may grow `nodes`
      add_disj(strip_id(na), strip_id(nb), work);
    }
    for (auto [x, y] : seeds) add_disj(x, y, work);

    while (!work.empty()) {
      auto [x, y] = work.back();
      work.pop_back();
      // (b) if either side's class contains a composite, its parts inherit
      for (size_t i = 0; i < nodes.size(); ++i) {
        Node n = nodes[i];  // copy: strip_id may reallocate
        if (n.kind != LabelTerm::Kind::Strong && n.kind != LabelTerm::Kind::Weak) continue;
        int ri = find(uf_dom, (int)i);
        int other = -1;
        if (ri == x)
          other = y;
        else if (ri == y)
          other = x;
        if (other < 0) continue;
        add_disj(strip_id(n.a), other, work);
        add_disj(strip_id(n.b), other, work);
      }
      // (f) empty region: explode against every known class
      if (x == y) {
        std::set<int> reps;
        for (size_t i = 0; i < nodes.size(); ++i) reps.insert(find(uf_dom, (int)i));
        for (int r : reps) add_disj(x, r, work);
      }
    }
  }

  int strip_id(int id) {
    if (strip_of[id] >= 0) return strip_of[id];
    // Build the strip node on demand.
    const Node n = nodes[id];
    int s;
    switch (n.kind) {
      case LabelTerm::Kind::Var: s = id; break;
      case LabelTerm::Kind::Scaled: s = strip_id(n.a); break;
      default: {
        int a = strip_id(n.a), b = strip_id(n.b);
        auto key = std::make_tuple(static_cast<int>(n.kind), std::string(), a, b, std::string());
        auto it = interned.find(key);
        if (it != interned.end()) {
          s = it->second;
        } else {
          s = static_cast<int>(nodes.size());
          nodes.push_back(Node{n.kind, "", a, b, ""});
          interned.emplace(key, s);
          uf.push_back(s);
          uf_dom.push_back(s);
          strip_of.push_back(s);
        }
        break;
      }
    }
    strip_of[id] = s;
    if (strip_of[s] < 0) strip_of[s] = s;
    return s;
  }

  // Lookup without mutation: resolves a term to an existing class via its
  // congruence signature, or reports absence.
  std::optional<int> lookup(const LabelTerm& t, bool dom_space) const {
    const std::vector<int>& u = dom_space ? uf_dom : uf;
    LabelTerm q = dom_space ? strip_scales(t) : t;
    std::function<std::optional<int>(const LabelTerm&)> go =
        [&](const LabelTerm& s) -> std::optional<int> {
      int a = -1, b = -1;
      std::string var, pkey;
      switch (s.kind) {
        case LabelTerm::Kind::Var: var = s.var.name; break;
        case LabelTerm::Kind::Scaled: {
          auto ka = go(s.args[0]);
          if (!ka) return std::nullopt;
          a = *ka;
          pkey = pkey_fn(s.scale[0]);
          break;
        }
        default: {
          auto ka = go(s.args[0]), kb = go(s.args[1]);
          if (!ka || !kb) return std::nullopt;
          a = *ka;
          b = *kb;
          break;
        }
      }
      // Any base node with the same shape up to the union-find?
      for (size_t i = 0; i < nodes.size(); ++i) {
        const Node& n = nodes[i];
        if (n.kind != s.kind || n.var != var || n.pkey != pkey) continue;
        bool kids = (a < 0 || (n.a >= 0 && find(u, n.a) == find(u, a))) &&
                    (b < 0 || (n.b >= 0 && find(u, n.b) == find(u, b)));
        if ((a < 0) != (n.a < 0) || (b < 0) != (n.b < 0)) continue;
        if (kids) return find(u, (int)i);
      }
      return std::nullopt;
    };
    return go(q);
  }
};

LabelFactBase::LabelFactBase() : impl(std::make_unique<Impl>()) {}
LabelFactBase::~LabelFactBase() = default;
LabelFactBase::LabelFactBase(LabelFactBase&&) noexcept = default;
LabelFactBase& LabelFactBase::operator=(LabelFactBase&&) noexcept = default;

bool LabelFactBase::eq(const LabelTerm& a, const LabelTerm& b) const {
  auto ra = impl->lookup(a, false), rb = impl->lookup(b, false);
  if (ra && rb) return *ra == *rb;
  // Structurally identical unseen terms are still equal.
  return cmp(a, b) == 0;
}

bool LabelFactBase::disjoint(const LabelTerm& a, const LabelTerm& b) const {
  auto ra = impl->lookup(a, true), rb = impl->lookup(b, true);
  if (!ra || !rb) {
    // Unseen argument: only an empty-region fact on the other side helps.
    auto one = ra ? ra : rb;
    if (one) {
      int r = impl->find(impl->uf_dom, *one);
      return impl->disj.count({r, r}) > 0;
    }
    return false;
  }
  return impl->has_disj(*ra, *rb);
}

size_t LabelFactBase::fact_count() const { return impl->disj.size(); }

namespace {

LabelFactBase saturate_impl(const std::vector<PureAtom>& atoms, PermKeyFn keyer) {
  LabelFactBase base;
  auto& im = *base.impl;
  im.pkey_fn = std::move(keyer);
  std::vector<std::pair<int, int>> seeds;
  std::vector<std::pair<int, int>> eqs;
  for (const auto& a : atoms) {
    const auto* lr = std::get_if<LabelRel>(&a);
    if (!lr) continue;
    int x = im.intern_with_strip(lr->lhs);
    int y = im.intern_with_strip(lr->rhs);
    if (lr->disjoint)
      seeds.push_back({im.strip_id(x), im.strip_id(y)});
    else
      eqs.push_back({x, y});
  }
  for (auto [x, y] : eqs) {
    im.unite(im.uf, x, y);
    im.unite(im.uf_dom, im.strip_id(x), im.strip_id(y));
  }
  im.congruence();
  im.saturate(seeds);
  return base;
}

}  // namespace

LabelFactBase label_saturate(const std::vector<PureAtom>& atoms) {
  return saturate_impl(atoms, structural_perm_key);
}

// ===========================================================================
// PureCtx
// ===========================================================================

namespace {

void collect_perm_terms(const PermTerm& t, std::vector<const PermTerm*>& out) {
  out.push_back(&t);
  for (const auto& a : t.args) collect_perm_terms(a, out);
}

void collect_perms_in_label(const LabelTerm& t, std::vector<const PermTerm*>& out) {
  if (t.kind == LabelTerm::Kind::Scaled) collect_perm_terms(t.scale[0], out);
  for (const auto& a : t.args) collect_perms_in_label(a, out);
}

void collect_perms(const PureAtom& a, std::vector<const PermTerm*>& out) {
  if (const auto* pr = std::get_if<PermRel>(&a)) {
    collect_perm_terms(pr->lhs, out);
    collect_perm_terms(pr->rhs, out);
  } else if (const auto* lr = std::get_if<LabelRel>(&a)) {
    collect_perms_in_label(lr->lhs, out);
    collect_perms_in_label(lr->rhs, out);
  }
}

std::string poly_key(const Poly& p) {
  std::ostringstream os;
  for (const auto& [v, c] : p.coef) os << v.name << "*" << rat_to_string(c) << "+";
  os << rat_to_string(p.cst);
  return os.str();
}

}  // namespace

PureCtx::PureCtx(std::vector<PureAtom> atoms, SolverCfg cfg)
    : atoms_(std::move(atoms)), cfg_(std::move(cfg)) {
  std::vector<const PermTerm*> pterms;
  for (const auto& a : atoms_) {
    if (const auto* ar = std::get_if<ArithRel>(&a)) {
      Poly d = arith_poly(ar->lhs);
      d.sub(arith_poly(ar->rhs));
      if (ar->neq)
        value_neqs_.push_back({arith_poly(ar->lhs), arith_poly(ar->rhs)});
      else
        values_.add_eq(std::move(d));
    }
    collect_perms(a, pterms);
  }
  // Permission equalities; two passes so constants pinned by the first pass
  // linearize products in the second.
  for (int pass = 0; pass < 2; ++pass) {
    LinSpan next;
    for (const auto& a : atoms_) {
      if (const auto* pr = std::get_if<PermRel>(&a)) {
        Poly d = perm_poly(pr->lhs);  // resolves against the previous span
        d.sub(perm_poly(pr->rhs));
        next.add_eq(std::move(d));
      }
    }
    perms_ = std::move(next);
  }
  // Bounds for every variable and every sum occurring anywhere.
  for (const auto* t : pterms) {
    if (t->kind == PermTerm::Kind::Var) perm_vars_.insert(t->var);
    if (t->kind == PermTerm::Kind::Add) perm_sums_.push_back(perm_poly(*t));
  }

  labels_ = saturate_impl(atoms_, [this](const PermTerm& t) {
    return poly_key(perms_.reduce(perm_poly(t)));
  });
}

Poly PureCtx::arith_poly(const ArithTerm& t) const {
  switch (t.kind) {
    case ArithTerm::Kind::Var: return Poly::variable(t.var);
    case ArithTerm::Kind::Const: return Poly::constant(Rat(t.num));
    case ArithTerm::Kind::Add: {
      Poly p = arith_poly(t.args[0]);
      p.add(arith_poly(t.args[1]));
      return p;
    }
  }
  return Poly{};
}

Poly PureCtx::perm_poly(const PermTerm& t) const {
  switch (t.kind) {
    case PermTerm::Kind::Const: return Poly::constant(t.value);
    case PermTerm::Kind::Var: return Poly::variable(t.var);
    case PermTerm::Kind::Add: {
      Poly p = perm_poly(t.args[0]);
      p.add(perm_poly(t.args[1]));
      return p;
    }
    case PermTerm::Kind::Mul: {
      Poly a = perm_poly(t.args[0]);
      Poly b = perm_poly(t.args[1]);
      auto ca = perms_.value_of(a), cb = perms_.value_of(b);
      if (ca) {
        b.scale(*ca);
        return b;
      }
      if (cb) {
        a.scale(*cb);
        return a;
      }
      // Opaque product: a slack variable bounded like any share.
      std::string ka = poly_key(perms_.reduce(a)), kb = poly_key(perms_.reduce(b));
      if (kb < ka) std::swap(ka, kb);
      std::string key = ka + "(x)" + kb;
      auto it = product_slots_.find(key);
      VarId slack;
      if (it != product_slots_.end()) {
        slack = it->second;
      } else {
        slack = lvar("%prod" + std::to_string(product_slots_.size()));
        product_slots_.emplace(key, slack);
      }
      const_cast<PureCtx*>(this)->perm_vars_.insert(slack);
      const_cast<PureCtx*>(this)->nonlinear_ = true;
      return Poly::variable(slack);
    }
  }
  return Poly{};
}

std::vector<LinConstraint> PureCtx::perm_bounds() const {
  std::vector<LinConstraint> cs;
  for (const auto& v : perm_vars_) {
    Poly p = Poly::variable(v);
    cs.push_back({p, true});  // v > 0
    Poly q = Poly::constant(Rat(1));
    q.sub(p);
    cs.push_back({q, false});  // v <= 1
  }
  for (const auto& s : perm_sums_) {
    cs.push_back({s, true});
    Poly q = Poly::constant(Rat(1));
    q.sub(s);
    cs.push_back({q, false});
  }
  return cs;
}

bool PureCtx::perm_system_feasible(std::vector<LinConstraint> extra) const {
  if (perms_.inconsistent()) return false;
  auto cs = perm_bounds();
  for (auto& c : extra) cs.push_back(std::move(c));
  for (auto& c : cs) c.poly = perms_.reduce(std::move(c.poly));
  return fm_feasible(std::move(cs));
}

bool PureCtx::eq_values(const ArithTerm& a, const ArithTerm& b) const {
  if (values_.inconsistent()) return true;
  Poly d = arith_poly(a);
  d.sub(arith_poly(b));
  return values_.forces_zero(d);
}

bool PureCtx::eq_values(const VarId& a, const VarId& b) const {
  return a == b || eq_values(ArithTerm::mk_var(a), ArithTerm::mk_var(b));
}

bool PureCtx::eq_perms(const PermTerm& a, const PermTerm& b) const {
  Poly d = perm_poly(a);
  d.sub(perm_poly(b));
  if (perms_.forces_zero(d)) return true;
  // Bound-forced equality: both strict separations infeasible.
  Poly neg = d;
  neg.scale(Rat(-1));
  return !perm_system_feasible({{d, true}}) && !perm_system_feasible({{neg, true}});
}

bool PureCtx::eq_labels(const LabelTerm& a, const LabelTerm& b) const {
  return labels_.eq(a, b);
}

bool PureCtx::disjoint_labels(const LabelTerm& a, const LabelTerm& b) const {
  if (labels_.disjoint(a, b)) return true;
  // Strong compositions decompose: dom(l1 o l2) = dom(l1) + dom(l2), defined
  // because the composition itself forces l1 _|_ l2.
  if (a.kind == LabelTerm::Kind::Strong)
    return disjoint_labels(a.args[0], b) && disjoint_labels(a.args[1], b) &&
           disjoint_labels(a.args[0], a.args[1]);
  if (b.kind == LabelTerm::Kind::Strong) return disjoint_labels(b, a);
  if (a.kind == LabelTerm::Kind::Scaled) return disjoint_labels(a.args[0], b);
  if (b.kind == LabelTerm::Kind::Scaled) return disjoint_labels(a, b.args[0]);
  return false;
}

std::optional<Rat> PureCtx::perm_const(const PermTerm& t) const {
  return perms_.value_of(perm_poly(t));
}

Sat3 PureCtx::sat() const {
  if (values_.inconsistent()) return Sat3::Unsat;
  for (const auto& [l, r] : value_neqs_) {
    Poly d = l;
    d.sub(r);
    if (values_.forces_zero(d)) return Sat3::Unsat;
  }
  if (!perm_system_feasible({})) return Sat3::Unsat;
  if (nonlinear_) return Sat3::Unknown;
  return Sat3::Sat;
}

Entailment PureCtx::entails(const PureAtom& goal) const {
  if (sat() == Sat3::Unsat) return Entailment::Valid;

  if (const auto* ar = std::get_if<ArithRel>(&goal)) {
    Poly d = arith_poly(ar->lhs);
    d.sub(arith_poly(ar->rhs));
    if (!ar->neq) return values_.forces_zero(d) ? Entailment::Valid : smt_fallback(goal);
    // l != r holds when assuming equality breaks the value side.
    LinSpan with_eq = values_;
    with_eq.add_eq(d);
    if (with_eq.inconsistent()) return Entailment::Valid;
    for (const auto& [nl, nr] : value_neqs_) {
      Poly nd = nl;
      nd.sub(nr);
      if (with_eq.forces_zero(nd)) return Entailment::Valid;
    }
    return smt_fallback(goal);
  }

  if (const auto* pr = std::get_if<PermRel>(&goal)) {
    // Definedness of every sum in the goal must follow from the hypotheses.
    std::vector<const PermTerm*> ts;
    collect_perm_terms(pr->lhs, ts);
    collect_perm_terms(pr->rhs, ts);
    for (const auto* t : ts) {
      if (t->kind != PermTerm::Kind::Add) continue;
      Poly s = perm_poly(*t);
      Poly le0 = s;
      le0.scale(Rat(-1));  // s <= 0 feasible?
      Poly gt1 = s;
      gt1.cst -= 1;  // s > 1 feasible?
      if (perm_system_feasible({{le0, false}}) || perm_system_feasible({{gt1, true}}))
        return smt_fallback(goal);
    }
    return eq_perms(pr->lhs, pr->rhs) ? Entailment::Valid : smt_fallback(goal);
  }

  const auto& lr = std::get<LabelRel>(goal);
  if (lr.disjoint)
    return disjoint_labels(lr.lhs, lr.rhs) ? Entailment::Valid : Entailment::NotProved;
  return eq_labels(lr.lhs, lr.rhs) ? Entailment::Valid : Entailment::NotProved;
}

// QF_NRA fallback for goals the linear engine cannot settle.
Entailment PureCtx::smt_fallback(const PureAtom& goal) const {
  if (cfg_.backend != SolverCfg::Backend::SmtLib || cfg_.smt_path.empty())
    return Entailment::NotProved;
  const auto* gr = std::get_if<ArithRel>(&goal);
  const auto* gp = std::get_if<PermRel>(&goal);
  if (!gr && !gp) return Entailment::NotProved;

  std::set<VarId> vars;
  auto add_vars = [&](const PureAtom& a) { free_vars_into(a, vars); };
  for (const auto& a : atoms_) add_vars(a);
  add_vars(goal);

  std::ostringstream os;
  os << "(set-logic QF_NRA)\n";
  std::map<std::string, std::string> rename;
  int n = 0;
  for (const auto& v : vars) rename[v.name] = "v" + std::to_string(n++);
  for (const auto& [from, to] : rename) os << "(declare-const " << to << " Real)\n";

  std::function<std::string(const ArithTerm&)> at = [&](const ArithTerm& t) -> std::string {
    switch (t.kind) {
      case ArithTerm::Kind::Var:
        return is_nil(t.var) ? std::string("0") : rename[t.var.name];
      case ArithTerm::Kind::Const: {
        if (t.num < 0) return "(- " + std::to_string(-t.num) + ")";
        return std::to_string(t.num);
      }
      case ArithTerm::Kind::Add: return "(+ " + at(t.args[0]) + " " + at(t.args[1]) + ")";
    }
    return "0";
  };
  std::function<std::string(const PermTerm&)> pt = [&](const PermTerm& t) -> std::string {
    switch (t.kind) {
      case PermTerm::Kind::Const:
        return "(/ " + numerator(t.value).str() + " " + denominator(t.value).str() + ")";
      case PermTerm::Kind::Var: return rename[t.var.name];
      case PermTerm::Kind::Add: return "(+ " + pt(t.args[0]) + " " + pt(t.args[1]) + ")";
      case PermTerm::Kind::Mul: return "(* " + pt(t.args[0]) + " " + pt(t.args[1]) + ")";
    }
    return "0";
  };
  auto atom_str = [&](const PureAtom& a) -> std::string {
    if (const auto* ar = std::get_if<ArithRel>(&a)) {
      std::string eq = "(= " + at(ar->lhs) + " " + at(ar->rhs) + ")";
      return ar->neq ? "(not " + eq + ")" : eq;
    }
    if (const auto* pr = std::get_if<PermRel>(&a))
      return "(= " + pt(pr->lhs) + " " + pt(pr->rhs) + ")";
    return "true";  // label atoms are outside the arithmetic fragment
  };

  // Share bounds for permission variables (and sums via subterm assertions).
  std::vector<const PermTerm*> ts;
  for (const auto& a : atoms_) collect_perms(a, ts);
  collect_perms(goal, ts);
  std::set<std::string> emitted;
  for (const auto* t : ts) {
    std::string s = pt(*t);
    if (!emitted.insert(s).second) continue;
    os << "(assert (and (> " << s << " 0) (<= " << s << " 1)))\n";
  }
  for (const auto& a : atoms_) os << "(assert " << atom_str(a) << ")\n";
  os << "(assert (not " << atom_str(goal) << "))\n";
  os << "(check-sat)\n";

  SmtLibClient client(cfg_.smt_path, cfg_.smt_timeout_ms);
  return client.check(os.str()) == SmtAnswer::Unsat ? Entailment::Valid : Entailment::NotProved;
}

Entailment entails_pure(const std::vector<PureAtom>& hyp, const PureAtom& goal,
                        const SolverCfg& cfg) {
  return PureCtx(hyp, cfg).entails(goal);
}

Sat3 check_sat(const std::vector<PureAtom>& atoms, const SolverCfg& cfg) {
  return PureCtx(atoms, cfg).sat();
}

}  // namespace slp
