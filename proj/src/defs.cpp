#include "slp/defs.hpp"

namespace slp {

namespace {

void collect_preds(const Spatial& s, std::vector<const Spatial*>& out) {
  if (s.kind == Spatial::Kind::Pred) out.push_back(&s);
  for (const auto& k : s.kids) collect_preds(k, out);
}

void set_pred_depth(Spatial& s, int depth) {
  if (s.kind == Spatial::Kind::Pred) s.unfold_depth = depth;
  for (auto& k : s.kids) set_pred_depth(k, depth);
}

}  // namespace

std::vector<DefError> check_env(const DefEnv& env) {
  std::vector<DefError> errs;
  for (const auto& [name, def] : env.preds) {
    int idx = 0;
    for (const auto& rule : def.rules) {
      if (rule.params.size() != def.arity)
        errs.push_back({name, idx, "rule binds " + std::to_string(rule.params.size()) +
                                       " parameters, definition has arity " +
                                       std::to_string(def.arity)});
      if (rule.label_param.kind != VarKind::Label)
        errs.push_back({name, idx, "head label parameter must be a label variable"});

      std::set<VarId> allowed(rule.params.begin(), rule.params.end());
      allowed.insert(rule.label_param);
      for (const auto& v : free_vars(rule.body)) {
        if (!allowed.count(v))
          errs.push_back({name, idx, "free variable '" + v.name + "' not bound by the rule head"});
      }

      std::vector<const Spatial*> used;
      collect_preds(rule.body.spatial, used);
      for (const auto* p : used) {
        const PredDef* d = env.find(p->pred);
        if (!d)
          errs.push_back({name, idx, "undeclared predicate '" + p->pred + "' in rule body"});
        else if (d->arity != p->fields.size())
          errs.push_back({name, idx, "predicate '" + p->pred + "' used with arity " +
                                         std::to_string(p->fields.size()) + ", declared " +
                                         std::to_string(d->arity)});
      }
      ++idx;
    }
  }
  return errs;
}

std::vector<SymbolicHeap> unfold(const DefEnv& env, const LabelTerm& l, const std::string& pred,
                                 const std::vector<VarId>& args, const PermTerm& p,
                                 const std::set<VarId>& avoid, FreshGen& gen, int child_depth) {
  const PredDef* def = env.find(pred);
  if (!def) throw UnfoldError("unknown predicate '" + pred + "'");
  if (def->arity != args.size())
    throw UnfoldError("predicate '" + pred + "' expects " + std::to_string(def->arity) +
                      " arguments");

  std::set<VarId> avoid_all = avoid;
  for (const auto& a : args) avoid_all.insert(a);
  free_vars_into(l, avoid_all);
  free_vars_into(p, avoid_all);

  std::vector<SymbolicHeap> out;
  out.reserve(def->rules.size());
  for (const auto& rule : def->rules) {
    // Freshen binders first, then bind head variables.
    SymbolicHeap body = fresh_rename(rule.body, avoid_all, gen);
    Subst bind;
    for (size_t i = 0; i < rule.params.size(); ++i)
      if (!(rule.params[i] == args[i])) bind.add_var(rule.params[i], args[i]);
    bind.add_label(rule.label_param, l);
    body = subst(body, bind);

    SymbolicHeap res;
    res.bound = body.bound;
    Spatial wrapped = Spatial::labeled(l, body.spatial);
    if (!p.is_top()) wrapped = Spatial::scaled(std::move(wrapped), p);
    set_pred_depth(wrapped, child_depth);
    res.spatial = std::move(wrapped);
    res.pure = body.pure;
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace slp
