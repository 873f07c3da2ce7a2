#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slp/ast.hpp"
#include "slp/ast_ops.hpp"

namespace slp {

// One rule  body => @label_param P(params).
struct InductiveRule {
  std::vector<VarId> params;
  VarId label_param;
  SymbolicHeap body;
};

struct PredDef {
  size_t arity = 0;
  std::vector<InductiveRule> rules;
};

struct DefEnv {
  std::map<std::string, PredDef> preds;

  const PredDef* find(const std::string& name) const {
    auto it = preds.find(name);
    return it == preds.end() ? nullptr : &it->second;
  }
};

struct DefError {
  std::string pred;
  int rule_index = -1;  // -1: definition-level problem
  std::string message;
};

// Arity consistency, free-variable containment, label-parameter shape, and
// that every predicate mentioned in a body is declared.
std::vector<DefError> check_env(const DefEnv& env);

struct UnfoldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unfolds (@_l P(args))^p into one symbolic heap per rule: the rule body with
// parameters bound to args, the head label bound to l, binders freshened
// against `avoid`, and the whole body spatial wrapped as (@_l body)^p.
// Callers push the wrapper inward (normalize) before matching on the result.
std::vector<SymbolicHeap> unfold(const DefEnv& env, const LabelTerm& l, const std::string& pred,
                                 const std::vector<VarId>& args, const PermTerm& p,
                                 const std::set<VarId>& avoid, FreshGen& gen, int child_depth);

}  // namespace slp
