#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slp/defs.hpp"
#include "slp/normalize.hpp"
#include "slp/pure.hpp"

namespace slp {

struct SearchLimits {
  int max_unfold = 4;    // unfolding generations per predicate atom
  int max_nodes = 10000;  // proof nodes across the whole forest
  int max_trees = 64;    // backtracking copies
};

// One judgment of the search: hypothesis |- goal with the goal's
// instantiatable variables (goal-only logical variables and opened
// existentials).
struct Sequent {
  SymbolicHeap lhs, rhs;
  std::set<VarId> inst;
};

struct FrameSet {
  std::vector<SymbolicHeap> frames;  // disjuncts; may be empty if the
                                     // hypothesis is unsatisfiable
};

struct ProofNode {
  Sequent seq;
  std::string rule;  // rule applied at this node ("" while open)
  std::vector<int> children;
  enum class Status : uint8_t { Open, Done, Pruned } status = Status::Open;
  SymbolicHeap frame;  // valid when Done
};

struct ProofTree {
  std::vector<ProofNode> nodes;  // nodes[0] is the root
  std::vector<int> open;         // stack of open leaves
};

struct EvalStats {
  int nodes = 1;
  int trees = 1;
};

struct EvalResult {
  std::optional<FrameSet> frames;  // nullopt: no proof within limits
  ProofTree proof;                 // the successful tree when frames is set
  EvalStats stats;
  std::string proof_text() const;
};

// One rule application: the premises extend the current tree. A branching
// step (goal-side unfolding) explores each premise in its own tree copy.
struct StepResult {
  bool applied = false;
  std::string rule;
  std::vector<Sequent> premises;
  bool branching = false;
};

class InferEngine {
 public:
  InferEngine(const DefEnv& env, SearchLimits lim = {}, SolverCfg solver = {});

  // Entailment with frame inference: every returned frame F satisfies
  // lhs |= rhs (+) F.
  EvalResult infer(const SymbolicHeap& lhs, const SymbolicHeap& rhs);
  // Same, but every frame must be spatially empty (plain entailment).
  EvalResult infer_emp(const SymbolicHeap& lhs, const SymbolicHeap& rhs);

  // Opens binders, distributes scales, computes instantiatable variables.
  Sequent make_sequent(const SymbolicHeap& lhs, const SymbolicHeap& rhs);

  // Individual steps, in strategy order (exposed for the structural tests).
  StepResult step_hypothesis(const Sequent& s);
  StepResult step_scale_pair(const Sequent& s);
  StepResult step_weak_goal(const Sequent& s);   // share-split / regroup-weak
  StepResult step_match(const Sequent& s);
  StepResult step_strong_goal(const Sequent& s);  // share-join / regroup-strong
  StepResult step_unfold(const Sequent& s);

  FreshGen& names() { return names_; }

 private:
  friend struct EngineSearch;
  const DefEnv& env_;
  SearchLimits lim_;
  SolverCfg solver_;
  FreshGen names_;
  int pi_depth_ = 0;  // nested side-condition guard

  EvalResult run(const SymbolicHeap& lhs, const SymbolicHeap& rhs, bool require_emp);
  StepResult next_step(const Sequent& s);
};

}  // namespace slp
