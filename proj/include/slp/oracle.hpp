#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slp/defs.hpp"
#include "slp/perm.hpp"

namespace slp {

// Enumeration bounds. Values are plain integers plus tagged locations;
// nil is the integer 0. Cell shares are drawn from the menu closed under
// (+)/(x) with denominators capped, so scaled heaps stay in-universe.
struct Bounds {
  int max_locs = 3;
  std::vector<long long> ints = {0, 1};
  std::vector<Rat> perm_menu = {Rat(1, 4), Rat(1, 2), Rat(3, 4), Rat(1)};
  long long max_denominator = 64;
  int unfold_depth = 4;
  long long max_models = 2000000;
  bool parallel = true;
};

struct Val {
  bool is_loc = false;
  long long n = 0;

  static Val loc(long long k) { return Val{true, k}; }
  static Val num(long long k) { return Val{false, k}; }
  bool operator==(const Val& o) const { return is_loc == o.is_loc && n == o.n; }
  bool operator<(const Val& o) const {
    if (is_loc != o.is_loc) return is_loc < o.is_loc;
    return n < o.n;
  }
};

struct PCell {
  std::vector<Val> fields;
  Rat perm;  // in (0, 1]
  bool operator==(const PCell& o) const { return fields == o.fields && perm == o.perm; }
};

using PHeap = std::map<long long, PCell>;  // location index -> cell

struct Model {
  std::map<VarId, Val> stack;
  std::map<VarId, Rat> perms;
  std::map<VarId, PHeap> labels;  // valuation
  PHeap heap;                     // subject heap
};

std::string model_to_string(const Model& m);

// Satisfaction per the logic's semantics; predicates by fixed-point
// approximants of the given depth.
bool holds(const Model& m, const SymbolicHeap& sh, const DefEnv& env, const Bounds& b);
bool holds(const Model& m, const Formula& f, const DefEnv& env, const Bounds& b);

struct EntailCheck {
  enum class Kind { NoCountermodel, Countermodel, BoundExceeded };
  Kind kind = Kind::NoCountermodel;
  std::optional<Model> counter;
  long long models_checked = 0;
  std::string note;
};

// Bounded refutation of lhs |= rhs: enumerates the models of lhs within
// bounds and reports the first one that misses rhs. Logical variables that
// appear only on the rhs act as existential witnesses. A second path
// cross-checks every generated model with holds().
EntailCheck check_entail_bounded(const SymbolicHeap& lhs, const SymbolicHeap& rhs,
                                 const DefEnv& env, const Bounds& b);

// Complete, duplicate-free enumeration over the given variables; cells take
// one of the given arities. Intended for small bounds and self-tests.
std::vector<Model> enumerate_models(const std::vector<VarId>& value_vars,
                                    const std::vector<VarId>& label_vars,
                                    const std::vector<size_t>& cell_arities, const Bounds& b);

}  // namespace slp
