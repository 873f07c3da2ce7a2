#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "slp/ast.hpp"
#include "slp/linarith.hpp"

namespace slp {

enum class Entailment : uint8_t { Valid, NotProved };
enum class Sat3 : uint8_t { Sat, Unsat, Unknown };

struct SolverCfg {
  enum class Backend : uint8_t { Internal, SmtLib };
  Backend backend = Backend::Internal;
  std::string smt_path;
  int smt_timeout_ms = 2000;
};

// Saturated label facts: congruence closure over label terms plus the
// disjointness closure. Scaling never changes a region's footprint, so
// disjointness is tracked on scale-stripped terms.
class LabelFactBase {
 public:
  LabelFactBase();
  ~LabelFactBase();
  LabelFactBase(LabelFactBase&&) noexcept;
  LabelFactBase& operator=(LabelFactBase&&) noexcept;

  // Built by label_saturate; queries are const.
  bool eq(const LabelTerm& a, const LabelTerm& b) const;
  bool disjoint(const LabelTerm& a, const LabelTerm& b) const;
  size_t fact_count() const;

  struct Impl;
  std::unique_ptr<Impl> impl;
};

LabelFactBase label_saturate(const std::vector<PureAtom>& atoms);

// One hypothesis set, many queries. All answers err on the NotProved/Sat side.
class PureCtx {
 public:
  explicit PureCtx(std::vector<PureAtom> atoms, SolverCfg cfg = {});

  const std::vector<PureAtom>& atoms() const { return atoms_; }

  bool eq_values(const ArithTerm& a, const ArithTerm& b) const;
  bool eq_values(const VarId& a, const VarId& b) const;
  bool eq_perms(const PermTerm& a, const PermTerm& b) const;
  bool eq_labels(const LabelTerm& a, const LabelTerm& b) const;
  bool disjoint_labels(const LabelTerm& a, const LabelTerm& b) const;
  std::optional<Rat> perm_const(const PermTerm& t) const;

  Entailment entails(const PureAtom& goal) const;
  Sat3 sat() const;

 private:
  Poly perm_poly(const PermTerm& t) const;
  Poly arith_poly(const ArithTerm& t) const;
  std::vector<LinConstraint> perm_bounds() const;
  bool perm_system_feasible(std::vector<LinConstraint> extra) const;
  Entailment smt_fallback(const PureAtom& goal) const;

  std::vector<PureAtom> atoms_;
  SolverCfg cfg_;
  LinSpan values_;
  std::vector<std::pair<Poly, Poly>> value_neqs_;
  LinSpan perms_;
  std::vector<Poly> perm_sums_;   // every (+)-term occurring anywhere
  std::set<VarId> perm_vars_;     // including product slacks
  LabelFactBase labels_;
  mutable std::map<std::string, VarId> product_slots_;  // canonical x*y -> slack
  bool nonlinear_ = false;

  friend class PureCtxBuilder;
};

Entailment entails_pure(const std::vector<PureAtom>& hyp, const PureAtom& goal,
                        const SolverCfg& cfg = {});
Sat3 check_sat(const std::vector<PureAtom>& atoms, const SolverCfg& cfg = {});

}  // namespace slp
