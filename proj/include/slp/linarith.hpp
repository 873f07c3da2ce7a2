#pragma once

#include <map>
#include <optional>
#include <vector>

#include "slp/ast.hpp"

namespace slp {

// Linear polynomial with exact rational coefficients.
struct Poly {
  std::map<VarId, Rat> coef;
  Rat cst = Rat(0);

  static Poly constant(Rat c) {
    Poly p;
    p.cst = std::move(c);
    return p;
  }
  static Poly variable(const VarId& v) {
    Poly p;
    p.coef[v] = 1;
    return p;
  }

  void add(const Poly& o, const Rat& scale = Rat(1));
  void sub(const Poly& o) { add(o, Rat(-1)); }
  void scale(const Rat& k);
  void tidy();  // drop zero coefficients
  bool is_zero() const;
  bool is_const() const { return coef.empty(); }
};

// Row-reduced span of equalities p = 0. Detects inconsistency (0 = c).
class LinSpan {
 public:
  void add_eq(Poly p);
  Poly reduce(Poly p) const;
  bool forces_zero(const Poly& p) const;
  std::optional<Rat> value_of(const Poly& p) const;  // constant after reduction
  bool inconsistent() const { return inconsistent_; }

 private:
  // Each row is normalized: leading variable (smallest VarId) has coefficient 1.
  std::vector<Poly> rows_;
  bool inconsistent_ = false;
};

struct LinConstraint {
  Poly poly;           // poly >= 0, or poly > 0 when strict
  bool strict = false;
};

// Exact Fourier-Motzkin feasibility over the rationals.
bool fm_feasible(std::vector<LinConstraint> cs);

}  // namespace slp
