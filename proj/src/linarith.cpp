#include "slp/linarith.hpp"

namespace slp {

void Poly::add(const Poly& o, const Rat& k) {
  for (const auto& [v, c] : o.coef) coef[v] += c * k;
  cst += o.cst * k;
  tidy();
}

void Poly::scale(const Rat& k) {
  for (auto& [v, c] : coef) c *= k;
  cst *= k;
  tidy();
}

void Poly::tidy() {
  for (auto it = coef.begin(); it != coef.end();)
    it = it->second == 0 ? coef.erase(it) : std::next(it);
}

bool Poly::is_zero() const { return coef.empty() && cst == 0; }

void LinSpan::add_eq(Poly p) {
  p = reduce(std::move(p));
  if (p.coef.empty()) {
    if (p.cst != 0) inconsistent_ = true;
    return;
  }
  const auto& [v, c] = *p.coef.begin();
  p.scale(Rat(1) / c);
  // Back-substitute into existing rows to keep the span reduced.
  for (auto& row : rows_) {
    auto it = row.coef.find(v);
    if (it != row.coef.end()) {
      Rat k = it->second;
      row.add(p, -k);
    }
  }
  rows_.push_back(std::move(p));
}

Poly LinSpan::reduce(Poly p) const {
  for (const auto& row : rows_) {
    const VarId& pivot = row.coef.begin()->first;
    auto it = p.coef.find(pivot);
    if (it != p.coef.end()) {
      Rat k = it->second;
      p.add(row, -k);
    }
  }
  return p;
}

bool LinSpan::forces_zero(const Poly& p) const { return reduce(p).is_zero(); }

std::optional<Rat> LinSpan::value_of(const Poly& p) const {
  Poly r = reduce(p);
  if (!r.is_const()) return std::nullopt;
  return r.cst;
}

bool fm_feasible(std::vector<LinConstraint> cs) {
  for (;;) {
    std::optional<VarId> pick;
    for (auto it = cs.begin(); it != cs.end();) {
      it->poly.tidy();
      if (it->poly.coef.empty()) {
        bool ok = it->strict ? it->poly.cst > 0 : it->poly.cst >= 0;
        if (!ok) return false;
        it = cs.erase(it);
      } else {
        if (!pick) pick = it->poly.coef.begin()->first;
        ++it;
      }
    }
    if (!pick) return true;

    // Eliminate `pick`: pair every lower bound with every upper bound.
    std::vector<LinConstraint> lowers, uppers, rest;
    for (auto& c : cs) {
      auto it = c.poly.coef.find(*pick);
      if (it == c.poly.coef.end()) {
        rest.push_back(std::move(c));
      } else if (it->second > 0) {
        lowers.push_back(std::move(c));
      } else {
        uppers.push_back(std::move(c));
      }
    }
    if (lowers.empty() || uppers.empty()) {
      cs = std::move(rest);  // unbounded on one side: satisfiable so far
      continue;
    }
    for (const auto& lo : lowers) {
      Rat cl = lo.poly.coef.at(*pick);
      for (const auto& up : uppers) {
        Rat cu = -up.poly.coef.at(*pick);
        LinConstraint merged;
        merged.poly = up.poly;
        merged.poly.scale(cl);
        merged.poly.add(lo.poly, cu);
        merged.strict = lo.strict || up.strict;
        rest.push_back(std::move(merged));
      }
    }
    cs = std::move(rest);
  }
}

}  // namespace slp
