#pragma once

#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace slp {

// Exact rationals; permission equalities must be decidable exactly, so no
// floating point anywhere in the solver or the oracle.
using Rat = boost::multiprecision::cpp_rational;

std::string rat_to_string(const Rat& r);
std::optional<Rat> rat_parse(const std::string& s);

// A share in (0, 1]; 1 is the full (write) permission.
struct Perm {
  Rat value;

  static std::optional<Perm> make(const Rat& r);
  static Perm top() { return Perm{Rat(1)}; }

  bool operator==(const Perm& o) const { return value == o.value; }
};

// a (+) b, defined only when the result stays within the full permission.
std::optional<Perm> padd(const Perm& a, const Perm& b);

// a (x) b; total, the result is always a valid share.
Perm pmul(const Perm& a, const Perm& b);

}  // namespace slp
