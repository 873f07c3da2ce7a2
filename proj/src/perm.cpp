#include "slp/perm.hpp"

namespace slp {

std::string rat_to_string(const Rat& r) {
  std::string num = numerator(r).str();
  if (denominator(r) == 1) return num;
  return num + "/" + denominator(r).str();
}

std::optional<Rat> rat_parse(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      boost::multiprecision::cpp_int n(s);
      return Rat(n);
    }
    boost::multiprecision::cpp_int n(s.substr(0, slash));
    boost::multiprecision::cpp_int d(s.substr(slash + 1));
    if (d == 0) return std::nullopt;
    return Rat(n, d);
  } catch (...) {
    return std::nullopt;
  }
}

std::optional<Perm> Perm::make(const Rat& r) {
  if (r <= 0 || r > 1) return std::nullopt;
  return Perm{r};
}

std::optional<Perm> padd(const Perm& a, const Perm& b) {
  Rat sum = a.value + b.value;
  if (sum > 1) return std::nullopt;
  return Perm{sum};
}

Perm pmul(const Perm& a, const Perm& b) { return Perm{a.value * b.value}; }

}  // namespace slp
