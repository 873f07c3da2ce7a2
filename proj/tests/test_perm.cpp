#include <doctest.h>

#include <random>

#include "slp/perm.hpp"

using namespace slp;

namespace {

Perm p(long long n, long long d) { return *Perm::make(Rat(n, d)); }

// Dyadic menu used throughout the axiom checks.
std::vector<Perm> dyadic_menu() {
  std::vector<Perm> out;
  for (int d = 1; d <= 16; d *= 2)
    for (int n = 1; n <= d; ++n) out.push_back(p(n, d));
  return out;
}

std::vector<Perm> random_samples(int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> num(1, 200), den(1, 200);
  std::vector<Perm> out;
  while (static_cast<int>(out.size()) < count) {
    int n = num(rng), d = den(rng);
    if (n <= d) out.push_back(p(n, d));
  }
  return out;
}

}  // namespace

TEST_CASE("share addition is bounded by the full permission") {
  CHECK(padd(p(1, 2), p(1, 2)).value() == Perm::top());
  CHECK(!padd(p(3, 4), p(1, 2)).has_value());
  CHECK(padd(p(1, 4), p(1, 4)).value() == p(1, 2));
}

TEST_CASE("share multiplication") {
  CHECK(pmul(p(1, 2), p(1, 2)) == p(1, 4));
  CHECK(pmul(Perm::top(), p(3, 7)) == p(3, 7));
  CHECK(pmul(p(1, 2), p(3, 4)) == p(3, 8));
}

TEST_CASE("parsing and printing rationals") {
  CHECK(rat_to_string(Rat(2, 4)) == "1/2");
  CHECK(rat_to_string(Rat(3)) == "3");
  CHECK(*rat_parse("3/9") == Rat(1, 3));
  CHECK(*rat_parse("7") == Rat(7));
  CHECK(!rat_parse("1/0").has_value());
  CHECK(!rat_parse("x").has_value());
}

TEST_CASE("algebra laws on the dyadic menu and random rationals") {
  auto all = dyadic_menu();
  auto rnd = random_samples(60, 20240811);
  all.insert(all.end(), rnd.begin(), rnd.end());

  for (const auto& a : all) {
    // total permission: a (+) 1 is undefined
    CHECK(!padd(a, Perm::top()).has_value());
    // divisibility on the nose for every sample: a = a/2 (+) a/2
    Perm half{a.value / 2};
    CHECK(padd(half, half).value() == a);
    for (const auto& b : all) {
      auto ab = padd(a, b);
      auto ba = padd(b, a);
      CHECK(ab.has_value() == ba.has_value());
      if (ab) {
        CHECK(ab->value == ba->value);
        // no unit
        CHECK(ab->value != a.value);
        CHECK(ab->value != b.value);
      }
    }
  }

  // associativity and cancellation where defined, distribution of (x) over (+)
  for (size_t i = 0; i < all.size(); i += 3)
    for (size_t j = 1; j < all.size(); j += 5)
      for (size_t k = 2; k < all.size(); k += 7) {
        const Perm &a = all[i], &b = all[j], &c = all[k];
        auto ab = padd(a, b);
        auto bc = padd(b, c);
        if (ab && bc) {
          auto l = padd(*ab, c);
          auto r = padd(a, *bc);
          CHECK(l.has_value() == r.has_value());
          if (l) CHECK(l->value == r->value);
        }
        auto ac = padd(a, c);
        if (ab && ac && ab->value == ac->value) CHECK(b.value == c.value);
        if (ab) {
          auto lhs = pmul(*ab, c);
          auto rhs = padd(pmul(a, c), pmul(b, c));
          REQUIRE(rhs.has_value());
          CHECK(lhs.value == rhs->value);
        }
      }
}
