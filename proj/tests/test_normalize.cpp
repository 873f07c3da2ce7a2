#include <doctest.h>

#include "slp/normalize.hpp"
#include "slp/print.hpp"
#include "slp/program.hpp"

using namespace slp;

namespace {

SymbolicHeap sheap(const std::string& s) {
  auto res = parse_formula(s);
  if (!res.errors.empty())
    for (const auto& e : res.errors) MESSAGE(e.pos.line, ":", e.pos.col, ": ", e.message);
  REQUIRE(res.formula.has_value());
  return res.formula->disjuncts[0];
}

std::string norm_str(const Spatial& s) { return pretty(ac_normalize(s)); }

}  // namespace

TEST_CASE("footprint labels compose") {
  SymbolicHeap sh = sheap("@a x |-> y ^ 1/2 * (@b tree(l) (+) @c tree(r))");
  auto fl = footprint_label(sh.spatial);
  REQUIRE(fl.has_value());
  CHECK(pretty(*fl) == "a^1/2 o (b ow c)");
  CHECK(!footprint_label(sheap("x |-> y").spatial).has_value());
}

TEST_CASE("scale distribution over groups") {
  PureCtx ctx({});
  // (@a A)^p keeps the atom form; (@g (A * B))^p distributes and names parts
  auto r1 = push_scale_inward(sheap("@g (@a x |-> y * @b y |-> nil) ^ 1/2").spatial, ctx);
  CHECK(norm_str(r1.spatial) == "@a x |-> y ^ 1/2 * @b y |-> nil ^ 1/2");
  REQUIRE(r1.emitted.size() == 1);
  CHECK(pretty(r1.emitted[0]) == "g = a o b");

  // @g ((@a A * @b B) ^ p): the label names the scaled heap
  auto r2 = push_scale_inward(sheap("@g ((@a x |-> y * @b y |-> nil) ^ 1/2)").spatial, ctx);
  CHECK(norm_str(r2.spatial) == "@a x |-> y ^ 1/2 * @b y |-> nil ^ 1/2");
  REQUIRE(r2.emitted.size() == 1);
  CHECK(pretty(r2.emitted[0]) == "g = a^1/2 o b^1/2");

  // nested scales collapse on the hypothesis side
  auto r3 = push_scale_inward(sheap("(@a tree(x) ^ 1/2) ^ 1/2").spatial, ctx);
  CHECK(norm_str(r3.spatial) == "@a tree(x) ^ 1/4");

  // scaling an empty heap yields an empty heap
  auto r4 = push_scale_inward(sheap("emp ^ 1/2 && true").spatial, ctx);
  CHECK(r4.spatial.is_emp());
}

TEST_CASE("goal-side distribution avoids the one-directional steps") {
  PureCtx ctx({});
  // weak groups stay put on the goal side
  Spatial in = sheap("(@a x |-> y (+) @b y |-> nil) ^ 1/2").spatial;
  auto r = push_scale_inward_rhs(in, ctx);
  CHECK(equal(r.spatial, ac_normalize(in)));
  // nested scales stay put as well
  Spatial in2 = sheap("(@a tree(x) ^ 1/2) ^ 1/2").spatial;
  auto r2 = push_scale_inward_rhs(in2, ctx);
  CHECK(equal(r2.spatial, ac_normalize(in2)));
  // equivalences still apply
  auto r3 = push_scale_inward_rhs(sheap("@g (@a x |-> y * @b y |-> nil) ^ 1/2").spatial, ctx);
  CHECK(norm_str(r3.spatial) == "@a x |-> y ^ 1/2 * @b y |-> nil ^ 1/2");
}

TEST_CASE("weak-to-strong: disjointness upgrade") {
  SymbolicHeap sh = sheap("(@a x |-> y (+) @b y |-> nil) && a _|_ b");
  SymbolicHeap out = strengthen_separation(sh);
  CHECK(pretty(out.spatial) == "@a x |-> y * @b y |-> nil");

  // nothing provable: no change
  SymbolicHeap sh2 = sheap("@a x |-> y (+) @b y |-> nil");
  CHECK(pretty(strengthen_separation(sh2).spatial) == pretty(ac_normalize(sh2.spatial)));

  // no weak conjunction at all: identity
  SymbolicHeap sh3 = sheap("emp && true");
  CHECK(strengthen_separation(sh3).spatial.is_emp());
}

TEST_CASE("weak-to-strong: shared-part join") {
  // (@a c ^ 1/4) (+) (@a c ^ 1/4 (+) @b d ^ 1/2) with a _|_ b:
  // halves of the shared cell join, then the upgrade separates them.
  SymbolicHeap sh = sheap(
      "(@g x |-> y ^ 1/4) (+) (@g x |-> y ^ 1/4 (+) @b y |-> nil ^ 1/2) && g _|_ b");
  SymbolicHeap out = strengthen_separation(sh);
  CHECK(pretty(out.spatial) == "@b y |-> nil ^ 1/2 * @g x |-> y ^ 1/2");

  // the concurrency shape: (A^s1 * B) (+) (A^s2 * C) with provable facts
  SymbolicHeap sh2 = sheap(
      "(@g2 tree(l) ^ p * @b tree(y) ^ s1) (+) (@g3 tree(r) ^ p * @b tree(y) ^ s2)"
      " && s = s1 (+) s2 && a _|_ b && a = a1 o g2 o g3");
  SymbolicHeap out2 = strengthen_separation(sh2);
  // tree(y) joins at s1 (+) s2 and the l/r halves separate strongly
  CHECK(pretty(out2.spatial) ==
        "@b tree(y) ^ (s1 (+) s2) * @g2 tree(l) ^ p * @g3 tree(r) ^ p");
}

TEST_CASE("no-op on formulas without weak separation or facts") {
  SymbolicHeap sh = sheap("@a x |-> y ^ 1/2 * @b y |-> nil ^ 1/2 && x != y");
  SymbolicHeap out = strengthen_separation(sh);
  CHECK(equal(out.spatial, ac_normalize(sh.spatial)));
  CHECK(out.pure.size() == sh.pure.size());
}
