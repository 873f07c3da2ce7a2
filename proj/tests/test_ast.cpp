#include <doctest.h>

#include "slp/ast_ops.hpp"
#include "slp/print.hpp"

using namespace slp;

namespace {

Spatial half_cell(const char* lab, const char* head, std::vector<const char*> fs) {
  std::vector<VarId> fields;
  for (auto* f : fs) fields.push_back(std::string(f) == "nil" ? nil_var() : pvar(f));
  return atom(LabelTerm::mk_var(labvar(lab)), Spatial::cell(pvar(head), fields),
              PermTerm::mk_const(Rat(1, 2)));
}

}  // namespace

TEST_CASE("free variables") {
  // @a x |-> y && x != y  has free {a, x, y}
  SymbolicHeap sh;
  sh.spatial = Spatial::labeled(LabelTerm::mk_var(labvar("a")),
                                Spatial::cell(pvar("x"), {pvar("y")}));
  sh.pure.push_back(mk_neq(ArithTerm::mk_var(pvar("x")), ArithTerm::mk_var(pvar("y"))));
  auto fv = free_vars(sh);
  CHECK(fv == std::set<VarId>{labvar("a"), pvar("x"), pvar("y")});

  // exists w. @c x |-> w  has free {c, x}
  SymbolicHeap sh2;
  sh2.bound = {pvar("w")};
  sh2.spatial = Spatial::labeled(LabelTerm::mk_var(labvar("c")),
                                 Spatial::cell(pvar("x"), {pvar("w")}));
  CHECK(free_vars(sh2) == std::set<VarId>{labvar("c"), pvar("x")});

  // emp && true has no free variables
  SymbolicHeap sh3;
  CHECK(free_vars(sh3).empty());
}

TEST_CASE("substitution is simultaneous and capture avoiding") {
  // (@c x |-> w)[a/c, y/w] == @a x |-> y
  Spatial s = Spatial::labeled(LabelTerm::mk_var(labvar("c")),
                               Spatial::cell(pvar("x"), {pvar("w")}));
  Subst m;
  m.add_var(labvar("c"), labvar("a"));
  m.add_var(pvar("w"), pvar("y"));
  Spatial expect = Spatial::labeled(LabelTerm::mk_var(labvar("a")),
                                    Spatial::cell(pvar("x"), {pvar("y")}));
  CHECK(equal(subst(s, m), expect));

  // (exists w. x |-> w)[w/x] renames the binder first
  SymbolicHeap sh;
  sh.bound = {pvar("w")};
  sh.spatial = Spatial::cell(pvar("x"), {pvar("w")});
  Subst m2;
  m2.add_var(pvar("x"), pvar("w"));
  SymbolicHeap got = subst(sh, m2);
  REQUIRE(got.bound.size() == 1);
  CHECK(got.bound[0].name != "w");
  CHECK(got.spatial.head == pvar("w"));
  CHECK(got.spatial.fields[0] == got.bound[0]);

  // (x = y)[y1/y]
  PureAtom a = mk_eq(ArithTerm::mk_var(pvar("x")), ArithTerm::mk_var(pvar("y")));
  Subst m3;
  m3.add_var(pvar("y"), pvar("y1"));
  CHECK(pretty(subst(a, m3)) == "x = y1");

  // kind clash is rejected
  Subst bad;
  CHECK_THROWS_AS(bad.add_var(pvar("x"), labvar("a")), SubstError);
}

TEST_CASE("composition of substitutions with disjoint domains") {
  Spatial s = Spatial::cell(pvar("x"), {pvar("y"), pvar("z")});
  Subst m1, m2, m12;
  m1.add_var(pvar("x"), pvar("u"));
  m2.add_var(pvar("y"), pvar("v"));
  m12.add_var(pvar("x"), pvar("u"));
  m12.add_var(pvar("y"), pvar("v"));
  CHECK(equal(subst(subst(s, m1), m2), subst(s, m12)));
}

TEST_CASE("AC normalization flattens, sorts, and is idempotent") {
  Spatial a = half_cell("a", "x", {"y"});
  Spatial b = half_cell("b", "y", {"nil"});
  Spatial c = half_cell("c", "z", {"x"});

  Spatial left = Spatial::star({Spatial::star({a, b}), c});
  Spatial right = Spatial::star({a, Spatial::star({b, c})});
  CHECK(equal(ac_normalize(left), ac_normalize(right)));
  CHECK(ac_normalize(left).kids.size() == 3);

  Spatial ab = Spatial::star({a, b});
  Spatial ba = Spatial::star({b, a});
  CHECK(equal(ac_normalize(ab), ac_normalize(ba)));

  Spatial w = Spatial::wstar({a, Spatial::wstar({b, c})});
  CHECK(ac_normalize(w).kids.size() == 3);
  CHECK(ac_normalize(w).kind == Spatial::Kind::WStar);

  CHECK(equal(ac_normalize(ac_normalize(left)), ac_normalize(left)));

  // emp units disappear
  Spatial with_emp = Spatial::star({a, Spatial::emp(), b});
  CHECK(ac_normalize(with_emp).kids.size() == 2);
}

TEST_CASE("fresh renaming avoids the requested names") {
  SymbolicHeap sh;
  sh.bound = {pvar("w")};
  sh.spatial = Spatial::cell(pvar("x"), {pvar("w")});
  auto out = fresh_rename(sh, {pvar("w")});
  REQUIRE(out.bound.size() == 1);
  CHECK(out.bound[0].name == "w1");
  CHECK(out.spatial.fields[0].name == "w1");

  SymbolicHeap trivial;
  CHECK(equal(fresh_rename(trivial, {pvar("x")}), trivial));

  // renaming twice changes nothing further (idempotent up to alpha)
  auto out2 = fresh_rename(out, {pvar("w")});
  CHECK(equal(out2, out));
}

TEST_CASE("printing uses the surface syntax") {
  Spatial s = Spatial::star(
      {half_cell("a", "x", {"y"}), half_cell("b", "y", {"nil"})});
  CHECK(pretty(s) == "@a x |-> y ^ 1/2 * @b y |-> nil ^ 1/2");

  SymbolicHeap sh;
  sh.spatial = s;
  sh.pure.push_back(mk_neq(ArithTerm::mk_var(pvar("x")), ArithTerm::mk_var(pvar("y"))));
  sh.pure.push_back(mk_disjoint(LabelTerm::mk_var(labvar("a")), LabelTerm::mk_var(labvar("b"))));
  CHECK(pretty(sh) == "@a x |-> y ^ 1/2 * @b y |-> nil ^ 1/2 && x != y && a _|_ b");

  SymbolicHeap emp_true;
  CHECK(pretty(emp_true) == "emp && true");

  LabelTerm comp = LabelTerm::strong(
      LabelTerm::strong(LabelTerm::mk_var(labvar("a1")), LabelTerm::mk_var(labvar("a2"))),
      LabelTerm::mk_var(labvar("a3")));
  CHECK(pretty(comp) == "a1 o a2 o a3");
  CHECK(pretty(LabelTerm::scaled(LabelTerm::mk_var(labvar("a")), PermTerm::mk_var(lvar("p")))) ==
        "a^p");

  PermTerm sum = PermTerm::add(PermTerm::mk_var(lvar("s1")), PermTerm::mk_var(lvar("s2")));
  CHECK(pretty(sum) == "s1 (+) s2");
}
