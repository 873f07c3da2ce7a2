#include <doctest.h>

#include "slp/print.hpp"
#include "slp/program.hpp"

using namespace slp;

namespace {

Formula parse_ok(const std::string& text) {
  auto res = parse_formula(text);
  if (!res.errors.empty()) {
    for (const auto& e : res.errors) MESSAGE(e.pos.line, ":", e.pos.col, ": ", e.message);
  }
  REQUIRE(res.formula.has_value());
  return *res.formula;
}

SourceFile program_ok(const std::string& text) {
  auto res = parse_program(text);
  for (const auto& e : res.errors) MESSAGE(e.pos.line, ":", e.pos.col, ": ", e.message);
  REQUIRE(res.ok());
  return *res.file;
}

}  // namespace

TEST_CASE("formula round trips") {
  const char* samples[] = {
      "@a x |-> y ^ 1/2 * @b y |-> nil ^ 1/2 && x != y",
      "exists w. @g x |-> w ^ 1/2",
      "emp && true",
      "@a1 x |-> d,l,r ^ p * @a2 tree(l) ^ p * @a3 tree(r) ^ p && a = a1 o a2 o a3",
      "(@g2 tree(l) ^ p1 * @b1 tree(y) ^ s1) (+) (@g3 tree(r) ^ p2 * @b2 tree(y) ^ s2)",
      "@a tree(x) ^ p * @b tree(y) ^ s && a _|_ b && x != nil",
      "emp && s = s1 (+) s2 && p = p1 (x) p2",
      "@a x |-> y && a = b^1/2 o c^1/2",
      "@g (@a x |-> y * @b y |-> nil) ^ 1/2",
      "exists d,q,b,c. @b x |-> d,q * @c lseg(q,y) && x != y && a = b o c",
  };
  for (const char* s : samples) {
    CAPTURE(s);
    Formula f = parse_ok(s);
    Formula again = parse_ok(pretty(f));
    REQUIRE(f.disjuncts.size() == again.disjuncts.size());
    for (size_t i = 0; i < f.disjuncts.size(); ++i)
      CHECK(equal(f.disjuncts[i], again.disjuncts[i]));
  }
}

TEST_CASE("precedence and shapes") {
  Formula f = parse_ok("@a x |-> y ^ 1/2");
  const Spatial& s = f.disjuncts[0].spatial;
  // (@a x |-> y) ^ 1/2: the scale wraps the labeled cell
  REQUIRE(s.kind == Spatial::Kind::Scaled);
  CHECK(s.kids[0].kind == Spatial::Kind::Labeled);
  CHECK(s.kids[0].kids[0].kind == Spatial::Kind::Cell);

  // exists binds looser than &&
  Formula g = parse_ok("exists w. @g x |-> w ^ 1/2 && x != y");
  CHECK(g.disjuncts[0].bound.size() == 1);
  CHECK(g.disjuncts[0].pure.size() == 1);

  // homogeneous chains associate without parens; mixing requires them
  CHECK(parse_ok("@a x |-> y * @b y |-> nil * @c z |-> nil").disjuncts[0].spatial.kids.size() == 3);
  auto bad = parse_formula("@a x |-> y * @b y |-> nil (+) @c z |-> nil");
  CHECK(!bad.errors.empty());
  auto good = parse_formula("@a x |-> y * (@b y |-> nil (+) @c z |-> nil)");
  CHECK(good.errors.empty());
}

TEST_CASE("disjunction at the formula level") {
  Formula f = parse_ok("emp && x = nil \\/ @a x |-> y");
  CHECK(f.disjuncts.size() == 2);
}

TEST_CASE("kinds are inferred from positions") {
  Formula f = parse_ok("@a tree(x) ^ p && a _|_ b && s = s1 (+) s2");
  const SymbolicHeap& sh = f.disjuncts[0];
  std::set<VarId> fv = free_vars(sh);
  CHECK(fv.count(labvar("a")));
  CHECK(fv.count(labvar("b")));
  CHECK(fv.count(lvar("p")));
  CHECK(fv.count(lvar("s")));
  CHECK(fv.count(pvar("x")));
}

TEST_CASE("programs parse with records, predicates, and functions") {
  const char* src = R"(
record node(data, left, right);

predicates {
  emp && x = nil => @a0 tree(x);
  exists d,l,r,a,b,c. @a x |-> d,l,r * @b tree(l) * @c tree(r) && a0 = a o b o c
    => @a0 tree(x);
}

function traverse(x, y)
  req @a tree(x) ^ p * @b tree(y) ^ s && a _|_ b
  ens @a tree(x) ^ p * @b tree(y) ^ s && a _|_ b
{
  if (x == nil) { skip }
  else {
    process(x, y);
    local l; local r;
    l = [x.left];
    r = [x.right];
    par { traverse(l, y) } { traverse(r, y) }
  }
}

function process(x, y)
  req @a1 x |-> d,l,r ^ p1 * @b1 tree(y) ^ s1
  ens @a1 x |-> d,l,r ^ p1 * @b1 tree(y) ^ s1
{
  skip
}
)";
  SourceFile file = program_ok(src);
  CHECK(file.records.size() == 1);
  CHECK(file.defs.preds.count("tree") == 1);
  CHECK(file.defs.preds.at("tree").rules.size() == 2);
  REQUIRE(file.functions.size() == 2);
  const FunctionDecl& tr = file.functions[0];
  CHECK(tr.specs.size() == 1);
  REQUIRE(tr.body.size() == 1);
  CHECK(tr.body[0].kind == Stmt::Kind::If);
  // spec formulas give label/permission kinds to a, b, p, s
  auto fv = free_vars(tr.specs[0].pre);
  CHECK(fv.count(labvar("a")));
  CHECK(fv.count(lvar("p")));
  CHECK(fv.count(pvar("x")));

  // the tree rule binds its head label and parameters
  const auto& rule = file.defs.preds.at("tree").rules[1];
  CHECK(rule.label_param == labvar("a0"));
  REQUIRE(rule.params.size() == 1);
  CHECK(rule.params[0] == pvar("x"));
  CHECK(rule.body.bound.size() == 6);
}

TEST_CASE("sequences of instructions") {
  const char* src = R"(
record ref(val);
function touch(x, v)
  req @a x |-> u ^ 1
  ens exists w. @b x |-> w ^ 1
{
  local t;
  t = [x];
  [x] = v;
  t = malloc();
  if (t != nil) { free t } else { skip }
}
)";
  SourceFile file = program_ok(src);
  const auto& body = file.functions[0].body;
  REQUIRE(body.size() == 1);  // local scopes the tail
  const auto& tail = body[0].body;
  REQUIRE(tail.size() == 4);
  CHECK(tail[0].kind == Stmt::Kind::Load);
  CHECK(tail[1].kind == Stmt::Kind::Store);
  CHECK(tail[2].kind == Stmt::Kind::Malloc);
  CHECK(tail[3].kind == Stmt::Kind::If);
}

TEST_CASE("fork and join") {
  const char* src = R"(
record ref(val);
function fib(r, n)
  req @a r |-> u ^ 1
  ens exists w. @b r |-> w ^ 1
{
  local t; local m;
  m = n - 1;
  t = fork(fib, r, m);
  join(t)
}
)";
  SourceFile file = program_ok(src);
  const auto& tail = file.functions[0].body[0].body[0].body;
  REQUIRE(tail.size() == 3);
  CHECK(tail[1].kind == Stmt::Kind::Fork);
  CHECK(tail[1].callee == "fib");
  CHECK(tail[1].args.size() == 2);
  CHECK(tail[2].kind == Stmt::Kind::Join);
}

TEST_CASE("rejected constructs produce diagnostics") {
  auto res = parse_program(R"(
record ref(val);
function f(x)
  req @a x |-> u ^ 1 ens @a x |-> u ^ 1
{
  atomic r { skip }
}
)");
  REQUIRE(!res.errors.empty());
  CHECK(res.errors[0].message.find("atomic") != std::string::npos);

  auto res2 = parse_program("function f(x) req emp ens emp { g(x) }");
  CHECK(!res2.errors.empty());

  auto res3 = parse_formula("@a x |-> y *");
  CHECK(!res3.errors.empty());

  // bare value term in formula position is rejected
  auto res4 = parse_formula("emp && x");
  CHECK(!res4.errors.empty());
}

TEST_CASE("entail blocks") {
  const char* src = R"(
entail {
  @a x |-> y ^ 1/2 * @b y |-> nil ^ 1/2 && x != y
  |- exists w. @g x |-> w ^ 1/2
}
)";
  SourceFile file = program_ok(src);
  REQUIRE(file.entailments.size() == 1);
  const auto& q = file.entailments[0];
  CHECK(free_vars(q.lhs).count(pvar("x")));
  CHECK(free_vars(q.rhs).count(labvar("g")));
  CHECK(q.rhs.bound == std::vector<VarId>{pvar("w")});
}
