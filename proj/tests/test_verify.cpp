#include <doctest.h>

#include "slp/print.hpp"
#include "slp/verify.hpp"

using namespace slp;

namespace {

SymbolicHeap sheap(const std::string& s) {
  auto res = parse_formula(s);
  REQUIRE(res.formula.has_value());
  return res.formula->disjuncts[0];
}

SourceFile parse_file(const std::string& src) {
  auto res = parse_program(src);
  for (const auto& e : res.errors) MESSAGE(e.pos.line, ":", e.pos.col, ": ", e.message);
  REQUIRE(res.ok());
  return *res.file;
}

const char* kTreeProgram = R"(
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
  req exists d,l,r. @a1 x |-> d,l,r ^ p1 * @b1 tree(y) ^ s1
  ens exists d,l,r. @a1 x |-> d,l,r ^ p1 * @b1 tree(y) ^ s1
{
  local d;
  d = [x.data];
  rdtree(y)
}

function rdtree(x)
  req @a tree(x) ^ p
  ens @a tree(x) ^ p
{
  if (x == nil) { skip }
  else {
    local d; local l; local r;
    d = [x.data];
    l = [x.left];
    r = [x.right];
    par { rdtree(l) } { rdtree(r) }
  }
}
)";

}  // namespace

TEST_CASE("inconsistency over-approximation") {
  // two strongly separated cells at one address
  CHECK(unsat_over_approx(sheap("@a x |-> y ^ 1/2 * @b x |-> z ^ 1/2")));
  // an allocated address is never nil
  CHECK(unsat_over_approx(sheap("@a x |-> y && x = nil")));
  // satisfiable states stay
  CHECK(!unsat_over_approx(sheap("emp && x = y")));
  // weakly shared cells with recorded disjointness cannot alias
  CHECK(unsat_over_approx(sheap("(@a x |-> u ^ 1/2 (+) @b x |-> u ^ 1/2) && a _|_ b")));
  // ... without the fact they may be two shares of one region
  CHECK(!unsat_over_approx(sheap("@a x |-> u ^ 1/2 (+) @b x |-> u ^ 1/2")));
  // share arithmetic out of range
  CHECK(unsat_over_approx(sheap("@a x |-> u ^ (p1 (+) p2) && p1 = 3/4 && p2 = 1/2")));
}

TEST_CASE("built-in summaries demand the full share") {
  SpecPair st = store_spec(1, 0);
  REQUIRE(st.pre.spatial.kind == Spatial::Kind::Labeled);  // no scale: full share
  CHECK(st.post.spatial.kind == Spatial::Kind::Labeled);
  CHECK(st.post.spatial.kids[0].fields[0] == pvar("v"));
  // the rewritten cell carries a fresh region name
  CHECK(!(st.pre.spatial.label[0].var == st.post.spatial.label[0].var));

  SpecPair fr = free_spec(2);
  CHECK(fr.pre.spatial.kind == Spatial::Kind::Labeled);
  CHECK(fr.post.spatial.is_emp());

  SpecPair sk = skip_spec();
  CHECK(sk.pre.spatial.is_emp());
  CHECK(sk.post.spatial.is_emp());
}

TEST_CASE("straight-line heap manipulation verifies") {
  SourceFile file = parse_file(R"(
record ref(val);
function touch(x, v)
  req @a x |-> u ^ 1
  ens exists w. @b x |-> w ^ 1
{
  local t;
  t = [x];
  [x] = v
}
)");
  Verifier v(file);
  auto rep = v.run();
  REQUIRE(rep.functions.size() == 1);
  CHECK(rep.functions[0].status == FunctionReport::Status::Verified);
}

TEST_CASE("allocation handles both outcomes and free releases") {
  SourceFile file = parse_file(R"(
record ref(val);
function mk(x, v)
  req emp && true
  ens emp && true
{
  local p;
  p = malloc();
  if (p != nil) { [p] = v; free p } else { skip }
}
)");
  Verifier v(file);
  auto rep = v.run();
  REQUIRE(rep.functions.size() == 1);
  CHECK(rep.functions[0].status == FunctionReport::Status::Verified);
}

TEST_CASE("store through a fractional share fails") {
  SourceFile file = parse_file(R"(
record ref(val);
function bad(x, v)
  req @a x |-> u ^ 1/2
  ens @a x |-> u ^ 1/2
{
  [x] = v
}
)");
  Verifier v(file);
  auto rep = v.run();
  REQUIRE(rep.functions.size() == 1);
  CHECK(rep.functions[0].status == FunctionReport::Status::Failed);
  CHECK(*rep.functions[0].reason == FailReason::MemorySafety);
}

TEST_CASE("generic read-only share is not enough to write") {
  SourceFile file = parse_file(R"(
record ref(val);
function bad(x, v)
  req @a x |-> u ^ p
  ens @a x |-> u ^ p
{
  [x] = v
}
)");
  Verifier v(file);
  auto rep = v.run();
  CHECK(rep.functions[0].status == FunctionReport::Status::Failed);
  CHECK(*rep.functions[0].reason == FailReason::MemorySafety);
}

TEST_CASE("use after free fails") {
  SourceFile file = parse_file(R"(
record ref(val);
function bad(x, v)
  req @a x |-> u ^ 1
  ens emp && true
{
  local t;
  free x;
  t = [x]
}
)");
  Verifier v(file);
  auto rep = v.run();
  CHECK(rep.functions[0].status == FunctionReport::Status::Failed);
  CHECK(*rep.functions[0].reason == FailReason::MemorySafety);
}

TEST_CASE("leaks are caught when the leak check is on") {
  SourceFile file = parse_file(R"(
record ref(val);
function leaky(x, v)
  req emp && true
  ens emp && true
{
  local p;
  p = malloc();
  skip
}
)");
  VerifyOptions opts;
  opts.leak = VerifyOptions::LeakCheck::On;
  Verifier v(file, opts);
  auto rep = v.run();
  CHECK(rep.functions[0].status == FunctionReport::Status::Failed);
  CHECK(*rep.functions[0].reason == FailReason::Leak);

  VerifyOptions off;
  off.leak = VerifyOptions::LeakCheck::Off;
  Verifier v2(file, off);
  CHECK(v2.run().functions[0].status == FunctionReport::Status::Verified);
}

TEST_CASE("join errors") {
  SourceFile file = parse_file(R"(
record ref(val);
function worker(x, v)
  req @a x |-> u ^ 1
  ens exists w. @b x |-> w ^ 1
{
  [x] = v
}
function bad(x, v)
  req @a x |-> u ^ 1
  ens exists w. @b x |-> w ^ 1
{
  local t;
  t = fork(worker, x, v);
  join(t);
  join(t)
}
)");
  Verifier v(file);
  auto rep = v.run();
  REQUIRE(rep.functions.size() == 2);
  CHECK(rep.functions[1].status == FunctionReport::Status::Failed);
  CHECK(*rep.functions[1].reason == FailReason::JoinError);
}

TEST_CASE("fork consumes the footprint until join") {
  SourceFile file = parse_file(R"(
record ref(val);
function worker(x, v)
  req @a x |-> u ^ 1
  ens exists w. @b x |-> w ^ 1
{
  [x] = v
}
function bad(x, v)
  req @a x |-> u ^ 1
  ens exists w. @b x |-> w ^ 1
{
  local t; local d;
  t = fork(worker, x, v);
  d = [x];
  join(t)
}
function good(x, v)
  req @a x |-> u ^ 1
  ens exists w. @b x |-> w ^ 1
{
  local t; local d;
  t = fork(worker, x, v);
  join(t);
  d = [x]
}
)");
  Verifier v(file);
  auto rep = v.run();
  REQUIRE(rep.functions.size() == 3);
  CHECK(rep.functions[1].status == FunctionReport::Status::Failed);
  CHECK(*rep.functions[1].reason == FailReason::MemorySafety);
  CHECK(rep.functions[2].status == FunctionReport::Status::Verified);
}

TEST_CASE("the concurrent tree traversal verifies end to end") {
  SourceFile file = parse_file(kTreeProgram);
  Verifier v(file);
  auto rep = v.run();
  REQUIRE(rep.functions.size() == 3);
  for (const auto& f : rep.functions) {
    CAPTURE(f.name);
    CAPTURE(f.detail);
    CHECK(f.status == FunctionReport::Status::Verified);
  }
}

TEST_CASE("a weakly shared pre needs its disjointness fact") {
  // the callee insists on strong separation; the caller holds the two cells
  // weakly and can only strengthen with the recorded fact
  const char* with_fact = R"(
record ref(val);
function strongreader(x, y)
  req @a1 x |-> u ^ 1/2 * @b1 y |-> w ^ 1/2
  ens @a1 x |-> u ^ 1/2 * @b1 y |-> w ^ 1/2
{
  local d;
  d = [x]
}
function caller(x, y)
  req (@a x |-> u ^ 1/2 (+) @b y |-> w ^ 1/2) && a _|_ b
  ens (@a x |-> u ^ 1/2 (+) @b y |-> w ^ 1/2) && a _|_ b
{
  strongreader(x, y)
}
)";
  SourceFile f1 = parse_file(with_fact);
  Verifier v1(f1);
  auto rep1 = v1.run();
  REQUIRE(rep1.functions.size() == 2);
  CAPTURE(rep1.functions[1].detail);
  CHECK(rep1.functions[1].status == FunctionReport::Status::Verified);

  std::string without = with_fact;
  size_t pos;
  while ((pos = without.find(" && a _|_ b")) != std::string::npos) without.erase(pos, 11);
  SourceFile f2 = parse_file(without);
  Verifier v2(f2);
  auto rep2 = v2.run();
  CHECK(rep2.functions[1].status == FunctionReport::Status::Failed);
  CHECK(*rep2.functions[1].reason == FailReason::MemorySafety);
}

TEST_CASE("parallel writers on the same full cell fail") {
  SourceFile file = parse_file(R"(
record ref(val);
function writer(x, v)
  req @a x |-> u ^ 1
  ens exists w. @b x |-> w ^ 1
{
  [x] = v
}
function bad(x, v)
  req @a x |-> u ^ 1
  ens exists w. @b x |-> w ^ 1
{
  par { writer(x, v) } { writer(x, v) }
}
)");
  Verifier v(file);
  auto rep = v.run();
  CHECK(rep.functions[1].status == FunctionReport::Status::Failed);
}

TEST_CASE("parallel readers on fractional shares verify") {
  SourceFile file = parse_file(R"(
record ref(val);
function reader(x)
  req @a x |-> u ^ p
  ens @a x |-> u ^ p
{
  local d;
  d = [x]
}
function both(x)
  req @a x |-> u ^ q
  ens @a x |-> u ^ q
{
  par { reader(x) } { reader(x) }
}
)");
  Verifier v(file);
  auto rep = v.run();
  REQUIRE(rep.functions.size() == 2);
  CAPTURE(rep.functions[1].detail);
  CHECK(rep.functions[0].status == FunctionReport::Status::Verified);
  CHECK(rep.functions[1].status == FunctionReport::Status::Verified);
}
