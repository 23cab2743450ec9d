#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "props.hpp"
#include "sl/sem.hpp"
#include "test_util.hpp"

using namespace sl;
using testutil::term;

namespace {

const char* kSmallUnit = R"(
type Node = rec { K: int; D: int; l: ptr Node; r: ptr Node; };
var p: ptr Node;
var n: int;
var b: bool;
rec Sum(q: ptr Node): int := q = nil ? 0 : q->K + Sum(q->l) + Sum(q->r);
)";

struct World {
  Unit u;
  MemState st;
  std::map<std::string, Address> va;
  long long node;  // one heap node

  World() : u(testutil::unit_from_text(kSmallUnit)) {
    for (auto& v : u.vars) {
      long long blk = st.alloc_block(u, v.second);
      va[v.first] = Address{blk, {}};
    }
    node = st.alloc_block(u, *u.find_typedef("Node"));
    st.heap.insert(node);
    st.units[{node, {"K"}}] = Value::of_int(7);
    st.units[{node, {"D"}}] = Value::of_int(3);
    st.units[va["p"]] = Value::of_ptr({node, {}});
    st.units[va["n"]] = Value::of_int(5);
    st.units[va["b"]] = Value::of_bool(true);
  }

  Value eval(const std::string& src, Trace* tr = nullptr, int fuel = 16) {
    EvalCtx cx{u, st, nullptr, {}, va, fuel, tr};
    return eval_term(cx, term(u, src));
  }
};

}  // namespace

TEST_CASE("arithmetic, comparisons and set operations") {
  World w;
  CHECK(w.eval("n + 2 * 3").i == 11);
  CHECK(w.eval("n / 2").i == 2);
  CHECK_FALSE(w.eval("n / 0").defined());
  CHECK(w.eval("n < 6").b);
  // `union {` opens a comprehension, so a right-hand literal needs parens
  CHECK(w.eval("{1, 2} union ({2, 3})").key() ==
        w.eval("{1, 2, 3}").key());
  CHECK(w.eval("{1, 2} inter {2, 3}").key() == w.eval("{2}").key());
  CHECK(w.eval("{1, 2} \\ {2}").key() == w.eval("{1}").key());
  CHECK(w.eval("2 in {1, 2}").b);
  CHECK(w.eval("MAX({3, 9, 1})").i == 9);
  CHECK_FALSE(w.eval("MAX({1} \\ {1})").defined());
}

TEST_CASE("map literals override from the left to the right") {
  World w;
  CHECK(w.eval("{1 |-> 2} ++ {1 |-> 9}").key() ==
        w.eval("{1 |-> 9}").key());
  CHECK(w.eval("({1 |-> 2} ++ {3 |-> 4}) ++ {1 |-> 0}").key() ==
        w.eval("{3 |-> 4} ++ {1 |-> 0}").key());
}

TEST_CASE("dereference reads the heap and records the read") {
  World w;
  Trace tr;
  CHECK(w.eval("p->K + p->D", &tr).i == 10);
  CHECK(tr == Trace{w.va["p"], {w.node, {"K"}}, {w.node, {"D"}}});
}

TEST_CASE("nil dereference and undefined guards are undefined") {
  World w;
  w.st.units[w.va["p"]] = Value::nil();
  CHECK_FALSE(w.eval("p->K").defined());
  CHECK_FALSE(w.eval("p->K < 3 ? 1 : 2").defined());
  // strong Kleene connectives recover from one undefined side
  CHECK(w.eval("(p->K < 3) && (n < 2)").b == false);
  CHECK(w.eval("(n < 2) && (p->K < 3)").b == false);
  CHECK_FALSE(w.eval("(p->K < 3) && (n > 2)").defined());
  CHECK(w.eval("(n > 2) || (p->K < 3)").b);
}

TEST_CASE("guarded recursion terminates; unguarded recursion runs out of fuel") {
  World w;
  CHECK(w.eval("Sum(p)").i == 7);
  // tie the node to itself: the recursion never reaches nil
  w.st.units[{w.node, {"l"}}] = Value::of_ptr({w.node, {}});
  Value v = w.eval("Sum(p)", nullptr, 10);
  CHECK_FALSE(v.defined());
  CHECK(v.reason == UndefReason::FuelExhausted);
}

TEST_CASE("old() reads the pre-state and contributes no reads") {
  World w;
  MemState pre = w.st;
  w.st.units[w.va["n"]] = Value::of_int(42);
  Trace tr;
  EvalCtx cx{w.u, w.st, &pre, {}, w.va, 16, &tr};
  CHECK(eval_term(cx, term(w.u, "old(n) + n")).i == 47);
  CHECK(tr == Trace{w.va["n"]});
}

TEST_CASE("Block yields the sub-block rooted at an address") {
  World w;
  Value whole = w.eval("Block(p)");
  CHECK(whole.elems.size() == 4);
  Value field = w.eval("Block(&p->K)");
  REQUIRE(field.elems.size() == 1);
  CHECK(*field.elems[0].addr == Address{w.node, {"K"}});
  CHECK(w.eval("Block(p->l)").elems.empty());  // Block(nil) = {}
}

TEST_CASE("binders range over evaluated domains") {
  World w;
  CHECK(w.eval("all x in {1, 2, 3} . x < 4").b);
  CHECK(w.eval("all x in {1, 2, 3} . x < 3").b == false);
  CHECK(w.eval("union { {x, x + 10} | x in {1, 2} }").key() ==
        w.eval("{1, 2, 11, 12}").key());
  CHECK(w.eval("union { {x} | x in {1, 2, 3} when x < 3 }").key() ==
        w.eval("{1, 2}").key());
}

TEST_CASE("formula evaluation is three-valued") {
  World w;
  w.st.units[w.va["p"]] = Value::nil();
  EvalCtx cx{w.u, w.st, nullptr, {}, w.va, 16, nullptr};
  CHECK(eval_formula(cx, testutil::formula(w.u, "def(p->K)")) == Tri::False);
  CHECK(eval_formula(cx, testutil::formula(w.u, "p->K = 1")) ==
        Tri::Undefined);
  // strong equality identifies two undefined sides
  CHECK(eval_formula(cx, testutil::formula(w.u, "p->K === p->D")) ==
        Tri::True);
  CHECK(eval_formula(cx, testutil::formula(w.u, "p = nil || p->K = 1")) ==
        Tri::True);
}

TEST_CASE("statement execution: assignment, if, while") {
  World w;
  Unit u = testutil::unit_from_text(R"(
type Node = rec { K: int; D: int; l: ptr Node; r: ptr Node; };
var p: ptr Node;
var n: int;
var b: bool;
proof steps {
  { true }
  n := 0;
  while (n < 4) {
    { true }
    n := n + 1;
    { true }
  }
  if (n = 4) { { true } b := true; { true } }
  else { { true } b := false; { true } }
  p->K := n;
  { true }
}
)");
  std::string err;
  EvalCtx cx{u, w.st, nullptr, {}, w.va, 16, nullptr};
  MemState post =
      exec_items(cx, w.st, testutil::script_named(u, "steps").items, &err);
  CHECK(err.empty());
  CHECK(post.units[w.va["n"]].i == 4);
  CHECK(post.units[w.va["b"]].b);
  CHECK(post.units[Address{w.node, {"K"}}].i == 4);
}

TEST_CASE("assignment through nil faults") {
  World w;
  Unit u = testutil::unit_from_text(R"(
type Node = rec { K: int; D: int; l: ptr Node; r: ptr Node; };
var p: ptr Node;
var n: int;
var b: bool;
proof bad { { true } p->K := 1; { true } }
)");
  w.st.units[w.va["p"]] = Value::nil();
  std::string err;
  EvalCtx cx{u, w.st, nullptr, {}, w.va, 16, nullptr};
  exec_items(cx, w.st, testutil::script_named(u, "bad").items, &err);
  CHECK_FALSE(err.empty());
}

TEST_CASE("random states populate every declared variable") {
  Unit u = testutil::load_unit("fixtures/bst.sl");
  for (int seed = 0; seed < 20; ++seed) {
    std::map<std::string, Address> va;
    MemState st = random_state(u, seed, &va);
    for (auto& v : u.vars) {
      REQUIRE(va.count(v.first));
      CHECK(st.units.count(va[v.first]));
    }
    // stored pointers only ever point at live blocks
    for (auto& kv : st.units)
      if (kv.second.kind == Value::Ptr && kv.second.addr)
        CHECK_FALSE(st.addresses_of(kv.second.addr->block).empty());
  }
}

// Small-scale runs of the randomized property suites; the acceptance
// binary repeats them at full size.
TEST_CASE("scope forms evaluate to the exact read trace") {
  Unit u = testutil::load_unit("fixtures/bst.sl");
  auto corpus = props::parse_corpus(u, props::tree_corpus());
  auto r = props::scope_exactness(u, corpus, 150);
  INFO(r.first);
  CHECK(r.failures == 0);
  CHECK(r.cases > 500);
}

TEST_CASE("scope forms are self-bounded and justify framing") {
  Unit u = testutil::load_unit("fixtures/bst.sl");
  auto corpus = props::parse_corpus(u, props::tree_corpus());
  auto r1 = props::scope_idempotence(u, corpus, 100);
  INFO(r1.first);
  CHECK(r1.failures == 0);
  auto r2 = props::frame_property(u, corpus, 40);
  INFO(r2.first);
  CHECK(r2.failures == 0);
  CHECK(r2.cases > 1000);
}

TEST_CASE("memory axioms hold on random states") {
  Unit u = testutil::load_unit("fixtures/bst.sl");
  auto r = props::memory_axioms(u, 100);
  INFO(r.first);
  CHECK(r.failures == 0);
}

TEST_CASE("tree update runs match their specification") {
  Unit u = testutil::load_unit("fixtures/bst.sl");
  auto r = props::tree_update_end_to_end(u, 25);
  INFO(r.first);
  CHECK(r.failures == 0);
  CHECK(r.cases == 25);
}
