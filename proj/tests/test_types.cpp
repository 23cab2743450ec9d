#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sl/frontend.hpp"
#include "sl/types.hpp"
#include "test_util.hpp"

using namespace sl;

namespace {

const char* kDecls = R"(
type Node = rec { K: int; D: int; l: ptr Node; r: ptr Node; };
var p: ptr Node;
var n: int;
var b: bool;
var a: arr[int; 4];
rec Keys(q: ptr Node): set<int> := q = nil ? {} : {q->K} union Keys(q->l) union Keys(q->r);
abstract f(x: int): int;
)";

Unit decls() { return testutil::unit_from_text(kDecls); }

TypePtr type_in(const Unit& u, const std::string& src) {
  std::map<std::string, TypePtr> env;
  return type_of(u, testutil::term(u, src), &env);
}

// Kind of error raised while typechecking `src` appended to the
// declarations; Internal means it was accepted.
ErrorKind reject(const std::string& src) {
  try {
    testutil::unit_from_text(std::string(kDecls) + src);
  } catch (const Error& e) {
    return e.kind;
  }
  return ErrorKind::Internal;
}

}  // namespace

TEST_CASE("fixtures typecheck") {
  for (const char* f :
       {"fixtures/bst.sl", "fixtures/schorr_waite.sl", "fixtures/selsort.sl"})
    CHECK_NOTHROW(testutil::load_unit(f));
}

TEST_CASE("types of core terms") {
  Unit u = decls();
  CHECK(type_in(u, "n + 1")->kind == TypeKind::Int);
  CHECK(type_in(u, "n < 1")->kind == TypeKind::Bool);
  CHECK(type_in(u, "p = nil")->kind == TypeKind::Bool);
  CHECK(type_in(u, "p->l")->kind == TypeKind::PtrTo);
  CHECK(type_in(u, "&n")->kind == TypeKind::PtrTo);
  CHECK(type_in(u, "&n")->elem->kind == TypeKind::Int);
  CHECK(type_in(u, "a[2]")->kind == TypeKind::Int);
  CHECK(type_in(u, "{1, 2}")->kind == TypeKind::SetOf);
  CHECK(type_in(u, "{1 |-> 2}")->kind == TypeKind::MapOf);
  CHECK(type_in(u, "Keys(p)")->kind == TypeKind::SetOf);
  CHECK(type_in(u, "old(p->K)")->kind == TypeKind::Int);
  CHECK(type_in(u, "scopef(Keys)(p)")->kind == TypeKind::SetOf);
}

TEST_CASE("the expected type flows into empty literals and nil") {
  Unit u = decls();
  // {} matches a map context through an enclosing operator
  CHECK_NOTHROW(check_formula(u, testutil::formula(u, "{1 |-> 2} ++ {} = {1 |-> 2}")));
  CHECK_NOTHROW(check_formula(u, testutil::formula(u, "p->l = nil")));
  // a logic variable picks up its type from first use
  std::map<std::string, TypePtr> env;
  check_formula(u, testutil::formula(u, "x = n + 1 && x < 3"), &env);
  REQUIRE(env.count("x"));
  CHECK(env["x"]->kind == TypeKind::Int);
}

TEST_CASE("pointer compatibility is structural with anyptr subsumption") {
  Unit u = decls();
  TypePtr pn = type_in(u, "p");
  TypePtr any = Type::ptrtop();
  CHECK(type_compat(u, pn, any));
  CHECK(type_compat(u, any, pn));
  CHECK(type_compat(u, pn, pn));
  CHECK_FALSE(type_compat(u, pn, type_in(u, "n")));
  CHECK(is_pointer(pn));
  CHECK(is_scalar(type_in(u, "n")));
  CHECK_FALSE(is_scalar(type_in(u, "{1}")));
}

TEST_CASE("named types resolve through typedefs") {
  Unit u = decls();
  TypePtr r = resolve_type(u, type_in(u, "p")->elem);
  REQUIRE(r->kind == TypeKind::Record);
  CHECK(r->fields.size() == 4);
}

TEST_CASE("ill-typed declarations and scripts are rejected") {
  CHECK(reject("lemma bad: n = p;") == ErrorKind::Type);
  CHECK(reject("lemma bad: p->Z = 1;") == ErrorKind::Type);
  CHECK(reject("lemma bad: Keys(n) = {};") == ErrorKind::Type);
  CHECK(reject("lemma bad: Keys(p, p) = {};") == ErrorKind::Type);
  CHECK(reject("lemma bad: NoSuchFn(p) = 1;") == ErrorKind::Type);
  CHECK(reject("lemma bad: {1, true} = {};") == ErrorKind::Type);
  CHECK(reject("lemma bad: n in {&n};") == ErrorKind::Type);
  CHECK(reject("proof t { { true } n := p; { true } }") == ErrorKind::Type);
  CHECK(reject("proof t { { true } b := n + 1; { true } }") == ErrorKind::Type);
  CHECK(reject("proof t { { true } while (n + 1) { { true } skip; { true } } { true } }") ==
        ErrorKind::Type);
  CHECK(reject("proof t { { true } a[true] := 1; { true } }") == ErrorKind::Type);
}

TEST_CASE("well-typed variants of the rejected forms pass") {
  CHECK(reject("lemma ok: forall q: ptr Node . q = p || q != p;") ==
        ErrorKind::Internal);
  CHECK(reject("proof t { { true } n := p->K; { true } }") ==
        ErrorKind::Internal);
  CHECK(reject("proof t { { def(n < 3) } while (n < 3) { { (n < 3) } n := n + 1; { def(n < 3) } } { !(n < 3) } }") ==
        ErrorKind::Internal);
}

TEST_CASE("the write set of Outlying must be a pointer set") {
  CHECK(reject("lemma bad: Outlying(n = 1, {1, 2});") == ErrorKind::Type);
  CHECK(reject("lemma ok2: Outlying(n = 1, {&n, &p->D});") ==
        ErrorKind::Internal);
}
