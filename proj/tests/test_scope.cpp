#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sl/scope.hpp"
#include "test_util.hpp"

using namespace sl;

namespace {

const char* kDecls = R"(
type Node = rec { K: int; D: int; l: ptr Node; r: ptr Node; };
var p: ptr Node;
var n: int;
var m: int;
rec Keys(q: ptr Node): set<int> := q = nil ? {} : {q->K} union Keys(q->l) union Keys(q->r);
rec Two(): int := n + m;
abstract fS(): set<anyptr>;
abstract f(x: int): int scope fS();
)";

Unit decls() { return testutil::unit_from_text(kDecls); }

std::string scope_str(const Unit& u, const std::string& src) {
  return print_term(normalize_set(scope_of_term(u, testutil::term(u, src))));
}

std::string set_str(const Unit& u, const std::string& src) {
  return print_term(normalize_set(testutil::term(u, src)));
}

// Rewrite scope-function references to plainly named functions so a derived
// definition can be compared against a reference shape.
TermPtr plain_names(const TermPtr& t,
                    const std::map<std::string, std::string>& ren) {
  if (!t) return t;
  auto r = std::make_shared<Term>(*t);
  for (auto& a : r->args) a = plain_names(a, ren);
  if (r->kind == TermKind::Apply && r->is_msf) {
    auto it = ren.find(r->name);
    r->is_msf = false;
    r->name = it != ren.end() ? it->second : r->name;
  }
  return r;
}

}  // namespace

TEST_CASE("literals, logic variables and pre-state terms read nothing") {
  Unit u = decls();
  CHECK(scope_str(u, "1 + 2") == "{}");
  CHECK(scope_str(u, "x + y") == "{}");
  CHECK(scope_str(u, "&n") == "{}");
  CHECK(scope_str(u, "&p->K") == set_str(u, "{&p}"));  // reads p, not the field
  CHECK(scope_str(u, "old(p->K + n)") == "{}");
}

TEST_CASE("a load reads the address it goes through") {
  Unit u = decls();
  CHECK(scope_str(u, "n") == set_str(u, "{&n}"));
  CHECK(scope_str(u, "p->K") == set_str(u, "{&p, &p->K}"));
  CHECK(scope_str(u, "p->l->D") == set_str(u, "{&p, &p->l, &p->l->D}"));
}

TEST_CASE("a conditional reads its guard and the taken arm") {
  Unit u = decls();
  // both arms covered by the guard's reads: the branch collapses
  CHECK(scope_str(u, "n < m ? n : m") == set_str(u, "{&m, &n}"));
  // distinct arms stay conditional
  TermPtr sc = normalize_set(
      scope_of_term(decls(), testutil::term(u, "n < 0 ? p->K : m")));
  CHECK(print_term(sc) ==
        "({&n} union ((*(&n) < 0) ? " + set_str(u, "{&p, &p->K}") +
            " : " + set_str(u, "{&m}") + "))");
}

TEST_CASE("an abstract application reads its declared scope") {
  Unit u = decls();
  CHECK(scope_str(u, "f(n)") == "({&n} union fS())");
  CHECK(scope_str(u, "f(1)") == "fS()");
}

TEST_CASE("a defined application reads through its scope function") {
  Unit u = decls();
  CHECK(scope_str(u, "Two()") == "scopef(Two)()");
  CHECK(scope_str(u, "Keys(p)") == "({&p} union scopef(Keys)(*(&p)))");
}

TEST_CASE("derived scope functions") {
  Unit u = decls();
  FuncDef two = derive_msf(u, "Two");
  CHECK(print_term(two.body) == set_str(u, "{&m, &n}"));
  CHECK(two.ret->kind == TypeKind::SetOf);
  CHECK_FALSE(msf_is_recursive(u, "Two"));

  FuncDef keys = derive_msf(u, "Keys");
  CHECK(msf_is_recursive(u, "Keys"));
  // Keys reads the key field and both links of every node it visits
  Unit ref = testutil::unit_from_text(std::string(kDecls) + R"(
rec KeysScope(q: ptr Node): set<anyptr> :=
  q = nil ? {} : {&q->K, &q->l, &q->r} union KeysScope(q->l) union KeysScope(q->r);
)");
  TermPtr got =
      normalize_set(plain_names(keys.body, {{"Keys", "KeysScope"}}));
  TermPtr want = normalize_set(ref.find_func("KeysScope")->body);
  CHECK(print_term(got) == print_term(want));

  // an abstract function's scope function is its declared bound
  CHECK(print_term(derive_msf(u, "f").body) == "fS()");
  CHECK_THROWS_AS(derive_msf(u, "NoSuchFn"), Error);
}

TEST_CASE("formula scopes follow the connectives") {
  Unit u = decls();
  auto fs = [&](const std::string& src) {
    return print_term(
        normalize_set(scope_of_formula(u, testutil::formula(u, src))));
  };
  CHECK(fs("n = 1 && m = 2") == set_str(u, "{&m, &n}"));
  CHECK(fs("!(n = 1)") == set_str(u, "{&n}"));
  CHECK(fs("def(p->K)") == set_str(u, "{&p, &p->K}"));
  bool ext = false;
  scope_of_formula(u, testutil::formula(u, "n = 1 || m = 2"), &ext);
  CHECK(ext);  // the union reading of disjunction is an extension
  ext = false;
  scope_of_formula(u, testutil::formula(u, "n = 1 && m = 2"), &ext);
  CHECK_FALSE(ext);
}

TEST_CASE("normalize_set canonicalizes unions") {
  Unit u = decls();
  CHECK(set_str(u, "(({&n} union ({&m} union ({}))) union ({&n}))") ==
        set_str(u, "{&m, &n}"));
  CHECK(set_str(u, "{} union ({})") == "{}");
  CHECK(set_str(u, "n < m ? {&n} : {&n}") == set_str(u, "{&n}"));
  // sorted and deduplicated element lists
  CHECK(set_str(u, "{&n, &m, &n}") == set_str(u, "{&m, &n}"));
}

TEST_CASE("normalize_set is idempotent on derived scopes") {
  Unit u = testutil::load_unit("fixtures/bst.sl");
  for (auto& fn : u.funcs) {
    TermPtr d = derive_msf(u, fn.name).body;
    CHECK(print_term(normalize_set(d)) == print_term(normalize_set(normalize_set(d))));
  }
}

TEST_CASE("substitution avoids capturing binders") {
  Unit u = decls();
  TermPtr t = testutil::term(u, "union { {x + y} | x in Keys(p) }");
  // substituting a term that mentions the binder renames the binder
  TermPtr s = subst_vars(t, {{"y", mk_var("x")}});
  REQUIRE(s->kind == TermKind::UnionComp);
  CHECK(s->name != "x");
  // plain replacement elsewhere
  TermPtr r = subst_vars(testutil::term(u, "x + x"), {{"x", mk_int(2)}});
  CHECK(print_term(r) == "(2 + 2)");
}
