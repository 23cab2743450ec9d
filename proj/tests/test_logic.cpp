// Entailment engine: congruence, arithmetic, lemma use, address reasoning.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sl/logic.hpp"
#include "sl/scope.hpp"
#include "test_util.hpp"

using namespace sl;
using testutil::formula;
using testutil::term;
using testutil::unit_from_text;

namespace {

const char* kDecls = R"(
typedef Node = record { K: int; l: ptr<Node>; r: ptr<Node>; };

var p: ptr<Node>;
var q: ptr<Node>;
var n: int;
var m: int;
var s: set<int>;

abstract ordScope(): set<anyptr>;
abstract order(x: int, y: int): bool scope ordScope();

scopebound order within ordScope();

lemma order_total: forall x: int, y: int . order(x, y) || order(y, x);
lemma order_trans: forall x: int, y: int, z: int .
  order(x, y) && order(y, z) => order(x, z);
lemma order_defined: forall x: int, y: int . def(order(x, y));
lemma order_scope_clear: forall x: anyptr .
  x in ({&p, &q, &n, &m, &s} union Block(p)) => !(x in ordScope());
)";

struct World {
  Unit u = unit_from_text(kDecls);
  Prover pr{u};

  bool proves(std::vector<std::string> hs, const std::string& g,
              const std::vector<std::string>* only = nullptr) {
    std::vector<FormulaPtr> hyps;
    for (auto& h : hs) hyps.push_back(formula(u, h));
    return pr.entails(hyps, formula(u, g), only).ok;
  }
};

}  // namespace

TEST_CASE("equalities close under congruence and substitution") {
  World w;
  CHECK(w.proves({"n = m", "m = p->K"}, "n = p->K"));
  CHECK(w.proves({"p = q"}, "p->K = q->K"));
  CHECK(w.proves({"n = 3", "m = 3"}, "n = m"));
  // Orientation does not matter.
  CHECK(w.proves({"p->K = n"}, "n = p->K"));
  CHECK_FALSE(w.proves({"n = 3"}, "n = m"));
}

TEST_CASE("linear arithmetic over ordering facts") {
  World w;
  CHECK(w.proves({"n <= m", "m <= p->K"}, "n <= p->K"));
  CHECK(w.proves({"n < m"}, "n <= m"));
  CHECK(w.proves({"n < m", "m < p->K"}, "n < p->K"));
  CHECK(w.proves({"n = m"}, "n <= m"));
  CHECK_FALSE(w.proves({"n <= m"}, "m <= n"));
}

TEST_CASE("forward and backward lemma application") {
  World w;
  // order_trans fires forward / backward on concrete instances.
  CHECK(w.proves({"order(n, m)", "order(m, p->K)"}, "order(n, p->K)"));
  // order_defined proves definedness goals outright.
  CHECK(w.proves({}, "def(order(n, m))"));
  // Nothing proves an unsupported atom.
  CHECK_FALSE(w.proves({"order(n, m)"}, "order(m, n)"));
}

TEST_CASE("lemma restriction list is honored") {
  World w;
  std::vector<std::string> none = {"order_total"};
  // The transitivity goal needs order_trans, which is not on the list.
  CHECK_FALSE(
      w.proves({"order(n, m)", "order(m, p->K)"}, "order(n, p->K)", &none));
  std::vector<std::string> right = {"order_trans"};
  CHECK(w.proves({"order(n, m)", "order(m, p->K)"}, "order(n, p->K)", &right));
}

TEST_CASE("lemma usage is reported by name") {
  World w;
  std::vector<FormulaPtr> hyps = {formula(w.u, "order(n, m)"),
                                  formula(w.u, "order(m, p->K)")};
  auto r = w.pr.entails(hyps, formula(w.u, "order(n, p->K)"));
  REQUIRE(r.ok);
  bool has = false;
  for (auto& l : r.lemmas_used) has = has || l == "order_trans";
  CHECK(has);
  CHECK(r.note().find("order_trans") != std::string::npos);
}

TEST_CASE("address constructor disequalities") {
  World w;
  // Distinct variable cells are distinct addresses, no hypotheses needed.
  CHECK(w.proves({}, "&n != &m"));
  CHECK(w.proves({}, "inter({&n}, {&m}) = {}"));
  // A field address is never a variable address.
  CHECK(w.proves({}, "&p->K != &n"));
  // Same cell: not provable (and false).
  CHECK_FALSE(w.proves({}, "&n != &n"));
}

TEST_CASE("scope-bound declarations give disjointness") {
  World w;
  // ordScope() misses every program cell by order_scope_clear, so a write
  // set of variable cells is disjoint from the abstract scope.
  CHECK(w.proves({}, "inter(ordScope(), {&n, &m}) = {}"));
  CHECK(w.proves({}, "inter({&n}, ordScope()) = {}"));
}

TEST_CASE("hypothesis normalization: conjunction, (e || !e), Outlying") {
  World w;
  CHECK(w.proves({"n = m && m = 3"}, "n = 3"));
  // (e || !e) is the definedness idiom.
  CHECK(w.proves({"n < m || !(n < m)"}, "def(n < m)"));
  // An Outlying hypothesis carries its frame formula.
  CHECK(w.proves({"Outlying($r && n = 3, {&m})"}, "n = 3"));
}

TEST_CASE("monotonicity: extra hypotheses never hurt") {
  World w;
  std::vector<std::string> extra = {"order(m, n)", "p != nil", "n <= 100",
                                    "q->K = 7"};
  std::vector<std::string> hyps = {"n <= m", "m <= p->K"};
  CHECK(w.proves(hyps, "n <= p->K"));
  for (auto& e : extra) {
    hyps.push_back(e);
    CHECK(w.proves(hyps, "n <= p->K"));
  }
}

TEST_CASE("erase_old strips pre-state wrappers everywhere") {
  World w;
  auto f = formula(w.u, "old(n) = m && old(p->K) <= n");
  CHECK(mentions_old(f));
  auto g = erase_old(f);
  CHECK_FALSE(mentions_old(g));
  CHECK(print_formula(g) == print_formula(formula(w.u, "n = m && p->K <= n")));
  CHECK_FALSE(mentions_old(formula(w.u, "n = m")));
}

TEST_CASE("predicate variable substitution") {
  World w;
  auto f = formula(w.u, "$r && n = 3");
  CHECK(mentions_predvar(f, "r"));
  CHECK(mentions_any_predvar(f));
  auto repl = formula(w.u, "m <= n");
  auto g = subst_predvar(f, "r", repl, term(w.u, "{&m, &n}"));
  CHECK_FALSE(mentions_any_predvar(g));
  CHECK(print_formula(g) ==
        print_formula(formula(w.u, "m <= n && n = 3")));
  // Substituting a different name is the identity.
  auto h = subst_predvar(f, "other", repl, term(w.u, "{}"));
  CHECK(mentions_predvar(h, "r"));
}
