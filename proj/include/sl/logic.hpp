#pragma once
// Obligation discharge: a bounded, syntactic entailment engine.
//
// The engine normalizes hypotheses into atoms (conjunction splitting,
// Outlying expansion, double-negation elimination, (e || !e) -> def(e)),
// then closes them under: congruence from equalities (including map
// override chains), linear integer arithmetic over <=-facts, forward lemma
// saturation, bounded-forall instantiation and disjunction unit resolution.
// Goals are proved structurally with backward lemma matching, constructor
// disequalities for addresses, set splitting and guard-sensitive
// definedness rules. The engine is deliberately incomplete but monotone:
// adding hypotheses never turns a provable goal unprovable.

#include <optional>
#include <string>
#include <vector>

#include "sl/ast.hpp"

namespace sl {

// Strip old(...) wrappers everywhere (move a pre-state formula/term to a
// reading in the current state).
TermPtr erase_old(const TermPtr& t);
FormulaPtr erase_old(const FormulaPtr& f);

// True when the formula mentions old(...) or a pre-state-only symbol.
bool mentions_old(const FormulaPtr& f);
bool mentions_old(const TermPtr& t);

// Replace the predicate variable $name by repl; scope($name) becomes
// repl_scope (normally scope_of_formula(repl)).
FormulaPtr subst_predvar(const FormulaPtr& f, const std::string& name,
                         const FormulaPtr& repl, const TermPtr& repl_scope);

bool mentions_predvar(const FormulaPtr& f, const std::string& name);
bool mentions_any_predvar(const FormulaPtr& f);

struct EntailResult {
  bool ok = false;
  std::vector<std::string> lemmas_used;  // and scopebound names used
  std::string note() const;              // comma-joined lemma list
};

class Prover {
 public:
  // Uses the unit's lemma and scopebound declarations.
  explicit Prover(const Unit& u);

  // Does the conjunction of hyps entail goal? When only_lemmas is non-null
  // and non-empty, lemma applications are restricted to those names.
  EntailResult entails(const std::vector<FormulaPtr>& hyps,
                       const FormulaPtr& goal,
                       const std::vector<std::string>* only_lemmas = nullptr);

 private:
  const Unit& u_;
};

}  // namespace sl
