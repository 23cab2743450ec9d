#pragma once
// Memory scopes: the set of addresses a term or formula may read.
//
// scope_of_term implements the syntactic reading rules:
//   - literals, logic variables and address-forming operators read nothing;
//   - *(a) reads a itself plus whatever a reads;
//   - old(e) reads nothing in the current state;
//   - a conditional reads its guard and, depending on the guard, one arm;
//   - a user function application contributes a symbolic scopef(f)(args)
//     term (its derived scope function), which itself reads its own value.
//
// Formula connectives take unions; negation and quantification look at the
// body. Disjunction, implication and existential quantification are given
// the same union reading; `used_extension` is set when that reading was
// needed so reports can flag it.

#include <map>
#include <string>
#include <vector>

#include "sl/ast.hpp"

namespace sl {

// Scope of a core term, as a normalized set term over addresses.
TermPtr scope_of_term(const Unit& u, const TermPtr& t,
                      bool* used_extension = nullptr);

// Scope of a formula.
TermPtr scope_of_formula(const Unit& u, const FormulaPtr& f,
                         bool* used_extension = nullptr);

// Derive the scope function of a defined function `fn`: same parameters,
// return type set<anyptr>, body = normalized scope of fn's body (recursive
// calls stay symbolic as scopef(fn)(...)). Abstract functions yield their
// declared scope. Throws Error{UnknownScope} for unknown names.
FuncDef derive_msf(const Unit& u, const std::string& fn);

// True when the derived scope function of `fn` mentions scopef(fn) itself
// (directly or through other functions), so it cannot be fully unfolded.
bool msf_is_recursive(const Unit& u, const std::string& fn);

// Canonical form of a set-valued term: unions flattened and sorted, literal
// element sets merged and deduplicated, empty sets dropped, (c ? S : S) -> S,
// and union operands subsumed by a conditional's two arms dropped.
TermPtr normalize_set(const TermPtr& t);

// Capture-avoiding substitution of logic variables by terms.
TermPtr subst_vars(const TermPtr& t, const std::map<std::string, TermPtr>& m);
FormulaPtr subst_vars_formula(const FormulaPtr& f,
                              const std::map<std::string, TermPtr>& m);

}  // namespace sl
