#pragma once
// Static typing for core terms, formulas, statements and whole units.

#include <map>

#include "sl/ast.hpp"

namespace sl {

// Resolve Named types through the unit's typedefs (cycle-checked).
TypePtr resolve_type(const Unit& u, const TypePtr& t);

// Type of a core term. `env` maps logic variables to types and is extended
// by inference on first constrained use; `expected` threads the context type
// into empty literals, nil and unbound variables.
TypePtr type_of(const Unit& u, const TermPtr& t,
                std::map<std::string, TypePtr>* env = nullptr,
                TypePtr expected = nullptr);

// Typecheck a formula (logic variable types inferred into env).
void check_formula(const Unit& u, const FormulaPtr& f,
                   std::map<std::string, TypePtr>* env = nullptr);

// Typecheck every declaration, lemma and proof script in the unit.
// Throws Error{Type,...} on the first violation.
void check_unit(const Unit& u);

// Loose compatibility: structural equality with pointer subsumption
// (anyptr / nil matches any pointer type).
bool type_compat(const Unit& u, const TypePtr& a, const TypePtr& b);

bool is_pointer(const TypePtr& t);
bool is_scalar(const TypePtr& t);  // int, bool, or pointer: one memory unit

}  // namespace sl
