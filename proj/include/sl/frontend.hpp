#pragma once
// Frontend: parsing .sl units and expanding surface abbreviations to core form.

#include "sl/ast.hpp"

namespace sl {

// Parse a whole unit (declarations, lemmas, proof scripts). Surface sugar is
// kept in the returned trees; run expand_abbreviations before later stages.
Unit parse_unit(const std::string& source, const std::string& file = "<input>");

// Parse a single term / formula (mainly for tests and the CLI).
TermPtr parse_term_text(const std::string& source);
FormulaPtr parse_formula_text(const std::string& source);

// Rewrite v / e->n / e.n / e[i] / &lvalue into the explicit core operators
// (*, &v, &e->n, &e[e]), resolving bare identifiers against the unit's
// program variables. Returns the rewritten unit.
Unit expand_abbreviations(const Unit& u);

// Expand a free-standing term/formula against a unit's declarations.
TermPtr expand_term(const Unit& u, const TermPtr& t);
FormulaPtr expand_formula(const Unit& u, const FormulaPtr& f);

}  // namespace sl
