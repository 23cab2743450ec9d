#pragma once
// Proof script checking.
//
// A script is a bracketed sequence of assertions, program statements and
// structural steps. The checker walks it forward:
//   - runs of atomic statements are verified by a symbolic strongest-post
//     pass: a store maps written pre-state addresses to their new values
//     (as pre-state terms) and each claimed post conjunct is translated to
//     a pre-state reading and discharged;
//   - `=>` steps emit consequence obligations;
//   - `sub+ / sub-` brackets check variable substitution (with a
//     definedness obligation for the substituted term);
//   - `frame+ / frame-` brackets check the expansion rule: the framed
//     formula must be scope-disjoint from the written set declared in the
//     inner precondition's Outlying(...);
//   - if/while require an explicit definedness conjunct for the guard, and
//     intermediate boundary assertions must not mention old(...).
//
// Obligations are discharged with the lemma engine where possible; the rest
// stay open. Scope-bound declarations are reported as assumptions.

#include <string>
#include <vector>

#include "sl/ast.hpp"

namespace sl {

struct ScriptReport {
  std::string name;
  bool checked = false;  // structure accepted (independently of open obligations)
  std::string error;     // when !checked
  ErrorKind error_kind = ErrorKind::Internal;
  Span error_span;
  bool scope_extension_used = false;  // union reading of || / => / exists
  std::vector<Obligation> obligations;

  int count(ObligationStatus s) const;
};

struct UnitReport {
  std::vector<Obligation> assumptions;  // one per scopebound declaration
  std::vector<ScriptReport> scripts;

  bool all_checked() const;
  bool has_open() const;
};

ScriptReport check_script(const Unit& u, const ProofScript& s);
UnitReport check_unit_scripts(const Unit& u);

// Render the report in the formats the CLI exposes ("text" / "lines").
std::string report_text(const Unit& u, const UnitReport& r);
std::string report_lines(const Unit& u, const UnitReport& r);

}  // namespace sl
