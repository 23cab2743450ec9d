#pragma once
// Shared helpers for the test suites: fixture loading and value plumbing.

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sl/checker.hpp"
#include "sl/frontend.hpp"
#include "sl/sem.hpp"
#include "sl/types.hpp"

namespace testutil {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Parse, desugar and typecheck a unit from a fixture file.
inline sl::Unit load_unit(const std::string& path) {
  sl::Unit u = sl::expand_abbreviations(
      sl::parse_unit(read_file(path), path));
  sl::check_unit(u);
  return u;
}

inline sl::Unit unit_from_text(const std::string& src) {
  sl::Unit u = sl::expand_abbreviations(sl::parse_unit(src, "<test>"));
  sl::check_unit(u);
  return u;
}

inline sl::TermPtr term(const sl::Unit& u, const std::string& src) {
  return sl::expand_term(u, sl::parse_term_text(src));
}

inline sl::FormulaPtr formula(const sl::Unit& u, const std::string& src) {
  return sl::expand_formula(u, sl::parse_formula_text(src));
}

// Convert a set value whose elements are non-nil pointers into an address
// set. Returns false when the value is not such a set.
inline bool address_set(const sl::Value& v, std::set<sl::Address>* out) {
  if (v.kind != sl::Value::Set) return false;
  for (auto& e : v.elems) {
    if (e.kind != sl::Value::Ptr || !e.addr) return false;
    out->insert(*e.addr);
  }
  return true;
}

// Definedness-aware result identity: equal when both are undefined or both
// are defined with the same canonical key.
inline bool same_result(const sl::Value& a, const sl::Value& b) {
  if (a.defined() != b.defined()) return false;
  return !a.defined() || a.key() == b.key();
}

inline const sl::ProofScript& script_named(const sl::Unit& u,
                                           const std::string& name) {
  for (auto& s : u.scripts)
    if (s.name == name) return s;
  throw std::runtime_error("no proof script named " + name);
}

}  // namespace testutil
