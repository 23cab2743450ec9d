#pragma once
// Concrete semantics: a block-structured memory model, a three-valued
// (strong Kleene) evaluator that records the set of unit addresses it reads
// in the current state, and a small-step statement executor.
//
// A block is a program variable, or a heap record/array/scalar created by
// alloc. A unit is an addressable cell inside a block: the single cell of a
// scalar block (empty path), a record field, or an array element. Pointer
// values carry unit/block addresses; nil is the empty pointer.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sl/ast.hpp"

namespace sl {

struct Address {
  long long block = 0;
  std::vector<std::string> path;  // field names / decimal indices

  auto operator<=>(const Address&) const = default;
  std::string str() const;
};

enum class UndefReason {
  NilDeref,       // dereferencing nil or a dangling address
  FuelExhausted,  // recursive function ran out of fuel
  GuardUndefined, // a conditional's guard had no truth value
  PartialOp,      // partial operation outside its domain (e.g. x/0)
  NotEvaluable,   // symbolic construct with no concrete meaning
};

struct Value {
  enum Kind { Int, Bool, Ptr, Set, Seq, MapV, Undef } kind = Undef;
  long long i = 0;
  bool b = false;
  std::optional<Address> addr;  // Ptr; empty = nil
  std::vector<Value> elems;     // Set (canonical: sorted, unique) / Seq
  std::vector<std::pair<Value, Value>> entries;  // MapV (sorted by key)
  UndefReason reason = UndefReason::NotEvaluable;

  static Value undef(UndefReason r);
  static Value of_int(long long v);
  static Value of_bool(bool v);
  static Value nil();
  static Value of_ptr(Address a);
  static Value of_set(std::vector<Value> es);  // canonicalizes
  static Value of_seq(std::vector<Value> es);
  static Value of_map(std::vector<std::pair<Value, Value>> es);

  bool defined() const { return kind != Undef; }
  std::string key() const;  // total order / equality key for defined values
};

std::string value_str(const Value& v);

struct MemState {
  std::map<Address, Value> units;
  std::map<long long, std::vector<std::string>> block_units;  // unit paths
  std::set<long long> heap;  // blocks created by alloc
  long long next_block = 1;

  // Create a block laid out per t (resolved); scalar units are initialized
  // to `int_default` / false / nil. Returns the block id.
  long long alloc_block(const Unit& u, const TypePtr& t,
                        long long int_default = 0);

  std::vector<Address> addresses_of(long long block) const;
};

using Trace = std::set<Address>;

enum class Tri { True, False, Undefined };

struct EvalCtx {
  const Unit& u;
  const MemState& st;
  const MemState* pre = nullptr;  // state old(...) reads from; null: st
  std::map<std::string, Value> env;
  std::map<std::string, Address> var_addr;  // program variable cells
  int fuel = 64;
  Trace* trace = nullptr;  // reads in the current state (old(...) excluded)
};

Value eval_term(EvalCtx& cx, const TermPtr& t);
Tri eval_formula(EvalCtx& cx, const FormulaPtr& f);

// Execute the program statements embedded in script items (annotations are
// ignored). On a runtime error *err describes it and the partial state is
// returned.
MemState exec_items(EvalCtx cx, MemState st,
                    const std::vector<ScriptItem>& items, std::string* err);

// A reproducible state: every program variable gets a block; a few heap
// record blocks per record typedef are created and pointers are wired
// randomly among them and nil.
MemState random_state(const Unit& u, std::uint64_t seed,
                      std::map<std::string, Address>* var_addr);

std::string dump_state(const MemState& st);

}  // namespace sl
