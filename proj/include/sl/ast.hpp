#pragma once
// Core syntax trees for the scope-logic toolkit: types, terms, formulas,
// statements, proof scripts and whole compilation units.
//
// Terms and formulas are immutable and shared via shared_ptr<const T>.
// Surface sugar (bare variables, e->n, e.n, e[i], &lvalue) is represented
// with dedicated node kinds and removed by expand_abbreviations(); every
// later stage works on core nodes only.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sl {

struct Span {
  int line = 0;
  int col = 0;
};

// ---------------------------------------------------------------------------
// Types

enum class TypeKind {
  Int,
  Bool,
  PtrTop,   // pointer of unknown pointee ("anyptr"); the type of nil
  PtrTo,    // ptr T
  Array,    // arr[T; n]
  Record,   // rec { f: T; ... }
  Named,    // reference to a typedef, resolved through the unit
  SetOf,
  SeqOf,
  MapOf,
  Unknown,  // placeholder while inferring a logic variable's type
};

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct Type {
  TypeKind kind;
  TypePtr elem;  // PtrTo / Array / SetOf / SeqOf / MapOf value
  TypePtr key;   // MapOf key
  long long len = 0;
  std::vector<std::pair<std::string, TypePtr>> fields;  // Record
  std::string name;                                     // Named

  static TypePtr intt();
  static TypePtr boolt();
  static TypePtr ptrtop();
  static TypePtr ptr(TypePtr t);
  static TypePtr array(TypePtr t, long long n);
  static TypePtr record(std::vector<std::pair<std::string, TypePtr>> fs);
  static TypePtr named(std::string n);
  static TypePtr set_of(TypePtr t);
  static TypePtr seq_of(TypePtr t);
  static TypePtr map_of(TypePtr k, TypePtr v);
};

std::string type_str(const TypePtr& t);

// ---------------------------------------------------------------------------
// Terms

enum class TermKind {
  IntLit,
  BoolLit,
  NilLit,
  Var,        // logic variable
  VarAddr,    // &v, address of a program variable
  Deref,      // *(a)
  FieldAddr,  // &(a)->n
  IndexAddr,  // &(a)[i]
  Apply,      // builtin operators and user function applications
  Cond,       // (c ? a : b)
  Old,        // old(e), pre-state value
  SetLit,     // {a, b}; empty {} may also type as a map
  SeqLit,     // [a, b]
  MapLit,     // {k |-> v, ...}; args flattened [k1,v1,k2,v2,...]
  ScopeOfPred,     // scope($r), symbolic scope of a predicate variable
  ScopeOfTerm,     // scope(e), resolved by the scope module
  ScopeOfFormula,  // scope(F), resolved by the scope module
  AllIn,      // (all x in S . b), bounded conjunction over a finite set
  UnionComp,  // union{ b | x in S when p }, bounded union comprehension
  // Surface sugar, removed by expand_abbreviations:
  SVar,    // bare identifier (program variable or logic variable)
  SArrow,  // e->n
  SDot,    // e.n
  SIndex,  // e[i]
  SAddr,   // &e
};

struct Term;
struct Formula;
using TermPtr = std::shared_ptr<const Term>;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Term {
  TermKind kind;
  long long ival = 0;          // IntLit
  bool bval = false;           // BoolLit
  std::string name;            // Var/VarAddr/field/function/binder/predvar
  bool is_msf = false;         // Apply: true for scopef(f)(...) applications
  std::vector<TermPtr> args;
  FormulaPtr farg;             // ScopeOfFormula
  Span span;
};

TermPtr mk_int(long long v, Span sp = {});
TermPtr mk_bool(bool v, Span sp = {});
TermPtr mk_nil(Span sp = {});
TermPtr mk_var(std::string n, Span sp = {});
TermPtr mk_varaddr(std::string n, Span sp = {});
TermPtr mk_deref(TermPtr a, Span sp = {});
TermPtr mk_fieldaddr(TermPtr a, std::string n, Span sp = {});
TermPtr mk_indexaddr(TermPtr a, TermPtr i, Span sp = {});
TermPtr mk_apply(std::string fn, std::vector<TermPtr> args, Span sp = {});
TermPtr mk_msf(std::string fn, std::vector<TermPtr> args, Span sp = {});
TermPtr mk_cond(TermPtr c, TermPtr a, TermPtr b, Span sp = {});
TermPtr mk_old(TermPtr a, Span sp = {});
TermPtr mk_setlit(std::vector<TermPtr> elems, Span sp = {});
TermPtr mk_seqlit(std::vector<TermPtr> elems, Span sp = {});
TermPtr mk_maplit(std::vector<TermPtr> kvs, Span sp = {});
TermPtr mk_scope_pred(std::string r, Span sp = {});
TermPtr mk_scope_term(TermPtr t, Span sp = {});
TermPtr mk_scope_formula(FormulaPtr f, Span sp = {});
TermPtr mk_allin(std::string x, TermPtr set, TermPtr body, Span sp = {});
TermPtr mk_unioncomp(std::string x, TermPtr set, TermPtr body, TermPtr filt,
                     Span sp = {});
TermPtr mk_empty_set();

// ---------------------------------------------------------------------------
// Formulas

enum class FormulaKind {
  BoolTerm,  // a bool-typed term used as an atomic formula
  Eq,        // weak (strict) equality
  StrongEq,  // ===
  Defined,   // def(t)
  And,
  Or,
  Not,
  Implies,
  Forall,  // optionally bounded: forall x in S . F
  Exists,
  PredVar,   // $r
  Outlying,  // Outlying(F, e) == F && (scope(F) inter e = {})
  FuncDefEq, // f(xs) == e, the defining equation of a function
};

struct Formula {
  FormulaKind kind;
  TermPtr t1, t2;
  FormulaPtr f1, f2;
  std::string var;   // binder name / PredVar name / FuncDefEq name
  TypePtr var_type;  // binder type (may be null when inferred or bounded)
  TermPtr bound;     // Forall/Exists: optional finite bound set
  Span span;
};

FormulaPtr mk_boolterm(TermPtr t, Span sp = {});
FormulaPtr mk_eq(TermPtr a, TermPtr b, Span sp = {});
FormulaPtr mk_strongeq(TermPtr a, TermPtr b, Span sp = {});
FormulaPtr mk_defined(TermPtr t, Span sp = {});
FormulaPtr mk_and(FormulaPtr a, FormulaPtr b, Span sp = {});
FormulaPtr mk_or(FormulaPtr a, FormulaPtr b, Span sp = {});
FormulaPtr mk_not(FormulaPtr a, Span sp = {});
FormulaPtr mk_implies(FormulaPtr a, FormulaPtr b, Span sp = {});
FormulaPtr mk_forall(std::string x, TypePtr t, TermPtr bound, FormulaPtr b,
                     Span sp = {});
FormulaPtr mk_exists(std::string x, TypePtr t, TermPtr bound, FormulaPtr b,
                     Span sp = {});
FormulaPtr mk_predvar(std::string r, Span sp = {});
FormulaPtr mk_outlying(FormulaPtr f, TermPtr e, Span sp = {});
FormulaPtr mk_true();
FormulaPtr mk_and_all(std::vector<FormulaPtr> fs, Span sp = {});

// ---------------------------------------------------------------------------
// Statements and proof scripts

enum class StmtKind { Skip, Assign, Alloc, If, While };

struct ScriptItem;
struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Stmt {
  StmtKind kind;
  TermPtr target;  // Assign/Alloc: core address term (the e1 of *e1 := ...)
  TermPtr rhs;     // Assign
  TypePtr alloc_type;
  TermPtr cond;                       // If/While, bool term
  std::vector<ScriptItem> body;       // If-then / While body
  std::vector<ScriptItem> else_body;  // If-else
  Span span;
};

enum class ItemKind {
  Assert,     // { F }
  Statement,  // skip; / assignment; / if / while
  Conseq,     // =>[l1,l2] { F }
  SubUp,      // sub+ x := e;
  SubDown,    // sub- x := old(e);
  FrameUp,    // frame+ $r := F;
  FrameDown,  // frame- $r := F;
  Junction,   // conj {..} {..} | disj {..} {..} | all x: T {..} | exist x: T {..}
};

struct ScriptItem {
  ItemKind kind;
  FormulaPtr formula;  // Assert / Conseq / FrameUp / FrameDown
  StmtPtr stmt;
  std::string name;  // Sub: variable; Frame: predvar; Junction: rule name/binder
  TermPtr term;      // Sub: the substituted term
  TypePtr var_type;  // Junction all/exist binder type
  std::vector<std::string> by;  // Conseq lemma restriction
  std::vector<ScriptItem> block1, block2;  // Junction sub-derivations
  Span span;
};

// ---------------------------------------------------------------------------
// Declarations and units

struct FuncDef {
  std::string name;
  std::vector<std::pair<std::string, TypePtr>> params;
  TypePtr ret;
  TermPtr body;        // null for abstract functions
  bool is_abstract = false;
  TermPtr scope_term;  // abstract: declared scope (defaults to {})
  Span span;
};

struct ScopeBoundDecl {
  std::string fn;
  TermPtr bound;
  FormulaPtr guard;  // defaults to true
  Span span;
};

struct Lemma {
  std::string name;
  FormulaPtr formula;
  Span span;
};

struct ProofScript {
  std::string name;
  std::vector<ScriptItem> items;
  Span span;
};

struct Unit {
  std::string file;
  std::vector<std::pair<std::string, TypePtr>> typedefs;  // in order
  std::vector<std::pair<std::string, TypePtr>> vars;      // program variables
  std::vector<FuncDef> funcs;
  std::vector<ScopeBoundDecl> scope_bounds;
  std::vector<Lemma> lemmas;
  std::vector<ProofScript> scripts;

  const TypePtr* find_typedef(const std::string& n) const;
  const TypePtr* find_var(const std::string& n) const;
  const FuncDef* find_func(const std::string& n) const;

  // derived scope-function bodies, memoized per function name
  mutable std::map<std::string, TermPtr> scope_cache;
};

// ---------------------------------------------------------------------------
// Printing and comparison (canonical core form)

std::string print_term(const TermPtr& t);
std::string print_formula(const FormulaPtr& f);
std::string print_stmt(const StmtPtr& s);

bool term_equal(const TermPtr& a, const TermPtr& b);
bool formula_equal(const FormulaPtr& a, const FormulaPtr& b);

// Collect the conjuncts of a formula (flattening And).
std::vector<FormulaPtr> conjuncts_of(const FormulaPtr& f);

// ---------------------------------------------------------------------------
// Errors

enum class ErrorKind {
  Parse,
  Type,
  RuleMismatch,
  PreStateLeak,
  UnknownScope,
  Internal,
};

struct Error {
  ErrorKind kind;
  std::string message;
  Span span;
};

[[noreturn]] void fail(ErrorKind k, const std::string& msg, Span sp = {});

// ---------------------------------------------------------------------------
// Obligations

enum class ObligationKind { Consequence, Definedness, ScopeDisjoint, ScopeBound };
enum class ObligationStatus { Discharged, Assumed, Open };

struct Obligation {
  int id = 0;
  ObligationKind kind;
  std::vector<FormulaPtr> hyps;
  FormulaPtr goal;
  Span origin;
  ObligationStatus status = ObligationStatus::Open;
  std::string note;  // discharging lemma names or a diagnostic
};

const char* obligation_kind_str(ObligationKind k);
std::string obligation_status_str(const Obligation& o);

}  // namespace sl
