#include "sl/ast.hpp"

#include <sstream>

namespace sl {

// ---------------------------------------------------------------------------
// Type factories

static TypePtr simple(TypeKind k) {
  auto t = std::make_shared<Type>();
  t->kind = k;
  return t;
}

TypePtr Type::intt() {
  static TypePtr t = simple(TypeKind::Int);
  return t;
}
TypePtr Type::boolt() {
  static TypePtr t = simple(TypeKind::Bool);
  return t;
}
TypePtr Type::ptrtop() {
  static TypePtr t = simple(TypeKind::PtrTop);
  return t;
}
TypePtr Type::ptr(TypePtr e) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::PtrTo;
  t->elem = std::move(e);
  return t;
}
TypePtr Type::array(TypePtr e, long long n) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::Array;
  t->elem = std::move(e);
  t->len = n;
  return t;
}
TypePtr Type::record(std::vector<std::pair<std::string, TypePtr>> fs) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::Record;
  t->fields = std::move(fs);
  return t;
}
TypePtr Type::named(std::string n) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::Named;
  t->name = std::move(n);
  return t;
}
TypePtr Type::set_of(TypePtr e) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::SetOf;
  t->elem = std::move(e);
  return t;
}
TypePtr Type::seq_of(TypePtr e) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::SeqOf;
  t->elem = std::move(e);
  return t;
}
TypePtr Type::map_of(TypePtr k, TypePtr v) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::MapOf;
  t->key = std::move(k);
  t->elem = std::move(v);
  return t;
}

std::string type_str(const TypePtr& t) {
  if (!t) return "<none>";
  switch (t->kind) {
    case TypeKind::Int: return "int";
    case TypeKind::Bool: return "bool";
    case TypeKind::PtrTop: return "anyptr";
    case TypeKind::PtrTo: return "ptr " + type_str(t->elem);
    case TypeKind::Array:
      return "arr[" + type_str(t->elem) + "; " + std::to_string(t->len) + "]";
    case TypeKind::Record: {
      std::string s = "rec {";
      for (size_t i = 0; i < t->fields.size(); ++i) {
        if (i) s += " ";
        s += t->fields[i].first + ": " + type_str(t->fields[i].second) + ";";
      }
      return s + "}";
    }
    case TypeKind::Named: return t->name;
    case TypeKind::SetOf: return "set<" + type_str(t->elem) + ">";
    case TypeKind::SeqOf: return "seq<" + type_str(t->elem) + ">";
    case TypeKind::MapOf:
      return "map<" + type_str(t->key) + ", " + type_str(t->elem) + ">";
    case TypeKind::Unknown: return "?";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Term factories

static std::shared_ptr<Term> node(TermKind k, Span sp) {
  auto t = std::make_shared<Term>();
  t->kind = k;
  t->span = sp;
  return t;
}

TermPtr mk_int(long long v, Span sp) {
  auto t = node(TermKind::IntLit, sp);
  t->ival = v;
  return t;
}
TermPtr mk_bool(bool v, Span sp) {
  auto t = node(TermKind::BoolLit, sp);
  t->bval = v;
  return t;
}
TermPtr mk_nil(Span sp) { return node(TermKind::NilLit, sp); }
TermPtr mk_var(std::string n, Span sp) {
  auto t = node(TermKind::Var, sp);
  t->name = std::move(n);
  return t;
}
TermPtr mk_varaddr(std::string n, Span sp) {
  auto t = node(TermKind::VarAddr, sp);
  t->name = std::move(n);
  return t;
}
TermPtr mk_deref(TermPtr a, Span sp) {
  auto t = node(TermKind::Deref, sp);
  t->args = {std::move(a)};
  return t;
}
TermPtr mk_fieldaddr(TermPtr a, std::string n, Span sp) {
  auto t = node(TermKind::FieldAddr, sp);
  t->args = {std::move(a)};
  t->name = std::move(n);
  return t;
}
TermPtr mk_indexaddr(TermPtr a, TermPtr i, Span sp) {
  auto t = node(TermKind::IndexAddr, sp);
  t->args = {std::move(a), std::move(i)};
  return t;
}
TermPtr mk_apply(std::string fn, std::vector<TermPtr> args, Span sp) {
  auto t = node(TermKind::Apply, sp);
  t->name = std::move(fn);
  t->args = std::move(args);
  return t;
}
TermPtr mk_msf(std::string fn, std::vector<TermPtr> args, Span sp) {
  auto t = node(TermKind::Apply, sp);
  t->name = std::move(fn);
  t->is_msf = true;
  t->args = std::move(args);
  return t;
}
TermPtr mk_cond(TermPtr c, TermPtr a, TermPtr b, Span sp) {
  auto t = node(TermKind::Cond, sp);
  t->args = {std::move(c), std::move(a), std::move(b)};
  return t;
}
TermPtr mk_old(TermPtr a, Span sp) {
  auto t = node(TermKind::Old, sp);
  t->args = {std::move(a)};
  return t;
}
TermPtr mk_setlit(std::vector<TermPtr> elems, Span sp) {
  auto t = node(TermKind::SetLit, sp);
  t->args = std::move(elems);
  return t;
}
TermPtr mk_seqlit(std::vector<TermPtr> elems, Span sp) {
  auto t = node(TermKind::SeqLit, sp);
  t->args = std::move(elems);
  return t;
}
TermPtr mk_maplit(std::vector<TermPtr> kvs, Span sp) {
  auto t = node(TermKind::MapLit, sp);
  t->args = std::move(kvs);
  return t;
}
TermPtr mk_scope_pred(std::string r, Span sp) {
  auto t = node(TermKind::ScopeOfPred, sp);
  t->name = std::move(r);
  return t;
}
TermPtr mk_scope_term(TermPtr e, Span sp) {
  auto t = node(TermKind::ScopeOfTerm, sp);
  t->args = {std::move(e)};
  return t;
}
TermPtr mk_scope_formula(FormulaPtr f, Span sp) {
  auto t = node(TermKind::ScopeOfFormula, sp);
  t->farg = std::move(f);
  return t;
}
TermPtr mk_allin(std::string x, TermPtr set, TermPtr body, Span sp) {
  auto t = node(TermKind::AllIn, sp);
  t->name = std::move(x);
  t->args = {std::move(set), std::move(body)};
  return t;
}
TermPtr mk_unioncomp(std::string x, TermPtr set, TermPtr body, TermPtr filt,
                     Span sp) {
  auto t = node(TermKind::UnionComp, sp);
  t->name = std::move(x);
  t->args = {std::move(set), std::move(body)};
  if (filt) t->args.push_back(std::move(filt));
  return t;
}
TermPtr mk_empty_set() {
  static TermPtr e = mk_setlit({});
  return e;
}

// ---------------------------------------------------------------------------
// Formula factories

static std::shared_ptr<Formula> fnode(FormulaKind k, Span sp) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->span = sp;
  return f;
}

FormulaPtr mk_boolterm(TermPtr t, Span sp) {
  auto f = fnode(FormulaKind::BoolTerm, sp);
  f->t1 = std::move(t);
  return f;
}
FormulaPtr mk_eq(TermPtr a, TermPtr b, Span sp) {
  auto f = fnode(FormulaKind::Eq, sp);
  f->t1 = std::move(a);
  f->t2 = std::move(b);
  return f;
}
FormulaPtr mk_strongeq(TermPtr a, TermPtr b, Span sp) {
  auto f = fnode(FormulaKind::StrongEq, sp);
  f->t1 = std::move(a);
  f->t2 = std::move(b);
  return f;
}
FormulaPtr mk_defined(TermPtr t, Span sp) {
  auto f = fnode(FormulaKind::Defined, sp);
  f->t1 = std::move(t);
  return f;
}
FormulaPtr mk_and(FormulaPtr a, FormulaPtr b, Span sp) {
  auto f = fnode(FormulaKind::And, sp);
  f->f1 = std::move(a);
  f->f2 = std::move(b);
  return f;
}
FormulaPtr mk_or(FormulaPtr a, FormulaPtr b, Span sp) {
  auto f = fnode(FormulaKind::Or, sp);
  f->f1 = std::move(a);
  f->f2 = std::move(b);
  return f;
}
FormulaPtr mk_not(FormulaPtr a, Span sp) {
  auto f = fnode(FormulaKind::Not, sp);
  f->f1 = std::move(a);
  return f;
}
FormulaPtr mk_implies(FormulaPtr a, FormulaPtr b, Span sp) {
  auto f = fnode(FormulaKind::Implies, sp);
  f->f1 = std::move(a);
  f->f2 = std::move(b);
  return f;
}
FormulaPtr mk_forall(std::string x, TypePtr t, TermPtr bound, FormulaPtr b,
                     Span sp) {
  auto f = fnode(FormulaKind::Forall, sp);
  f->var = std::move(x);
  f->var_type = std::move(t);
  f->bound = std::move(bound);
  f->f1 = std::move(b);
  return f;
}
FormulaPtr mk_exists(std::string x, TypePtr t, TermPtr bound, FormulaPtr b,
                     Span sp) {
  auto f = fnode(FormulaKind::Exists, sp);
  f->var = std::move(x);
  f->var_type = std::move(t);
  f->bound = std::move(bound);
  f->f1 = std::move(b);
  return f;
}
FormulaPtr mk_predvar(std::string r, Span sp) {
  auto f = fnode(FormulaKind::PredVar, sp);
  f->var = std::move(r);
  return f;
}
FormulaPtr mk_outlying(FormulaPtr p, TermPtr e, Span sp) {
  auto f = fnode(FormulaKind::Outlying, sp);
  f->f1 = std::move(p);
  f->t1 = std::move(e);
  return f;
}
FormulaPtr mk_true() {
  static FormulaPtr t = mk_boolterm(mk_bool(true));
  return t;
}
FormulaPtr mk_and_all(std::vector<FormulaPtr> fs, Span sp) {
  if (fs.empty()) return mk_true();
  FormulaPtr acc = fs[0];
  for (size_t i = 1; i < fs.size(); ++i) acc = mk_and(acc, fs[i], sp);
  return acc;
}

// ---------------------------------------------------------------------------
// Unit lookups

const TypePtr* Unit::find_typedef(const std::string& n) const {
  for (auto& td : typedefs)
    if (td.first == n) return &td.second;
  return nullptr;
}
const TypePtr* Unit::find_var(const std::string& n) const {
  for (auto& v : vars)
    if (v.first == n) return &v.second;
  return nullptr;
}
const FuncDef* Unit::find_func(const std::string& n) const {
  for (auto& f : funcs)
    if (f.name == n) return &f;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Printing

static bool is_infix(const std::string& op) {
  static const char* ops[] = {"+",  "-",  "*",     "/",  "<",      "<=",
                              ">",  ">=", "=",     "!=", "&&",     "||",
                              "union", "inter", "\\", "in", "subset", "psubset",
                              "++"};
  for (auto* o : ops)
    if (op == o) return true;
  return false;
}

static void pt(std::ostream& os, const TermPtr& t);

static void pt_list(std::ostream& os, const std::vector<TermPtr>& xs,
                    size_t from = 0, size_t step = 1) {
  bool first = true;
  for (size_t i = from; i < xs.size(); i += step) {
    if (!first) os << ", ";
    first = false;
    pt(os, xs[i]);
  }
}

static void pt(std::ostream& os, const TermPtr& t) {
  if (!t) {
    os << "<null>";
    return;
  }
  switch (t->kind) {
    case TermKind::IntLit: os << t->ival; return;
    case TermKind::BoolLit: os << (t->bval ? "true" : "false"); return;
    case TermKind::NilLit: os << "nil"; return;
    case TermKind::Var:
    case TermKind::SVar: os << t->name; return;
    case TermKind::VarAddr: os << "&" << t->name; return;
    case TermKind::Deref:
      os << "*(";
      pt(os, t->args[0]);
      os << ")";
      return;
    case TermKind::FieldAddr:
      os << "&(";
      pt(os, t->args[0]);
      os << ")->" << t->name;
      return;
    case TermKind::IndexAddr:
      os << "&(";
      pt(os, t->args[0]);
      os << ")[";
      pt(os, t->args[1]);
      os << "]";
      return;
    case TermKind::Apply:
      if (t->is_msf) {
        os << "scopef(" << t->name << ")(";
        pt_list(os, t->args);
        os << ")";
      } else if (t->name == "!" || t->name == "neg") {
        os << (t->name == "!" ? "!(" : "-(");
        pt(os, t->args[0]);
        os << ")";
      } else if (t->args.size() == 2 && is_infix(t->name)) {
        // `union {` would reparse as a comprehension, so a literal right
        // operand of union gets its own parentheses
        bool wrap = t->name == "union" &&
                    (t->args[1]->kind == TermKind::SetLit ||
                     t->args[1]->kind == TermKind::MapLit);
        os << "(";
        pt(os, t->args[0]);
        os << " " << t->name << " ";
        if (wrap) os << "(";
        pt(os, t->args[1]);
        if (wrap) os << ")";
        os << ")";
      } else {
        os << t->name << "(";
        pt_list(os, t->args);
        os << ")";
      }
      return;
    case TermKind::Cond:
      os << "(";
      pt(os, t->args[0]);
      os << " ? ";
      pt(os, t->args[1]);
      os << " : ";
      pt(os, t->args[2]);
      os << ")";
      return;
    case TermKind::Old:
      os << "old(";
      pt(os, t->args[0]);
      os << ")";
      return;
    case TermKind::SetLit:
      os << "{";
      pt_list(os, t->args);
      os << "}";
      return;
    case TermKind::SeqLit:
      os << "[";
      pt_list(os, t->args);
      os << "]";
      return;
    case TermKind::MapLit: {
      os << "{";
      for (size_t i = 0; i + 1 < t->args.size(); i += 2) {
        if (i) os << ", ";
        pt(os, t->args[i]);
        os << " |-> ";
        pt(os, t->args[i + 1]);
      }
      os << "}";
      return;
    }
    case TermKind::ScopeOfPred: os << "scope($" << t->name << ")"; return;
    case TermKind::ScopeOfTerm:
      os << "scope(";
      pt(os, t->args[0]);
      os << ")";
      return;
    case TermKind::ScopeOfFormula:
      os << "scope(" << print_formula(t->farg) << ")";
      return;
    case TermKind::AllIn:
      os << "(all " << t->name << " in ";
      pt(os, t->args[0]);
      os << " . ";
      pt(os, t->args[1]);
      os << ")";
      return;
    case TermKind::UnionComp:
      os << "union{ ";
      pt(os, t->args[1]);
      os << " | " << t->name << " in ";
      pt(os, t->args[0]);
      if (t->args.size() > 2) {
        os << " when ";
        pt(os, t->args[2]);
      }
      os << " }";
      return;
    case TermKind::SArrow:
      os << "(";
      pt(os, t->args[0]);
      os << ")->" << t->name;
      return;
    case TermKind::SDot:
      os << "(";
      pt(os, t->args[0]);
      os << ")." << t->name;
      return;
    case TermKind::SIndex:
      os << "(";
      pt(os, t->args[0]);
      os << ")[";
      pt(os, t->args[1]);
      os << "]";
      return;
    case TermKind::SAddr:
      os << "&(";
      pt(os, t->args[0]);
      os << ")";
      return;
  }
}

std::string print_term(const TermPtr& t) {
  std::ostringstream os;
  pt(os, t);
  return os.str();
}

std::string print_formula(const FormulaPtr& f) {
  if (!f) return "<null>";
  switch (f->kind) {
    case FormulaKind::BoolTerm: return print_term(f->t1);
    case FormulaKind::Eq:
      return "(" + print_term(f->t1) + " = " + print_term(f->t2) + ")";
    case FormulaKind::StrongEq:
      return "(" + print_term(f->t1) + " === " + print_term(f->t2) + ")";
    case FormulaKind::Defined: return "def(" + print_term(f->t1) + ")";
    case FormulaKind::And:
      return "(" + print_formula(f->f1) + " && " + print_formula(f->f2) + ")";
    case FormulaKind::Or:
      return "(" + print_formula(f->f1) + " || " + print_formula(f->f2) + ")";
    case FormulaKind::Not: return "!(" + print_formula(f->f1) + ")";
    case FormulaKind::Implies:
      return "(" + print_formula(f->f1) + " => " + print_formula(f->f2) + ")";
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      std::string head = f->kind == FormulaKind::Forall ? "forall" : "exists";
      std::string bind =
          f->bound ? f->var + " in " + print_term(f->bound)
                   : f->var + (f->var_type ? ": " + type_str(f->var_type) : "");
      return "(" + head + " " + bind + " . " + print_formula(f->f1) + ")";
    }
    case FormulaKind::PredVar: return "$" + f->var;
    case FormulaKind::Outlying:
      return "Outlying(" + print_formula(f->f1) + ", " + print_term(f->t1) +
             ")";
    case FormulaKind::FuncDefEq:
      return "(" + f->var + " == " + print_term(f->t1) + ")";
  }
  return "<formula>";
}

std::string print_stmt(const StmtPtr& s) {
  if (!s) return "<null>";
  switch (s->kind) {
    case StmtKind::Skip: return "skip;";
    case StmtKind::Assign:
      return "*(" + print_term(s->target) + ") := " + print_term(s->rhs) + ";";
    case StmtKind::Alloc:
      return "*(" + print_term(s->target) +
             ") := alloc(" + type_str(s->alloc_type) + ");";
    case StmtKind::If: return "if (" + print_term(s->cond) + ") {...}";
    case StmtKind::While: return "while (" + print_term(s->cond) + ") {...}";
  }
  return "<stmt>";
}

// ---------------------------------------------------------------------------
// Structural equality

bool term_equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->name != b->name || a->ival != b->ival ||
      a->bval != b->bval || a->is_msf != b->is_msf ||
      a->args.size() != b->args.size())
    return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!term_equal(a->args[i], b->args[i])) return false;
  if ((a->farg == nullptr) != (b->farg == nullptr)) return false;
  if (a->farg && !formula_equal(a->farg, b->farg)) return false;
  return true;
}

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->var != b->var) return false;
  if ((a->t1 == nullptr) != (b->t1 == nullptr)) return false;
  if (a->t1 && !term_equal(a->t1, b->t1)) return false;
  if ((a->t2 == nullptr) != (b->t2 == nullptr)) return false;
  if (a->t2 && !term_equal(a->t2, b->t2)) return false;
  if ((a->f1 == nullptr) != (b->f1 == nullptr)) return false;
  if (a->f1 && !formula_equal(a->f1, b->f1)) return false;
  if ((a->f2 == nullptr) != (b->f2 == nullptr)) return false;
  if (a->f2 && !formula_equal(a->f2, b->f2)) return false;
  if ((a->bound == nullptr) != (b->bound == nullptr)) return false;
  if (a->bound && !term_equal(a->bound, b->bound)) return false;
  return true;
}

std::vector<FormulaPtr> conjuncts_of(const FormulaPtr& f) {
  std::vector<FormulaPtr> out;
  if (!f) return out;
  if (f->kind == FormulaKind::And) {
    auto l = conjuncts_of(f->f1);
    auto r = conjuncts_of(f->f2);
    out.insert(out.end(), l.begin(), l.end());
    out.insert(out.end(), r.begin(), r.end());
  } else {
    out.push_back(f);
  }
  return out;
}

// ---------------------------------------------------------------------------

void fail(ErrorKind k, const std::string& msg, Span sp) {
  throw Error{k, msg, sp};
}

const char* obligation_kind_str(ObligationKind k) {
  switch (k) {
    case ObligationKind::Consequence: return "consequence";
    case ObligationKind::Definedness: return "definedness";
    case ObligationKind::ScopeDisjoint: return "scope-disjoint";
    case ObligationKind::ScopeBound: return "scope-bound";
  }
  return "?";
}

std::string obligation_status_str(const Obligation& o) {
  switch (o.status) {
    case ObligationStatus::Discharged:
      return "discharged(" + (o.note.empty() ? std::string("builtin") : o.note) +
             ")";
    case ObligationStatus::Assumed: return "assumed";
    case ObligationStatus::Open: return "open";
  }
  return "?";
}

}  // namespace sl
