#include "sl/types.hpp"

#include <set>

namespace sl {
namespace {

struct CannotInfer {
  std::string name;
  Span span;
};

TypePtr resolve_impl(const Unit& u, TypePtr t, std::set<std::string>& seen) {
  while (t && t->kind == TypeKind::Named) {
    if (!seen.insert(t->name).second)
      fail(ErrorKind::Type, "cyclic typedef '" + t->name + "'");
    const TypePtr* d = u.find_typedef(t->name);
    if (!d) fail(ErrorKind::Type, "unknown type '" + t->name + "'");
    t = *d;
  }
  return t;
}

bool is_unknown(const TypePtr& t) { return t && t->kind == TypeKind::Unknown; }

}  // namespace

TypePtr resolve_type(const Unit& u, const TypePtr& t) {
  std::set<std::string> seen;
  return resolve_impl(u, t, seen);
}

bool is_pointer(const TypePtr& t) {
  return t && (t->kind == TypeKind::PtrTo || t->kind == TypeKind::PtrTop);
}

bool is_scalar(const TypePtr& t) {
  return t && (t->kind == TypeKind::Int || t->kind == TypeKind::Bool ||
               is_pointer(t));
}

bool type_compat(const Unit& u, const TypePtr& a0, const TypePtr& b0) {
  // identical names (common for recursive record types) need no unfolding
  if (a0 && b0 && a0->kind == TypeKind::Named && b0->kind == TypeKind::Named &&
      a0->name == b0->name)
    return true;
  TypePtr a = resolve_type(u, a0), b = resolve_type(u, b0);
  if (!a || !b) return false;
  if (is_unknown(a) || is_unknown(b)) return true;
  if (is_pointer(a) && is_pointer(b)) {
    if (a->kind == TypeKind::PtrTop || b->kind == TypeKind::PtrTop) return true;
    return type_compat(u, a->elem, b->elem);
  }
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TypeKind::Int:
    case TypeKind::Bool:
      return true;
    case TypeKind::Array:
      return a->len == b->len && type_compat(u, a->elem, b->elem);
    case TypeKind::SetOf:
    case TypeKind::SeqOf:
      return type_compat(u, a->elem, b->elem);
    case TypeKind::MapOf:
      return type_compat(u, a->key, b->key) && type_compat(u, a->elem, b->elem);
    case TypeKind::Record: {
      if (a->fields.size() != b->fields.size()) return false;
      for (size_t i = 0; i < a->fields.size(); ++i)
        if (a->fields[i].first != b->fields[i].first ||
            !type_compat(u, a->fields[i].second, b->fields[i].second))
          return false;
      return true;
    }
    default:
      return false;
  }
}

namespace {

// Prefer the more specific of two compatible types.
TypePtr unify(const Unit& u, const TypePtr& a, const TypePtr& b, Span sp) {
  TypePtr ra = resolve_type(u, a), rb = resolve_type(u, b);
  if (is_unknown(ra)) return rb;
  if (is_unknown(rb)) return ra;
  if (!type_compat(u, ra, rb))
    fail(ErrorKind::Type,
         "type mismatch: " + type_str(ra) + " vs " + type_str(rb), sp);
  if (ra->kind == TypeKind::PtrTop) return rb;
  if (rb->kind == TypeKind::PtrTop) return ra;
  if (ra->kind == TypeKind::SetOf || ra->kind == TypeKind::SeqOf)
    return ra->kind == TypeKind::SetOf
               ? Type::set_of(unify(u, ra->elem, rb->elem, sp))
               : Type::seq_of(unify(u, ra->elem, rb->elem, sp));
  if (ra->kind == TypeKind::MapOf)
    return Type::map_of(unify(u, ra->key, rb->key, sp),
                        unify(u, ra->elem, rb->elem, sp));
  return ra;
}

struct Checker {
  const Unit& u;
  std::map<std::string, TypePtr>* env;
  std::map<std::string, TypePtr> local;  // used when caller passes none

  explicit Checker(const Unit& un, std::map<std::string, TypePtr>* e)
      : u(un), env(e ? e : &local) {}

  TypePtr res(const TypePtr& t) { return resolve_type(u, t); }

  [[noreturn]] void err(const std::string& m, Span sp) {
    fail(ErrorKind::Type, m, sp);
  }

  void require(bool ok, const std::string& m, Span sp) {
    if (!ok) err(m, sp);
  }

  TypePtr var_type(const std::string& n, TypePtr expected, Span sp) {
    auto it = env->find(n);
    if (it != env->end()) {
      if (is_unknown(it->second) && expected && !is_unknown(res(expected)))
        it->second = res(expected);
      if (is_unknown(it->second)) throw CannotInfer{n, sp};
      return it->second;
    }
    if (expected && !is_unknown(res(expected))) {
      (*env)[n] = res(expected);
      return (*env)[n];
    }
    (*env)[n] = std::make_shared<Type>(Type{TypeKind::Unknown});
    throw CannotInfer{n, sp};
  }

  TypePtr term(const TermPtr& t, TypePtr expected = nullptr) {
    switch (t->kind) {
      case TermKind::IntLit: return Type::intt();
      case TermKind::BoolLit: return Type::boolt();
      case TermKind::NilLit: {
        TypePtr e = expected ? res(expected) : nullptr;
        return e && is_pointer(e) ? e : Type::ptrtop();
      }
      case TermKind::Var: return var_type(t->name, expected, t->span);
      case TermKind::VarAddr: {
        const TypePtr* v = u.find_var(t->name);
        require(v != nullptr, "unknown program variable '" + t->name + "'",
                t->span);
        return Type::ptr(*v);
      }
      case TermKind::Deref: {
        TypePtr a = res(term(t->args[0]));
        require(a->kind == TypeKind::PtrTo,
                "cannot dereference a value of type " + type_str(a), t->span);
        TypePtr pointee = res(a->elem);
        require(is_scalar(pointee),
                "'*' applies only to pointers to memory units, got pointee " +
                    type_str(pointee),
                t->span);
        return pointee;
      }
      case TermKind::FieldAddr: {
        TypePtr a = res(term(t->args[0]));
        require(a->kind == TypeKind::PtrTo,
                "'&e->n' needs a record pointer, got " + type_str(a), t->span);
        TypePtr rec = res(a->elem);
        require(rec->kind == TypeKind::Record,
                "'&e->n' needs a record pointer, got pointer to " +
                    type_str(rec),
                t->span);
        for (auto& f : rec->fields)
          if (f.first == t->name) return Type::ptr(f.second);
        err("record has no field '" + t->name + "'", t->span);
      }
      case TermKind::IndexAddr: {
        TypePtr a = res(term(t->args[0]));
        require(a->kind == TypeKind::PtrTo,
                "'&e[i]' needs an array pointer, got " + type_str(a), t->span);
        TypePtr arr = res(a->elem);
        require(arr->kind == TypeKind::Array,
                "'&e[i]' needs an array pointer, got pointer to " +
                    type_str(arr),
                t->span);
        TypePtr i = res(term(t->args[1]));
        require(i->kind == TypeKind::Int, "array index must be int", t->span);
        return Type::ptr(arr->elem);
      }
      case TermKind::Apply: return apply(t, expected);
      case TermKind::Cond: {
        TypePtr c = res(term(t->args[0]));
        require(c->kind == TypeKind::Bool, "conditional guard must be bool",
                t->span);
        TypePtr a, b;
        try {
          a = term(t->args[1], expected);
        } catch (const CannotInfer&) {
          b = term(t->args[2], expected);
          a = term(t->args[1], b);
        }
        if (!b) b = term(t->args[2], expected ? expected : a);
        return unify(u, a, b, t->span);
      }
      case TermKind::Old: return term(t->args[0], expected);
      case TermKind::SetLit: {
        TypePtr e = expected ? res(expected) : nullptr;
        if (t->args.empty()) {
          if (e && (e->kind == TypeKind::SetOf || e->kind == TypeKind::MapOf ||
                    e->kind == TypeKind::SeqOf))
            return e;
          return Type::set_of(std::make_shared<Type>(Type{TypeKind::Unknown}));
        }
        TypePtr ee = e && e->kind == TypeKind::SetOf ? e->elem : nullptr;
        if (ee) {
          // elements only need to fit the expected element type
          for (auto& a : t->args) {
            TypePtr at = term(a, ee);
            if (!type_compat(u, at, ee))
              fail(ErrorKind::Type,
                   "set element type " + type_str(at) + " does not fit " +
                       type_str(ee),
                   t->span);
          }
          return e;
        }
        TypePtr el = term(t->args[0], nullptr);
        for (size_t i = 1; i < t->args.size(); ++i)
          el = unify(u, el, term(t->args[i], el), t->span);
        return Type::set_of(el);
      }
      case TermKind::SeqLit: {
        TypePtr e = expected ? res(expected) : nullptr;
        TypePtr ee = e && e->kind == TypeKind::SeqOf ? e->elem : nullptr;
        if (t->args.empty())
          return e && e->kind == TypeKind::SeqOf
                     ? e
                     : Type::seq_of(
                           std::make_shared<Type>(Type{TypeKind::Unknown}));
        TypePtr el = term(t->args[0], ee);
        for (size_t i = 1; i < t->args.size(); ++i)
          el = unify(u, el, term(t->args[i], ee ? ee : el), t->span);
        return Type::seq_of(el);
      }
      case TermKind::MapLit: {
        TypePtr e = expected ? res(expected) : nullptr;
        TypePtr ek = e && e->kind == TypeKind::MapOf ? e->key : nullptr;
        TypePtr ev = e && e->kind == TypeKind::MapOf ? e->elem : nullptr;
        TypePtr k, v;
        for (size_t i = 0; i + 1 < t->args.size(); i += 2) {
          TypePtr ki = term(t->args[i], ek ? ek : k);
          TypePtr vi = term(t->args[i + 1], ev ? ev : v);
          k = k ? unify(u, k, ki, t->span) : ki;
          v = v ? unify(u, v, vi, t->span) : vi;
        }
        return Type::map_of(k, v);
      }
      case TermKind::ScopeOfPred:
        return Type::set_of(Type::ptrtop());
      case TermKind::ScopeOfTerm:
        term(t->args[0]);
        return Type::set_of(Type::ptrtop());
      case TermKind::ScopeOfFormula:
        formula(t->farg);
        return Type::set_of(Type::ptrtop());
      case TermKind::AllIn: {
        TypePtr s = res(term(t->args[0]));
        require(s->kind == TypeKind::SetOf, "'all x in S' needs a set",
                t->span);
        auto saved = save_binding(t->name, s->elem);
        TypePtr b = res(term(t->args[1]));
        restore_binding(t->name, saved);
        require(b->kind == TypeKind::Bool, "'all' body must be bool", t->span);
        return Type::boolt();
      }
      case TermKind::UnionComp: {
        TypePtr s = res(term(t->args[0]));
        require(s->kind == TypeKind::SetOf, "comprehension bound must be a set",
                t->span);
        auto saved = save_binding(t->name, s->elem);
        TypePtr b = res(term(t->args[1]));
        if (t->args.size() > 2) {
          TypePtr f = res(term(t->args[2]));
          require(f->kind == TypeKind::Bool, "'when' filter must be bool",
                  t->span);
        }
        restore_binding(t->name, saved);
        require(b->kind == TypeKind::SetOf, "comprehension body must be a set",
                t->span);
        return b;
      }
      default:
        err("internal: surface sugar survived expansion", t->span);
    }
  }

  std::optional<TypePtr> save_binding(const std::string& n, TypePtr ty) {
    std::optional<TypePtr> old;
    auto it = env->find(n);
    if (it != env->end()) old = it->second;
    (*env)[n] = res(ty);
    return old;
  }
  void restore_binding(const std::string& n, const std::optional<TypePtr>& old) {
    if (old)
      (*env)[n] = *old;
    else
      env->erase(n);
  }

  TypePtr apply(const TermPtr& t, TypePtr expected) {
    const std::string& op = t->name;
    auto arity = [&](size_t n) {
      require(t->args.size() == n,
              "'" + op + "' expects " + std::to_string(n) + " argument(s)",
              t->span);
    };
    auto intarg = [&](size_t i) {
      require(res(term(t->args[i]))->kind == TypeKind::Int,
              "'" + op + "' expects int operands", t->span);
    };
    if (t->is_msf) {
      const FuncDef* f = u.find_func(op);
      require(f != nullptr, "scopef of unknown function '" + op + "'", t->span);
      arity(f->params.size());
      for (size_t i = 0; i < t->args.size(); ++i) {
        TypePtr a = term(t->args[i], f->params[i].second);
        require(type_compat(u, a, f->params[i].second),
                "argument type mismatch in scopef(" + op + ")", t->span);
      }
      return Type::set_of(Type::ptrtop());
    }
    if (op == "+" || op == "-" || op == "*" || op == "/") {
      arity(2);
      intarg(0);
      intarg(1);
      return Type::intt();
    }
    if (op == "neg") {
      arity(1);
      intarg(0);
      return Type::intt();
    }
    if (op == "<" || op == "<=" || op == ">" || op == ">=") {
      arity(2);
      intarg(0);
      intarg(1);
      return Type::boolt();
    }
    if (op == "=" || op == "!=") {
      arity(2);
      TypePtr a, b;
      try {
        a = term(t->args[0]);
      } catch (const CannotInfer&) {
        b = term(t->args[1]);
        a = term(t->args[0], b);
      }
      if (!b) b = term(t->args[1], a);
      unify(u, a, b, t->span);
      return Type::boolt();
    }
    if (op == "&&" || op == "||") {
      arity(2);
      require(res(term(t->args[0]))->kind == TypeKind::Bool &&
                  res(term(t->args[1]))->kind == TypeKind::Bool,
              "'" + op + "' expects bool operands", t->span);
      return Type::boolt();
    }
    if (op == "!") {
      arity(1);
      require(res(term(t->args[0]))->kind == TypeKind::Bool,
              "'!' expects a bool operand", t->span);
      return Type::boolt();
    }
    if (op == "union" || op == "inter" || op == "\\") {
      arity(2);
      TypePtr a, b;
      try {
        a = term(t->args[0], expected);
      } catch (const CannotInfer&) {
        b = term(t->args[1], expected);
        a = term(t->args[0], b);
      }
      if (!b) b = term(t->args[1], expected ? expected : a);
      TypePtr r = unify(u, a, b, t->span);
      require(res(r)->kind == TypeKind::SetOf,
              "'" + op + "' expects set operands", t->span);
      return r;
    }
    if (op == "in") {
      arity(2);
      TypePtr el, s;
      try {
        el = term(t->args[0]);
        s = res(term(t->args[1], Type::set_of(el)));
      } catch (const CannotInfer&) {
        s = res(term(t->args[1]));
        require(s->kind == TypeKind::SetOf, "'in' expects a set", t->span);
        el = term(t->args[0], s->elem);
      }
      require(s->kind == TypeKind::SetOf, "'in' expects a set", t->span);
      require(type_compat(u, el, s->elem), "'in' element/set type mismatch",
              t->span);
      return Type::boolt();
    }
    if (op == "subset" || op == "psubset") {
      arity(2);
      TypePtr a = res(term(t->args[0]));
      TypePtr b = res(term(t->args[1]));
      require(a->kind == TypeKind::SetOf && b->kind == TypeKind::SetOf,
              "'" + op + "' expects set operands", t->span);
      unify(u, a, b, t->span);
      return Type::boolt();
    }
    if (op == "++") {
      arity(2);
      TypePtr a = res(term(t->args[0], expected));
      TypePtr b = res(term(t->args[1], a));
      require(a->kind == TypeKind::MapOf && b->kind == TypeKind::MapOf,
              "'++' expects map operands", t->span);
      return unify(u, a, b, t->span);
    }
    if (op == "rng") {
      arity(1);
      TypePtr a = res(term(t->args[0]));
      if (a->kind == TypeKind::SeqOf) return Type::set_of(a->elem);
      if (a->kind == TypeKind::MapOf) return Type::set_of(a->elem);
      err("'rng' expects a sequence or a map", t->span);
    }
    if (op == "head") {
      arity(1);
      TypePtr a = res(term(t->args[0]));
      require(a->kind == TypeKind::SeqOf, "'head' expects a sequence", t->span);
      return a->elem;
    }
    if (op == "tail") {
      arity(1);
      TypePtr a = res(term(t->args[0]));
      require(a->kind == TypeKind::SeqOf, "'tail' expects a sequence", t->span);
      return a;
    }
    if (op == "cons") {
      arity(2);
      TypePtr el = term(t->args[0]);
      TypePtr s = res(term(t->args[1], Type::seq_of(el)));
      require(s->kind == TypeKind::SeqOf, "'cons' expects a sequence", t->span);
      unify(u, Type::seq_of(el), s, t->span);
      return s;
    }
    if (op == "MAX" || op == "MIN") {
      arity(1);
      TypePtr a = res(term(t->args[0]));
      require(a->kind == TypeKind::SetOf &&
                  res(a->elem)->kind == TypeKind::Int,
              "'" + op + "' expects a set of int", t->span);
      return Type::intt();
    }
    if (op == "Block") {
      arity(1);
      require(is_pointer(res(term(t->args[0]))), "'Block' expects a pointer",
              t->span);
      return Type::set_of(Type::ptrtop());
    }
    if (op == "InHeap") {
      arity(1);
      require(is_pointer(res(term(t->args[0]))), "'InHeap' expects a pointer",
              t->span);
      return Type::boolt();
    }
    // user-defined function
    const FuncDef* f = u.find_func(op);
    require(f != nullptr, "unknown function '" + op + "'", t->span);
    arity(f->params.size());
    for (size_t i = 0; i < t->args.size(); ++i) {
      TypePtr a = term(t->args[i], f->params[i].second);
      require(type_compat(u, a, f->params[i].second),
              "argument " + std::to_string(i + 1) + " of '" + op +
                  "' has type " + type_str(a) + ", expected " +
                  type_str(f->params[i].second),
              t->span);
    }
    return f->ret;
  }

  void formula(const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaKind::BoolTerm:
        require(res(term(f->t1))->kind == TypeKind::Bool,
                "formula atom must be bool", f->span);
        return;
      case FormulaKind::Eq:
      case FormulaKind::StrongEq: {
        TypePtr a, b;
        try {
          a = term(f->t1);
        } catch (const CannotInfer&) {
          b = term(f->t2);
          a = term(f->t1, b);
        }
        if (!b) b = term(f->t2, a);
        unify(u, a, b, f->span);
        return;
      }
      case FormulaKind::Defined:
        term(f->t1);
        return;
      case FormulaKind::And:
      case FormulaKind::Or:
      case FormulaKind::Implies:
        formula(f->f1);
        formula(f->f2);
        return;
      case FormulaKind::Not:
        formula(f->f1);
        return;
      case FormulaKind::Forall:
      case FormulaKind::Exists: {
        TypePtr bt = f->var_type;
        if (f->bound) {
          TypePtr s = res(term(f->bound));
          require(s->kind == TypeKind::SetOf, "quantifier bound must be a set",
                  f->span);
          bt = s->elem;
        }
        if (!bt) bt = std::make_shared<Type>(Type{TypeKind::Unknown});
        auto saved = save_binding(f->var, bt);
        formula(f->f1);
        restore_binding(f->var, saved);
        return;
      }
      case FormulaKind::PredVar:
        return;
      case FormulaKind::Outlying: {
        formula(f->f1);
        TypePtr s = res(term(f->t1, Type::set_of(Type::ptrtop())));
        require(s->kind == TypeKind::SetOf && is_pointer(res(s->elem)),
                "Outlying needs a set of pointers", f->span);
        return;
      }
      case FormulaKind::FuncDefEq:
        term(f->t1);
        return;
    }
  }

  void stmt(const StmtPtr& s) {
    switch (s->kind) {
      case StmtKind::Skip:
        return;
      case StmtKind::Assign: {
        TypePtr a = res(term(s->target));
        require(a->kind == TypeKind::PtrTo && is_scalar(res(a->elem)),
                "assignment target must address a memory unit", s->span);
        TypePtr r = term(s->rhs, a->elem);
        require(type_compat(u, r, a->elem),
                "cannot assign " + type_str(r) + " to a unit of type " +
                    type_str(res(a->elem)),
                s->span);
        return;
      }
      case StmtKind::Alloc: {
        TypePtr a = res(term(s->target));
        require(a->kind == TypeKind::PtrTo,
                "alloc target must address a pointer unit", s->span);
        TypePtr pointee = res(a->elem);
        require(pointee->kind == TypeKind::PtrTo &&
                    type_compat(u, pointee->elem, s->alloc_type),
                "alloc type does not match the target pointer", s->span);
        return;
      }
      case StmtKind::If:
        require(res(term(s->cond))->kind == TypeKind::Bool,
                "if condition must be bool", s->span);
        items(s->body);
        items(s->else_body);
        return;
      case StmtKind::While:
        require(res(term(s->cond))->kind == TypeKind::Bool,
                "while condition must be bool", s->span);
        items(s->body);
        return;
    }
  }

  void items(const std::vector<ScriptItem>& xs) {
    for (auto& it : xs) {
      switch (it.kind) {
        case ItemKind::Assert:
        case ItemKind::Conseq:
        case ItemKind::FrameUp:
        case ItemKind::FrameDown:
          formula(it.formula);
          break;
        case ItemKind::SubUp:
        case ItemKind::SubDown: {
          TypePtr ty = term(it.term);
          auto itv = env->find(it.name);
          if (itv == env->end())
            (*env)[it.name] = res(ty);
          else
            itv->second = unify(u, itv->second, ty, it.span);
          break;
        }
        case ItemKind::Statement:
          stmt(it.stmt);
          break;
        case ItemKind::Junction: {
          if (it.name == "all" || it.name == "exist") {
            auto saved = save_binding(it.term->name, it.var_type);
            items(it.block1);
            restore_binding(it.term->name, saved);
          } else {
            items(it.block1);
            items(it.block2);
          }
          break;
        }
      }
    }
  }
};

}  // namespace

TypePtr type_of(const Unit& u, const TermPtr& t,
                std::map<std::string, TypePtr>* env, TypePtr expected) {
  Checker c(u, env);
  try {
    return c.term(t, expected);
  } catch (const CannotInfer& ci) {
    fail(ErrorKind::Type, "cannot infer the type of '" + ci.name + "'",
         ci.span);
  }
}

void check_formula(const Unit& u, const FormulaPtr& f,
                   std::map<std::string, TypePtr>* env) {
  Checker c(u, env);
  try {
    c.formula(f);
  } catch (const CannotInfer& ci) {
    fail(ErrorKind::Type, "cannot infer the type of '" + ci.name + "'",
         ci.span);
  }
}

void check_unit(const Unit& u) {
  // typedefs resolve (and record/array shapes are well-formed)
  for (auto& td : u.typedefs) resolve_type(u, td.second);
  for (auto& v : u.vars) resolve_type(u, v.second);
  for (auto& f : u.funcs) {
    std::map<std::string, TypePtr> env;
    for (auto& p : f.params) env[p.first] = resolve_type(u, p.second);
    Checker c(u, &env);
    try {
      if (f.body) {
        TypePtr bt = c.term(f.body, f.ret);
        if (!type_compat(u, bt, f.ret))
          fail(ErrorKind::Type,
               "body of '" + f.name + "' has type " + type_str(bt) +
                   ", declared " + type_str(f.ret),
               f.span);
      }
      if (f.scope_term) {
        TypePtr st = resolve_type(
            u, c.term(f.scope_term, Type::set_of(Type::ptrtop())));
        if (st->kind != TypeKind::SetOf)
          fail(ErrorKind::Type,
               "declared scope of '" + f.name + "' must be a set of pointers",
               f.span);
      }
    } catch (const CannotInfer& ci) {
      fail(ErrorKind::Type, "cannot infer the type of '" + ci.name + "'",
           ci.span);
    }
  }
  for (auto& sb : u.scope_bounds) {
    const FuncDef* f = u.find_func(sb.fn);
    if (!f)
      fail(ErrorKind::Type, "scopebound for unknown function '" + sb.fn + "'",
           sb.span);
    std::map<std::string, TypePtr> env;
    for (auto& p : f->params) env[p.first] = resolve_type(u, p.second);
    Checker c(u, &env);
    try {
      TypePtr bt =
          resolve_type(u, c.term(sb.bound, Type::set_of(Type::ptrtop())));
      if (bt->kind != TypeKind::SetOf)
        fail(ErrorKind::Type, "scope bound must be a set of pointers", sb.span);
      c.formula(sb.guard);
    } catch (const CannotInfer& ci) {
      fail(ErrorKind::Type, "cannot infer the type of '" + ci.name + "'",
           ci.span);
    }
  }
  for (auto& l : u.lemmas) {
    std::map<std::string, TypePtr> env;
    check_formula(u, l.formula, &env);
  }
  for (auto& s : u.scripts) {
    std::map<std::string, TypePtr> env;
    Checker c(u, &env);
    try {
      c.items(s.items);
    } catch (const CannotInfer& ci) {
      fail(ErrorKind::Type, "cannot infer the type of '" + ci.name + "'",
           ci.span);
    }
  }
}

}  // namespace sl
