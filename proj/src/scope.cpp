#include "sl/scope.hpp"

#include <algorithm>
#include <set>

namespace sl {
namespace {

bool is_builtin_op(const std::string& n) {
  static const std::set<std::string> ops = {
      "+",  "-",     "*",       "/",  "<",    "<=",  ">",    ">=",
      "=",  "!=",    "&&",      "||", "!",    "neg", "union", "inter",
      "\\", "in",    "subset",  "psubset", "++", "rng", "head", "tail",
      "cons", "MAX", "MIN",     "Block",   "InHeap"};
  return ops.count(n) > 0;
}

bool is_empty_set(const TermPtr& t) {
  return t->kind == TermKind::SetLit && t->args.empty();
}

TermPtr uni(TermPtr a, TermPtr b) {
  if (is_empty_set(a)) return b;
  if (is_empty_set(b)) return a;
  return mk_apply("union", {std::move(a), std::move(b)});
}

// ---------------------------------------------------------------------------
// Free variables and substitution

void free_vars(const TermPtr& t, std::vector<std::string>& bound,
               std::set<std::string>& out);
void free_vars_f(const FormulaPtr& f, std::vector<std::string>& bound,
                 std::set<std::string>& out);

void free_vars(const TermPtr& t, std::vector<std::string>& bound,
               std::set<std::string>& out) {
  if (!t) return;
  if (t->kind == TermKind::Var) {
    if (std::find(bound.begin(), bound.end(), t->name) == bound.end())
      out.insert(t->name);
    return;
  }
  if (t->kind == TermKind::AllIn || t->kind == TermKind::UnionComp) {
    free_vars(t->args[0], bound, out);
    bound.push_back(t->name);
    for (size_t i = 1; i < t->args.size(); ++i) free_vars(t->args[i], bound, out);
    bound.pop_back();
    return;
  }
  for (auto& a : t->args) free_vars(a, bound, out);
  if (t->farg) free_vars_f(t->farg, bound, out);
}

void free_vars_f(const FormulaPtr& f, std::vector<std::string>& bound,
                 std::set<std::string>& out) {
  if (!f) return;
  if (f->kind == FormulaKind::Forall || f->kind == FormulaKind::Exists) {
    if (f->bound) free_vars(f->bound, bound, out);
    bound.push_back(f->var);
    free_vars_f(f->f1, bound, out);
    bound.pop_back();
    return;
  }
  free_vars(f->t1, bound, out);
  free_vars(f->t2, bound, out);
  free_vars_f(f->f1, bound, out);
  free_vars_f(f->f2, bound, out);
}

std::set<std::string> term_free_vars(const TermPtr& t) {
  std::vector<std::string> bound;
  std::set<std::string> out;
  free_vars(t, bound, out);
  return out;
}

std::string fresh_name(const std::string& base,
                       const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  for (int i = 1;; ++i) {
    std::string n = base + "_" + std::to_string(i);
    if (!avoid.count(n)) return n;
  }
}

// Names free in any replacement; binders clashing with these are renamed.
std::set<std::string> range_vars(const std::map<std::string, TermPtr>& m) {
  std::set<std::string> out;
  for (auto& kv : m)
    for (auto& v : term_free_vars(kv.second)) out.insert(v);
  return out;
}

}  // namespace

TermPtr subst_vars(const TermPtr& t, const std::map<std::string, TermPtr>& m) {
  if (!t || m.empty()) return t;
  switch (t->kind) {
    case TermKind::Var: {
      auto it = m.find(t->name);
      return it != m.end() ? it->second : t;
    }
    case TermKind::AllIn:
    case TermKind::UnionComp: {
      auto inner = m;
      inner.erase(t->name);
      std::string binder = t->name;
      std::set<std::string> avoid = range_vars(inner);
      if (avoid.count(binder)) {
        std::string nb = fresh_name(binder, avoid);
        inner[binder] = mk_var(nb, t->span);
        binder = nb;
      }
      auto nt = std::make_shared<Term>(*t);
      nt->name = binder;
      nt->args[0] = subst_vars(t->args[0], m);  // bound set: outer scope
      for (size_t i = 1; i < nt->args.size(); ++i)
        nt->args[i] = subst_vars(t->args[i], inner);
      return nt;
    }
    default: {
      bool changed = false;
      auto nt = std::make_shared<Term>(*t);
      for (auto& a : nt->args) {
        TermPtr na = subst_vars(a, m);
        if (na != a) changed = true;
        a = na;
      }
      if (t->farg) {
        FormulaPtr nf = subst_vars_formula(t->farg, m);
        if (nf != t->farg) changed = true;
        nt->farg = nf;
      }
      return changed ? TermPtr(nt) : t;
    }
  }
}

FormulaPtr subst_vars_formula(const FormulaPtr& f,
                              const std::map<std::string, TermPtr>& m) {
  if (!f || m.empty()) return f;
  if (f->kind == FormulaKind::Forall || f->kind == FormulaKind::Exists) {
    auto inner = m;
    inner.erase(f->var);
    std::string binder = f->var;
    std::set<std::string> avoid = range_vars(inner);
    if (avoid.count(binder)) {
      std::string nb = fresh_name(binder, avoid);
      inner[binder] = mk_var(nb, f->span);
      binder = nb;
    }
    auto nf = std::make_shared<Formula>(*f);
    nf->var = binder;
    if (f->bound) nf->bound = subst_vars(f->bound, m);
    nf->f1 = subst_vars_formula(f->f1, inner);
    return nf;
  }
  auto nf = std::make_shared<Formula>(*f);
  bool changed = false;
  auto upd_t = [&](TermPtr& dst, const TermPtr& src) {
    if (!src) return;
    dst = subst_vars(src, m);
    if (dst != src) changed = true;
  };
  auto upd_f = [&](FormulaPtr& dst, const FormulaPtr& src) {
    if (!src) return;
    dst = subst_vars_formula(src, m);
    if (dst != src) changed = true;
  };
  upd_t(nf->t1, f->t1);
  upd_t(nf->t2, f->t2);
  upd_f(nf->f1, f->f1);
  upd_f(nf->f2, f->f2);
  return changed ? FormulaPtr(nf) : f;
}

// ---------------------------------------------------------------------------
// Set normalization

namespace {

void collect_union(const TermPtr& t, std::vector<TermPtr>& out);

// Normalize a single union operand (not itself a union).
TermPtr norm_operand(const TermPtr& t) {
  if (t->kind == TermKind::Cond) {
    TermPtr a = normalize_set(t->args[1]);
    TermPtr b = normalize_set(t->args[2]);
    if (print_term(a) == print_term(b)) return a;
    return mk_cond(t->args[0], a, b, t->span);
  }
  if (t->kind == TermKind::UnionComp) {
    auto nt = std::make_shared<Term>(*t);
    nt->args[1] = normalize_set(t->args[1]);
    return nt;
  }
  if (t->kind == TermKind::Apply &&
      (t->name == "inter" || t->name == "\\") && !t->is_msf) {
    auto nt = std::make_shared<Term>(*t);
    nt->args[0] = normalize_set(t->args[0]);
    nt->args[1] = normalize_set(t->args[1]);
    return nt;
  }
  return t;
}

void collect_union(const TermPtr& t, std::vector<TermPtr>& out) {
  if (t->kind == TermKind::Apply && t->name == "union" && !t->is_msf &&
      t->args.size() == 2) {
    collect_union(t->args[0], out);
    collect_union(t->args[1], out);
    return;
  }
  TermPtr n = norm_operand(t);
  // a normalized conditional arm may itself be a union
  if (n->kind == TermKind::Apply && n->name == "union" && !n->is_msf) {
    collect_union(n, out);
    return;
  }
  if (!is_empty_set(n)) out.push_back(n);
}

}  // namespace

TermPtr normalize_set(const TermPtr& t) {
  std::vector<TermPtr> ops;
  collect_union(t, ops);

  // merge literal sets, dedupe elements by printed form
  std::vector<TermPtr> elems;
  std::vector<TermPtr> rest;
  std::set<std::string> seen_elem;
  for (auto& o : ops) {
    if (o->kind == TermKind::SetLit) {
      for (auto& e : o->args)
        if (seen_elem.insert(print_term(e)).second) elems.push_back(e);
    } else {
      rest.push_back(o);
    }
  }
  std::sort(elems.begin(), elems.end(), [](const TermPtr& a, const TermPtr& b) {
    return print_term(a) < print_term(b);
  });

  std::sort(rest.begin(), rest.end(), [](const TermPtr& a, const TermPtr& b) {
    return print_term(a) < print_term(b);
  });
  rest.erase(std::unique(rest.begin(), rest.end(),
                         [](const TermPtr& a, const TermPtr& b) {
                           return print_term(a) == print_term(b);
                         }),
             rest.end());

  // drop a conditional whose two arms are both covered by the other operands
  std::set<std::string> present;
  for (auto& e : elems) present.insert("elem:" + print_term(e));
  for (auto& r : rest) present.insert(print_term(r));
  auto covered = [&](const TermPtr& arm, const TermPtr& self) {
    std::vector<TermPtr> parts;
    collect_union(arm, parts);
    for (auto& p : parts) {
      if (print_term(p) == print_term(self)) return false;
      if (p->kind == TermKind::SetLit) {
        for (auto& e : p->args)
          if (!present.count("elem:" + print_term(e))) return false;
      } else if (!present.count(print_term(p))) {
        return false;
      }
    }
    return true;
  };
  std::vector<TermPtr> kept;
  for (auto& r : rest) {
    if (r->kind == TermKind::Cond && covered(r->args[1], r) &&
        covered(r->args[2], r))
      continue;
    kept.push_back(r);
  }

  TermPtr result = elems.empty() ? nullptr : mk_setlit(elems, t->span);
  for (auto& r : kept) result = result ? uni(result, r) : r;
  return result ? result : mk_empty_set();
}

// ---------------------------------------------------------------------------
// Scope of terms and formulas

namespace {

struct ScopeCalc {
  const Unit& u;
  bool* ext;

  void flag() {
    if (ext) *ext = true;
  }

  TermPtr term(const TermPtr& t) {
    switch (t->kind) {
      case TermKind::IntLit:
      case TermKind::BoolLit:
      case TermKind::NilLit:
      case TermKind::Var:
      case TermKind::VarAddr:
      case TermKind::Old:
        return mk_empty_set();
      case TermKind::Deref:
        return uni(term(t->args[0]), mk_setlit({t->args[0]}, t->span));
      case TermKind::FieldAddr:
        return term(t->args[0]);
      case TermKind::IndexAddr:
        return uni(term(t->args[0]), term(t->args[1]));
      case TermKind::Cond: {
        TermPtr sa = term(t->args[1]);
        TermPtr sb = term(t->args[2]);
        TermPtr branch;
        if (print_term(sa) == print_term(sb))
          branch = sa;
        else if (is_empty_set(sa) && is_empty_set(sb))
          branch = sa;
        else
          branch = mk_cond(t->args[0], sa, sb, t->span);
        return uni(term(t->args[0]), branch);
      }
      case TermKind::Apply: {
        TermPtr s = mk_empty_set();
        for (auto& a : t->args) s = uni(s, term(a));
        if (t->is_msf) return uni(s, t);  // a scope term reads its own value
        if (is_builtin_op(t->name)) return s;
        const FuncDef* f = u.find_func(t->name);
        if (!f)
          fail(ErrorKind::UnknownScope, "unknown function '" + t->name + "'",
               t->span);
        if (f->is_abstract) {
          std::map<std::string, TermPtr> m;
          for (size_t i = 0; i < f->params.size(); ++i)
            m[f->params[i].first] = t->args[i];
          TermPtr declared = f->scope_term ? f->scope_term : mk_empty_set();
          return uni(s, subst_vars(declared, m));
        }
        return uni(s, mk_msf(t->name, t->args, t->span));
      }
      case TermKind::SetLit:
      case TermKind::SeqLit:
      case TermKind::MapLit: {
        TermPtr s = mk_empty_set();
        for (auto& a : t->args) s = uni(s, term(a));
        return s;
      }
      case TermKind::ScopeOfPred:
        return t;  // symbolic: justified by reading its own value
      case TermKind::ScopeOfTerm: {
        bool dummy = false;
        TermPtr s = scope_of_term(u, t->args[0], ext ? ext : &dummy);
        return term(normalize_set(s));
      }
      case TermKind::ScopeOfFormula: {
        bool dummy = false;
        TermPtr s = scope_of_formula(u, t->farg, ext ? ext : &dummy);
        return term(normalize_set(s));
      }
      case TermKind::AllIn:
      case TermKind::UnionComp: {
        TermPtr sset = term(t->args[0]);
        TermPtr sbody = term(t->args[1]);
        if (t->args.size() > 2) sbody = uni(sbody, term(t->args[2]));
        if (is_empty_set(sbody)) return sset;
        return uni(sset,
                   mk_unioncomp(t->name, t->args[0], sbody, nullptr, t->span));
      }
      default:
        fail(ErrorKind::Internal, "surface sugar in scope computation",
             t->span);
    }
  }

  TermPtr formula(const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaKind::BoolTerm:
      case FormulaKind::Defined:
        return term(f->t1);
      case FormulaKind::Eq:
      case FormulaKind::StrongEq:
        return uni(term(f->t1), term(f->t2));
      case FormulaKind::And:
        return uni(formula(f->f1), formula(f->f2));
      case FormulaKind::Or:
      case FormulaKind::Implies:
        flag();
        return uni(formula(f->f1), formula(f->f2));
      case FormulaKind::Not:
        return formula(f->f1);
      case FormulaKind::Exists:
        flag();
        [[fallthrough]];
      case FormulaKind::Forall: {
        TermPtr body = formula(f->f1);
        if (!f->bound) return body;
        if (is_empty_set(body)) return term(f->bound);
        return uni(term(f->bound),
                   mk_unioncomp(f->var, f->bound, body, nullptr, f->span));
      }
      case FormulaKind::PredVar:
        return mk_scope_pred(f->var, f->span);
      case FormulaKind::Outlying:
        return uni(formula(f->f1), term(f->t1));
      case FormulaKind::FuncDefEq:
        return f->t1 ? term(f->t1) : mk_empty_set();
    }
    fail(ErrorKind::Internal, "unhandled formula kind in scope computation",
         f->span);
  }
};

}  // namespace

TermPtr scope_of_term(const Unit& u, const TermPtr& t, bool* used_extension) {
  ScopeCalc c{u, used_extension};
  return normalize_set(c.term(t));
}

TermPtr scope_of_formula(const Unit& u, const FormulaPtr& f,
                         bool* used_extension) {
  ScopeCalc c{u, used_extension};
  return normalize_set(c.formula(f));
}

FuncDef derive_msf(const Unit& u, const std::string& fn) {
  const FuncDef* f = u.find_func(fn);
  if (!f) fail(ErrorKind::UnknownScope, "unknown function '" + fn + "'");
  FuncDef d;
  d.name = fn;
  d.params = f->params;
  d.ret = Type::set_of(Type::ptrtop());
  d.span = f->span;
  auto it = u.scope_cache.find(fn);
  if (it != u.scope_cache.end()) {
    d.body = it->second;
    return d;
  }
  if (f->is_abstract) {
    d.body = normalize_set(f->scope_term ? f->scope_term : mk_empty_set());
  } else {
    d.body = scope_of_term(u, f->body);
  }
  u.scope_cache[fn] = d.body;
  return d;
}

namespace {

void msf_refs(const TermPtr& t, std::set<std::string>& out) {
  if (!t) return;
  if (t->kind == TermKind::Apply && t->is_msf) out.insert(t->name);
  for (auto& a : t->args) msf_refs(a, out);
}

}  // namespace

bool msf_is_recursive(const Unit& u, const std::string& fn) {
  std::set<std::string> visited;
  std::vector<std::string> work{fn};
  while (!work.empty()) {
    std::string cur = work.back();
    work.pop_back();
    if (!visited.insert(cur).second) continue;
    std::set<std::string> refs;
    msf_refs(derive_msf(u, cur).body, refs);
    for (auto& r : refs) {
      if (r == fn) return true;
      work.push_back(r);
    }
  }
  return false;
}

}  // namespace sl
