#include "sl/logic.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "sl/scope.hpp"

namespace sl {

// ---------------------------------------------------------------------------
// old(...) utilities

TermPtr erase_old(const TermPtr& t) {
  if (!t) return t;
  if (t->kind == TermKind::Old) return erase_old(t->args[0]);
  auto nt = std::make_shared<Term>(*t);
  bool changed = false;
  for (auto& a : nt->args) {
    TermPtr na = erase_old(a);
    if (na != a) changed = true;
    a = na;
  }
  if (t->farg) {
    FormulaPtr nf = erase_old(t->farg);
    if (nf != t->farg) changed = true;
    nt->farg = nf;
  }
  return changed ? TermPtr(nt) : t;
}

FormulaPtr erase_old(const FormulaPtr& f) {
  if (!f) return f;
  auto nf = std::make_shared<Formula>(*f);
  nf->t1 = erase_old(f->t1);
  nf->t2 = erase_old(f->t2);
  nf->f1 = erase_old(f->f1);
  nf->f2 = erase_old(f->f2);
  nf->bound = erase_old(f->bound);
  return nf;
}

bool mentions_old(const TermPtr& t) {
  if (!t) return false;
  if (t->kind == TermKind::Old) return true;
  for (auto& a : t->args)
    if (mentions_old(a)) return true;
  if (t->farg) return mentions_old(t->farg);
  return false;
}

bool mentions_old(const FormulaPtr& f) {
  if (!f) return false;
  return mentions_old(f->t1) || mentions_old(f->t2) || mentions_old(f->f1) ||
         mentions_old(f->f2) || mentions_old(f->bound);
}

// ---------------------------------------------------------------------------
// Predicate variable substitution

namespace {

TermPtr subst_predvar_t(const TermPtr& t, const std::string& name,
                        const FormulaPtr& repl, const TermPtr& repl_scope) {
  if (!t) return t;
  if (t->kind == TermKind::ScopeOfPred && t->name == name) return repl_scope;
  auto nt = std::make_shared<Term>(*t);
  for (auto& a : nt->args) a = subst_predvar_t(a, name, repl, repl_scope);
  if (t->farg) nt->farg = subst_predvar(t->farg, name, repl, repl_scope);
  return nt;
}

}  // namespace

FormulaPtr subst_predvar(const FormulaPtr& f, const std::string& name,
                         const FormulaPtr& repl, const TermPtr& repl_scope) {
  if (!f) return f;
  if (f->kind == FormulaKind::PredVar && f->var == name) return repl;
  auto nf = std::make_shared<Formula>(*f);
  nf->t1 = subst_predvar_t(f->t1, name, repl, repl_scope);
  nf->t2 = subst_predvar_t(f->t2, name, repl, repl_scope);
  nf->f1 = subst_predvar(f->f1, name, repl, repl_scope);
  nf->f2 = subst_predvar(f->f2, name, repl, repl_scope);
  nf->bound = subst_predvar_t(f->bound, name, repl, repl_scope);
  return nf;
}

namespace {

bool mentions_predvar_t(const TermPtr& t, const std::string* name) {
  if (!t) return false;
  if (t->kind == TermKind::ScopeOfPred && (!name || t->name == *name))
    return true;
  for (auto& a : t->args)
    if (mentions_predvar_t(a, name)) return true;
  if (t->farg) {
    if (name ? mentions_predvar(t->farg, *name)
             : mentions_any_predvar(t->farg))
      return true;
  }
  return false;
}

bool mentions_predvar_impl(const FormulaPtr& f, const std::string* name) {
  if (!f) return false;
  if (f->kind == FormulaKind::PredVar && (!name || f->var == *name))
    return true;
  return mentions_predvar_t(f->t1, name) || mentions_predvar_t(f->t2, name) ||
         mentions_predvar_t(f->bound, name) ||
         mentions_predvar_impl(f->f1, name) ||
         mentions_predvar_impl(f->f2, name);
}

}  // namespace

bool mentions_predvar(const FormulaPtr& f, const std::string& name) {
  return mentions_predvar_impl(f, &name);
}
bool mentions_any_predvar(const FormulaPtr& f) {
  return mentions_predvar_impl(f, nullptr);
}

std::string EntailResult::note() const {
  std::string s;
  for (auto& l : lemmas_used) {
    if (!s.empty()) s += ", ";
    s += l;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Engine

namespace {

constexpr int kMaxDepth = 9;
constexpr int kMaxSteps = 200000;

struct LemmaRule {
  std::string name;
  std::set<std::string> pvars;
  std::vector<FormulaPtr> premises;
  std::vector<FormulaPtr> conclusions;
};

struct Ctx {
  const Unit& u;
  std::vector<LemmaRule> lemmas;
  const std::vector<std::string>* only = nullptr;
  int steps = 0;
  std::map<std::string, bool> fn_rec;       // plain call-graph recursion
  std::map<std::string, bool> msf_rec;
  std::map<std::string, TermPtr> msf_body;  // derived scope function bodies

  bool budget() { return ++steps < kMaxSteps; }

  bool lemma_allowed(const std::string& n) const {
    if (!only || only->empty()) return true;
    return std::find(only->begin(), only->end(), n) != only->end();
  }
};

// ---- plain function recursion ----

void fn_calls(const TermPtr& t, std::set<std::string>& out) {
  if (!t) return;
  if (t->kind == TermKind::Apply && !t->is_msf) out.insert(t->name);
  for (auto& a : t->args) fn_calls(a, out);
}

bool fn_is_recursive(Ctx& c, const std::string& fn) {
  auto it = c.fn_rec.find(fn);
  if (it != c.fn_rec.end()) return it->second;
  c.fn_rec[fn] = true;  // pessimistic while computing (also breaks cycles)
  bool rec = false;
  std::set<std::string> visited;
  std::vector<std::string> work{fn};
  while (!work.empty() && !rec) {
    std::string cur = work.back();
    work.pop_back();
    if (!visited.insert(cur).second) continue;
    const FuncDef* f = c.u.find_func(cur);
    if (!f || !f->body) continue;
    std::set<std::string> calls;
    fn_calls(f->body, calls);
    for (auto& n : calls) {
      if (n == fn) {
        rec = true;
        break;
      }
      if (c.u.find_func(n)) work.push_back(n);
    }
  }
  c.fn_rec[fn] = rec;
  return rec;
}

bool msf_recursive(Ctx& c, const std::string& fn) {
  auto it = c.msf_rec.find(fn);
  if (it != c.msf_rec.end()) return it->second;
  c.msf_rec[fn] = true;
  bool rec = c.u.find_func(fn) ? msf_is_recursive(c.u, fn) : true;
  c.msf_rec[fn] = rec;
  return rec;
}

const TermPtr& msf_body(Ctx& c, const std::string& fn) {
  auto it = c.msf_body.find(fn);
  if (it == c.msf_body.end())
    it = c.msf_body.emplace(fn, derive_msf(c.u, fn).body).first;
  return it->second;
}

// ---- term normalization ----

TermPtr norm_term(Ctx& c, const TermPtr& t, int fuel);

// Push old(...) through state-independent constructors; nested olds were
// already erased. State readers (derefs, function applications, scope
// terms) stay wrapped.
TermPtr dist_old(const TermPtr& t, Span sp) {
  switch (t->kind) {
    case TermKind::IntLit:
    case TermKind::BoolLit:
    case TermKind::NilLit:
    case TermKind::Var:
    case TermKind::VarAddr:
      return t;
    case TermKind::FieldAddr:
    case TermKind::IndexAddr:
    case TermKind::SetLit:
    case TermKind::SeqLit:
    case TermKind::MapLit:
    case TermKind::Cond: {
      auto nt = std::make_shared<Term>(*t);
      for (auto& a : nt->args) a = dist_old(a, sp);
      return nt;
    }
    case TermKind::Apply:
      if (!t->is_msf) {
        // builtin operators are state-independent
        static const std::set<std::string> ops = {
            "+",    "-",     "*",       "/",  "<",   "<=",   ">",
            ">=",   "=",     "!=",      "&&", "||",  "!",    "neg",
            "union", "inter", "\\",     "in", "subset", "psubset",
            "++",   "rng",   "head",    "tail", "cons", "MAX", "MIN"};
        if (ops.count(t->name)) {
          auto nt = std::make_shared<Term>(*t);
          for (auto& a : nt->args) a = dist_old(a, sp);
          return nt;
        }
      }
      return mk_old(t, sp);
    default:
      return mk_old(t, sp);
  }
}

bool is_set_op(const TermPtr& t) {
  return t->kind == TermKind::Apply && !t->is_msf && t->args.size() == 2 &&
         t->name == "union";
}

TermPtr norm_term(Ctx& c, const TermPtr& t, int fuel) {
  if (!t || !c.budget()) return t;
  if (t->kind == TermKind::Old) {
    TermPtr inner = erase_old(t->args[0]);
    TermPtr d = dist_old(inner, t->span);
    if (d->kind == TermKind::Old) {
      // normalize the wrapped reader's arguments (still old-free inside)
      auto nt = std::make_shared<Term>(*d->args[0]);
      for (auto& a : nt->args) a = norm_term(c, a, fuel);
      return mk_old(nt, t->span);
    }
    return norm_term(c, d, fuel);
  }
  auto nt = std::make_shared<Term>(*t);
  for (auto& a : nt->args) a = norm_term(c, a, fuel);
  TermPtr r = nt;

  if (r->kind == TermKind::Cond) {
    if (r->args[0]->kind == TermKind::BoolLit)
      return r->args[0]->bval ? r->args[1] : r->args[2];
    if (print_term(r->args[1]) == print_term(r->args[2])) return r->args[1];
    return r;
  }
  if (r->kind == TermKind::Apply && !r->is_msf) {
    const std::string& op = r->name;
    // orientation: express all comparisons with < and <=
    if ((op == ">" || op == ">=") && r->args.size() == 2)
      return mk_apply(op == ">" ? "<" : "<=", {r->args[1], r->args[0]},
                      r->span);
    if (r->args.size() == 2 && r->args[0]->kind == TermKind::IntLit &&
        r->args[1]->kind == TermKind::IntLit) {
      long long a = r->args[0]->ival, b = r->args[1]->ival;
      if (op == "+") return mk_int(a + b, r->span);
      if (op == "-") return mk_int(a - b, r->span);
      if (op == "*") return mk_int(a * b, r->span);
      if (op == "/" && b != 0) return mk_int(a / b, r->span);
    }
    if (op == "union") return normalize_set(r);
    const FuncDef* f = c.u.find_func(op);
    if (f && f->body && fuel > 0 && !fn_is_recursive(c, op)) {
      std::map<std::string, TermPtr> m;
      for (size_t i = 0; i < f->params.size(); ++i)
        m[f->params[i].first] = r->args[i];
      return norm_term(c, subst_vars(f->body, m), fuel - 1);
    }
    return r;
  }
  if (r->kind == TermKind::Apply && r->is_msf) {
    // a declared scope bound takes priority over unfolding the derived scope
    bool bounded = false;
    for (auto& sb : c.u.scope_bounds)
      if (sb.fn == r->name) {
        bounded = true;
        break;
      }
    if (!bounded && fuel > 0 && c.u.find_func(r->name) &&
        !msf_recursive(c, r->name)) {
      const FuncDef* f = c.u.find_func(r->name);
      std::map<std::string, TermPtr> m;
      for (size_t i = 0; i < f->params.size(); ++i)
        m[f->params[i].first] = r->args[i];
      return norm_term(c, subst_vars(msf_body(c, r->name), m), fuel - 1);
    }
    return r;
  }
  if (r->kind == TermKind::SetLit && !r->args.empty()) return normalize_set(r);
  return r;
}

FormulaPtr norm_formula(Ctx& c, const FormulaPtr& f);

FormulaPtr term_to_formula(Ctx& c, const TermPtr& t) {
  if (t->kind == TermKind::Apply && !t->is_msf) {
    if (t->name == "&&")
      return mk_and(term_to_formula(c, t->args[0]),
                    term_to_formula(c, t->args[1]), t->span);
    if (t->name == "||")
      return mk_or(term_to_formula(c, t->args[0]),
                   term_to_formula(c, t->args[1]), t->span);
    if (t->name == "!")
      return mk_not(term_to_formula(c, t->args[0]), t->span);
    if (t->name == "=") return mk_eq(t->args[0], t->args[1], t->span);
    if (t->name == "!=")
      return mk_not(mk_eq(t->args[0], t->args[1], t->span), t->span);
  }
  if (t->kind == TermKind::AllIn)
    return mk_forall(t->name, nullptr, t->args[0],
                     term_to_formula(c, t->args[1]), t->span);
  if (t->kind == TermKind::BoolLit && t->bval) {
    // keep `true` recognizable
  }
  return mk_boolterm(t, t->span);
}

FormulaPtr norm_formula(Ctx& c, const FormulaPtr& f) {
  if (!f) return f;
  switch (f->kind) {
    case FormulaKind::BoolTerm: {
      TermPtr t = norm_term(c, f->t1, 16);
      FormulaPtr g = term_to_formula(c, t);
      if (g->kind != FormulaKind::BoolTerm) return norm_formula(c, g);
      return g;
    }
    case FormulaKind::Eq: {
      TermPtr a = norm_term(c, f->t1, 16), b = norm_term(c, f->t2, 16);
      if (b->kind == TermKind::BoolLit && b->bval)
        return norm_formula(c, mk_boolterm(a, f->span));
      if (a->kind == TermKind::BoolLit && a->bval)
        return norm_formula(c, mk_boolterm(b, f->span));
      return mk_eq(a, b, f->span);
    }
    case FormulaKind::StrongEq:
      return mk_strongeq(norm_term(c, f->t1, 16), norm_term(c, f->t2, 16),
                         f->span);
    case FormulaKind::Defined:
      return mk_defined(norm_term(c, f->t1, 16), f->span);
    case FormulaKind::And:
      return mk_and(norm_formula(c, f->f1), norm_formula(c, f->f2), f->span);
    case FormulaKind::Or: {
      FormulaPtr a = norm_formula(c, f->f1), b = norm_formula(c, f->f2);
      // (e || !e) says exactly that e has a truth value
      auto def_of = [&](const FormulaPtr& pos,
                        const FormulaPtr& neg) -> FormulaPtr {
        if (neg->kind == FormulaKind::Not &&
            print_formula(neg->f1) == print_formula(pos)) {
          if (pos->kind == FormulaKind::BoolTerm)
            return mk_defined(pos->t1, f->span);
          if (pos->kind == FormulaKind::Eq)
            return mk_defined(mk_apply("=", {pos->t1, pos->t2}, f->span),
                              f->span);
        }
        return nullptr;
      };
      if (FormulaPtr d = def_of(a, b)) return d;
      if (FormulaPtr d = def_of(b, a)) return d;
      return mk_or(a, b, f->span);
    }
    case FormulaKind::Not: {
      FormulaPtr a = norm_formula(c, f->f1);
      if (a->kind == FormulaKind::Not) return a->f1;
      if (a->kind == FormulaKind::And)
        return norm_formula(
            c, mk_or(mk_not(a->f1, f->span), mk_not(a->f2, f->span), f->span));
      if (a->kind == FormulaKind::Or)
        return norm_formula(c, mk_and(mk_not(a->f1, f->span),
                                      mk_not(a->f2, f->span), f->span));
      return mk_not(a, f->span);
    }
    case FormulaKind::Implies:
      return mk_implies(norm_formula(c, f->f1), norm_formula(c, f->f2),
                        f->span);
    case FormulaKind::Forall:
      return mk_forall(f->var, f->var_type,
                       f->bound ? norm_term(c, f->bound, 16) : nullptr,
                       norm_formula(c, f->f1), f->span);
    case FormulaKind::Exists:
      return mk_exists(f->var, f->var_type,
                       f->bound ? norm_term(c, f->bound, 16) : nullptr,
                       norm_formula(c, f->f1), f->span);
    case FormulaKind::PredVar:
      return f;
    case FormulaKind::Outlying:
      return mk_outlying(norm_formula(c, f->f1), norm_term(c, f->t1, 16),
                         f->span);
    case FormulaKind::FuncDefEq:
      return f;
  }
  return f;
}

// ---- linear integer arithmetic ----

struct Poly {
  std::map<std::string, long long> coef;
  long long c = 0;

  void add(const Poly& o, long long k = 1) {
    for (auto& kv : o.coef) {
      coef[kv.first] += kv.second * k;
      if (coef[kv.first] == 0) coef.erase(kv.first);
    }
    c += o.c * k;
  }
  bool constant() const { return coef.empty(); }
  std::string key() const {
    std::string s;
    for (auto& kv : coef) s += kv.first + "*" + std::to_string(kv.second) + ";";
    s += std::to_string(c);
    return s;
  }
};

bool to_poly(const TermPtr& t, Poly& out, long long k = 1) {
  switch (t->kind) {
    case TermKind::IntLit:
      out.c += t->ival * k;
      return true;
    case TermKind::Apply:
      if (!t->is_msf && t->args.size() == 2) {
        if (t->name == "+")
          return to_poly(t->args[0], out, k) && to_poly(t->args[1], out, k);
        if (t->name == "-")
          return to_poly(t->args[0], out, k) && to_poly(t->args[1], out, -k);
        if (t->name == "*") {
          if (t->args[0]->kind == TermKind::IntLit)
            return to_poly(t->args[1], out, k * t->args[0]->ival);
          if (t->args[1]->kind == TermKind::IntLit)
            return to_poly(t->args[0], out, k * t->args[1]->ival);
        }
      }
      if (!t->is_msf && t->args.size() == 1 && t->name == "neg")
        return to_poly(t->args[0], out, -k);
      break;
    default:
      break;
  }
  out.coef[print_term(t)] += k;
  if (out.coef[print_term(t)] == 0) out.coef.erase(print_term(t));
  return true;
}

// ---- the engine proper ----

struct Engine {
  Ctx& c;
  std::vector<FormulaPtr> raw_hyps;
  std::vector<FormulaPtr> atoms;
  std::set<std::string> atom_set;
  std::vector<std::pair<TermPtr, TermPtr>> eqs;
  std::vector<std::pair<TermPtr, TermPtr>> diseqs;
  std::vector<Poly> les;  // facts p <= 0
  std::set<std::string> le_keys;
  std::vector<FormulaPtr> foralls;                        // bounded
  std::vector<std::pair<FormulaPtr, FormulaPtr>> disjs;   // a or b
  std::set<std::string> defined;                          // printed forms
  std::map<std::string, TermPtr> rep;                     // print -> class rep
  std::set<std::string> used;                             // lemma names
  std::set<std::string> in_progress;
  int fresh_counter = 0;
  bool light = false;  // sub-engine: skip forward saturation

  explicit Engine(Ctx& ctx) : c(ctx) {}

  TermPtr N(const TermPtr& t) { return norm_term(c, t, 16); }

  std::string fresh(const std::string& base) {
    return "@" + base + std::to_string(++fresh_counter);
  }

  // ---- hypothesis intake ----

  void seed_defined(const TermPtr& t) {
    if (!t) return;
    defined.insert(print_term(t));
    bool strict = false;
    switch (t->kind) {
      case TermKind::Deref:
      case TermKind::FieldAddr:
      case TermKind::IndexAddr:
      case TermKind::SetLit:
      case TermKind::SeqLit:
      case TermKind::MapLit:
      case TermKind::Old:
        strict = true;
        break;
      case TermKind::Apply: {
        static const std::set<std::string> strict_ops = {
            "+",    "-",    "*",    "/",      "<",       "<=", ">",
            ">=",   "=",    "!=",   "neg",    "union",   "inter", "\\",
            "in",   "subset", "psubset", "++", "rng",    "head", "tail",
            "cons", "MAX",  "MIN",  "Block",  "InHeap",  "!"};
        strict = !t->is_msf && strict_ops.count(t->name) > 0;
        break;
      }
      default:
        return;  // literals/vars: nothing below
    }
    if (strict)
      for (auto& a : t->args) seed_defined(a);
  }

  void index_atom(const FormulaPtr& f) {
    std::string key = print_formula(f);
    if (!atom_set.insert(key).second) return;
    atoms.push_back(f);
  }

  void add_le_fact(Poly p) {
    if (le_keys.insert(p.key()).second) les.push_back(std::move(p));
  }

  void add_cmp(const TermPtr& a, const TermPtr& b, long long slack) {
    // a - b + slack <= 0
    Poly p;
    to_poly(a, p, 1);
    to_poly(b, p, -1);
    p.c += slack;
    add_le_fact(std::move(p));
  }

  void add_hyp(const FormulaPtr& raw) {
    FormulaPtr f = norm_formula(c, raw);
    add_hyp_norm(f);
  }

  void add_hyp_norm(const FormulaPtr& f) {
    if (!f) return;
    switch (f->kind) {
      case FormulaKind::And:
        add_hyp_norm(f->f1);
        add_hyp_norm(f->f2);
        return;
      case FormulaKind::Outlying: {
        add_hyp_norm(f->f1);
        TermPtr sc = scope_of_formula(c.u, f->f1);
        index_atom(mk_eq(mk_apply("inter", {sc, f->t1}, f->span),
                         mk_empty_set(), f->span));
        index_atom(f);
        return;
      }
      case FormulaKind::Eq: {
        seed_defined(f->t1);
        seed_defined(f->t2);
        eqs.emplace_back(f->t1, f->t2);
        Poly p;
        to_poly(f->t1, p, 1);
        to_poly(f->t2, p, -1);
        add_le_fact(p);
        Poly q;
        to_poly(f->t2, q, 1);
        to_poly(f->t1, q, -1);
        add_le_fact(q);
        index_atom(f);
        return;
      }
      case FormulaKind::StrongEq:
        eqs.emplace_back(f->t1, f->t2);
        index_atom(f);
        return;
      case FormulaKind::Defined:
        seed_defined(f->t1);
        index_atom(f);
        return;
      case FormulaKind::Not:
        if (f->f1->kind == FormulaKind::Eq) {
          seed_defined(f->f1->t1);
          seed_defined(f->f1->t2);
          diseqs.emplace_back(f->f1->t1, f->f1->t2);
        }
        if (f->f1->kind == FormulaKind::BoolTerm) {
          const TermPtr& t = f->f1->t1;
          seed_defined(t);
          if (t->kind == TermKind::Apply && !t->is_msf && t->args.size() == 2) {
            if (t->name == "<") add_cmp(t->args[1], t->args[0], 0);   // b<=a
            if (t->name == "<=") add_cmp(t->args[1], t->args[0], 1);  // b<a
          }
        }
        index_atom(f);
        return;
      case FormulaKind::BoolTerm: {
        const TermPtr& t = f->t1;
        seed_defined(t);
        if (t->kind == TermKind::Apply && !t->is_msf && t->args.size() == 2) {
          if (t->name == "<") add_cmp(t->args[0], t->args[1], 1);
          if (t->name == "<=") add_cmp(t->args[0], t->args[1], 0);
        }
        index_atom(f);
        return;
      }
      case FormulaKind::Or:
        disjs.emplace_back(f->f1, f->f2);
        index_atom(f);
        return;
      case FormulaKind::Implies:
        disjs.emplace_back(norm_formula(c, mk_not(f->f1, f->span)), f->f2);
        index_atom(f);
        return;
      case FormulaKind::Forall:
        if (f->bound) foralls.push_back(f);
        index_atom(f);
        return;
      default:
        index_atom(f);
        return;
    }
  }

  // ---- congruence classes ----

  void build_classes() {
    std::map<std::string, std::string> parent;
    std::map<std::string, TermPtr> term_of;
    std::function<std::string(const std::string&)> find =
        [&](const std::string& x) -> std::string {
      auto it = parent.find(x);
      if (it == parent.end() || it->second == x) return x;
      std::string r = find(it->second);
      parent[x] = r;
      return r;
    };
    auto unite = [&](const std::string& a, const std::string& b) {
      std::string ra = find(a), rb = find(b);
      if (ra != rb) parent[ra] = rb;
    };
    for (auto& e : eqs) {
      std::string pa = print_term(e.first), pb = print_term(e.second);
      parent.emplace(pa, pa);
      parent.emplace(pb, pb);
      term_of.emplace(pa, e.first);
      term_of.emplace(pb, e.second);
      unite(pa, pb);
    }
    // class representative: shortest printed member (ties: lexicographic)
    std::map<std::string, std::string> best;
    for (auto& kv : parent) {
      std::string r = find(kv.first);
      auto it = best.find(r);
      if (it == best.end() ||
          kv.first.size() < it->second.size() ||
          (kv.first.size() == it->second.size() && kv.first < it->second))
        best[r] = kv.first;
    }
    rep.clear();
    for (auto& kv : parent) {
      std::string b = best[find(kv.first)];
      if (b != kv.first) rep[kv.first] = term_of[b];
    }
  }

  TermPtr canon(const TermPtr& t, int hops = 4) {
    if (!t || !c.budget()) return t;
    auto nt = std::make_shared<Term>(*t);
    for (auto& a : nt->args) a = canon(a, hops);
    TermPtr r = nt;
    if (is_set_op(r) || (r->kind == TermKind::SetLit && !r->args.empty()))
      r = normalize_set(r);
    auto it = rep.find(print_term(r));
    if (it != rep.end() && hops > 0) return canon(it->second, hops - 1);
    return r;
  }

  std::string ckey(const TermPtr& t) { return print_term(canon(N(t))); }

  // ---- term equality ----

  // Flatten a map override chain m1 ++ m2 ++ ... into base parts and maplets.
  void flatten_map(const TermPtr& t, std::vector<std::string>& bases,
                   std::vector<std::pair<std::string, std::string>>& maplets) {
    if (t->kind == TermKind::Apply && !t->is_msf && t->name == "++") {
      flatten_map(t->args[0], bases, maplets);
      flatten_map(t->args[1], bases, maplets);
      return;
    }
    if (t->kind == TermKind::MapLit) {
      for (size_t i = 0; i + 1 < t->args.size(); i += 2)
        maplets.emplace_back(ckey(t->args[i]), ckey(t->args[i + 1]));
      return;
    }
    bases.push_back(ckey(t));
  }

  bool map_chain_equal(const TermPtr& a, const TermPtr& b) {
    std::vector<std::string> ba, bb;
    std::vector<std::pair<std::string, std::string>> ma, mb;
    flatten_map(a, ba, ma);
    flatten_map(b, bb, mb);
    if (ba != bb) return false;
    auto absorb = [](std::vector<std::pair<std::string, std::string>>& v) {
      std::map<std::string, std::string> out;
      for (auto& kv : v) out[kv.first] = kv.second;  // later overrides
      return out;
    };
    return absorb(ma) == absorb(mb);
  }

  bool teq(const TermPtr& a, const TermPtr& b) {
    if (!c.budget()) return false;
    TermPtr ca = canon(N(a)), cb = canon(N(b));
    if (print_term(ca) == print_term(cb)) return true;
    if ((ca->kind == TermKind::Apply && !ca->is_msf && ca->name == "++") ||
        (cb->kind == TermKind::Apply && !cb->is_msf && cb->name == "++"))
      if (map_chain_equal(ca, cb)) return true;
    // congruent applications whose arguments are pairwise equal
    if (ca->kind == cb->kind && ca->name == cb->name &&
        ca->args.size() == cb->args.size() && !ca->args.empty()) {
      for (size_t i = 0; i < ca->args.size(); ++i)
        if (!teq(ca->args[i], cb->args[i])) return false;
      return true;
    }
    return false;
  }

  bool formula_teq(const FormulaPtr& a, const FormulaPtr& b) {
    if (!a || !b) return a == b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
      case FormulaKind::Eq:
      case FormulaKind::StrongEq:
        return (teq(a->t1, b->t1) && teq(a->t2, b->t2)) ||
               (teq(a->t1, b->t2) && teq(a->t2, b->t1));
      case FormulaKind::BoolTerm:
      case FormulaKind::Defined:
        return teq(a->t1, b->t1);
      case FormulaKind::Not:
        return formula_teq(a->f1, b->f1);
      case FormulaKind::And:
      case FormulaKind::Or:
      case FormulaKind::Implies:
        return formula_teq(a->f1, b->f1) && formula_teq(a->f2, b->f2);
      case FormulaKind::PredVar:
        return a->var == b->var;
      case FormulaKind::Outlying:
        return formula_teq(a->f1, b->f1) && teq(a->t1, b->t1);
      case FormulaKind::Forall:
      case FormulaKind::Exists: {
        if ((a->bound == nullptr) != (b->bound == nullptr)) return false;
        if (a->bound && !teq(a->bound, b->bound)) return false;
        if (a->var == b->var) return formula_teq(a->f1, b->f1);
        std::map<std::string, TermPtr> m{{b->var, mk_var(a->var)}};
        return formula_teq(a->f1, subst_vars_formula(b->f1, m));
      }
      default:
        return print_formula(a) == print_formula(b);
    }
  }

  bool atom_present(const FormulaPtr& g) {
    std::string key = print_formula(g);
    if (atom_set.count(key)) return true;
    for (auto& a : atoms) {
      if (!c.budget()) return false;
      if (a->kind == g->kind && formula_teq(a, g)) return true;
    }
    return false;
  }

  // ---- closure ----

  void close() {
    build_classes();
    saturate_arith();
    for (int round = 0; round < 2; ++round) {
      size_t before = atoms.size();
      instantiate_foralls();
      if (!light) forward_lemmas();
      if (atoms.size() == before) break;
      build_classes();
      saturate_arith();
    }
  }

  void saturate_arith() {
    for (int round = 0; round < 2; ++round) {
      size_t n = les.size();
      if (n > 48) break;
      for (size_t i = 0; i < n; ++i)
        for (size_t j = i; j < n; ++j) {
          Poly p = les[i];
          p.add(les[j]);
          if (p.coef.size() <= 4) add_le_fact(std::move(p));
          if (les.size() > 96) return;
        }
      if (les.size() == n) break;
    }
  }

  void instantiate_foralls() {
    std::vector<FormulaPtr> fresh_hyps;
    for (auto& fa : foralls) {
      for (auto& a : atoms) {
        if (!c.budget()) return;
        // a: e in S  (as a BoolTerm over "in")
        const TermPtr* e = nullptr;
        const TermPtr* s = nullptr;
        if (a->kind == FormulaKind::BoolTerm &&
            a->t1->kind == TermKind::Apply && a->t1->name == "in" &&
            !a->t1->is_msf) {
          e = &a->t1->args[0];
          s = &a->t1->args[1];
        }
        if (!e || !teq(*s, fa->bound)) continue;
        std::map<std::string, TermPtr> m{{fa->var, *e}};
        fresh_hyps.push_back(subst_vars_formula(fa->f1, m));
      }
    }
    for (auto& h : fresh_hyps) add_hyp(h);
  }

  // ---- lemma matching ----

  bool has_unbound_pvar(const TermPtr& t, const std::set<std::string>& pvars,
                        const std::map<std::string, TermPtr>& b) {
    if (!t) return false;
    if (t->kind == TermKind::Var && pvars.count(t->name) && !b.count(t->name))
      return true;
    for (auto& a : t->args)
      if (has_unbound_pvar(a, pvars, b)) return true;
    return false;
  }

  bool has_unbound_pvar_f(const FormulaPtr& f,
                          const std::set<std::string>& pvars,
                          const std::map<std::string, TermPtr>& b) {
    if (!f) return false;
    return has_unbound_pvar(f->t1, pvars, b) ||
           has_unbound_pvar(f->t2, pvars, b) ||
           has_unbound_pvar(f->bound, pvars, b) ||
           has_unbound_pvar_f(f->f1, pvars, b) ||
           has_unbound_pvar_f(f->f2, pvars, b);
  }

  bool match_term(const TermPtr& p, const TermPtr& t,
                  const std::set<std::string>& pvars,
                  std::map<std::string, TermPtr>& b) {
    if (!c.budget()) return false;
    if (p->kind == TermKind::Var && pvars.count(p->name)) {
      auto it = b.find(p->name);
      if (it != b.end()) return teq(it->second, t);
      b[p->name] = t;
      return true;
    }
    if (!has_unbound_pvar(p, pvars, b)) return teq(subst_vars(p, b), t);
    TermPtr nt = N(t);
    // the class representative may have lost the structure the pattern
    // needs (e.g. an application equated to a variable), so try both forms
    for (const TermPtr& ct : {canon(nt), nt}) {
      if (p->kind != ct->kind) continue;
      if (p->name != ct->name || p->args.size() != ct->args.size()) continue;
      if (p->kind == TermKind::IntLit && p->ival != ct->ival) continue;
      if (p->kind == TermKind::BoolLit && p->bval != ct->bval) continue;
      auto b2 = b;
      bool ok = true;
      for (size_t i = 0; i < p->args.size() && ok; ++i)
        ok = match_term(p->args[i], ct->args[i], pvars, b2);
      if (ok) {
        b = b2;
        return true;
      }
    }
    return false;
  }

  bool match_formula(const FormulaPtr& p, const FormulaPtr& g,
                     const std::set<std::string>& pvars,
                     std::map<std::string, TermPtr>& b) {
    if (!p || !g || p->kind != g->kind) return false;
    switch (p->kind) {
      case FormulaKind::BoolTerm:
      case FormulaKind::Defined:
        return match_term(p->t1, g->t1, pvars, b);
      case FormulaKind::Eq:
      case FormulaKind::StrongEq: {
        auto b0 = b;
        if (match_term(p->t1, g->t1, pvars, b) &&
            match_term(p->t2, g->t2, pvars, b))
          return true;
        b = b0;
        return match_term(p->t1, g->t2, pvars, b) &&
               match_term(p->t2, g->t1, pvars, b);
      }
      case FormulaKind::Not:
        return match_formula(p->f1, g->f1, pvars, b);
      case FormulaKind::And:
      case FormulaKind::Or:
      case FormulaKind::Implies:
        return match_formula(p->f1, g->f1, pvars, b) &&
               match_formula(p->f2, g->f2, pvars, b);
      default:
        return formula_teq(p, g);
    }
  }

  bool solve_premises(const LemmaRule& lr, size_t i,
                      std::map<std::string, TermPtr>& b, int depth) {
    if (i == lr.premises.size()) return true;
    const FormulaPtr& p = lr.premises[i];
    if (!has_unbound_pvar_f(p, lr.pvars, b)) {
      FormulaPtr inst = norm_formula(c, subst_vars_formula(p, b));
      return prove(inst, depth + 1) && solve_premises(lr, i + 1, b, depth);
    }
    for (auto& a : atoms) {
      if (!c.budget()) return false;
      auto b2 = b;
      if (match_formula(p, a, lr.pvars, b2) &&
          solve_premises(lr, i + 1, b2, depth)) {
        b = b2;
        return true;
      }
    }
    return false;
  }

  void forward_lemmas() {
    std::vector<FormulaPtr> derived;
    for (auto& lr : c.lemmas) {
      if (!c.lemma_allowed(lr.name) || lr.premises.empty()) continue;
      // match every premise against existing atoms only (no recursion)
      std::function<void(size_t, std::map<std::string, TermPtr>&)> go =
          [&](size_t i, std::map<std::string, TermPtr>& b) {
            if (derived.size() > 64 || !c.budget()) return;
            if (i == lr.premises.size()) {
              bool all_bound = true;
              for (auto& q : lr.conclusions)
                if (has_unbound_pvar_f(q, lr.pvars, b)) all_bound = false;
              if (!all_bound) return;
              for (auto& q : lr.conclusions) {
                FormulaPtr inst = subst_vars_formula(q, b);
                if (!atom_set.count(print_formula(norm_formula(c, inst)))) {
                  derived.push_back(inst);
                  used.insert(lr.name);
                }
              }
              return;
            }
            for (auto& a : atoms) {
              auto b2 = b;
              if (match_formula(lr.premises[i], a, lr.pvars, b2)) go(i + 1, b2);
            }
          };
      std::map<std::string, TermPtr> b;
      go(0, b);
    }
    for (auto& d : derived) add_hyp(d);
  }

  bool try_lemmas(const FormulaPtr& g, int depth) {
    if (depth >= kMaxDepth - 1) return false;
    std::string key = print_formula(g);
    if (in_progress.count(key)) return false;
    in_progress.insert(key);
    // equalities are symmetric: matching commits to the first orientation,
    // so offer the flipped goal as a second candidate
    std::vector<FormulaPtr> goals{g};
    if (g->kind == FormulaKind::Eq || g->kind == FormulaKind::StrongEq) {
      auto sw = std::make_shared<Formula>(*g);
      std::swap(sw->t1, sw->t2);
      goals.push_back(sw);
    } else if (g->kind == FormulaKind::Not && g->f1 &&
               (g->f1->kind == FormulaKind::Eq ||
                g->f1->kind == FormulaKind::StrongEq)) {
      auto sw = std::make_shared<Formula>(*g->f1);
      std::swap(sw->t1, sw->t2);
      goals.push_back(mk_not(sw, g->span));
    }
    bool ok = false;
    for (auto& lr : c.lemmas) {
      if (ok) break;
      if (!c.lemma_allowed(lr.name)) continue;
      for (auto& concl : lr.conclusions) {
        for (auto& gg : goals) {
          std::map<std::string, TermPtr> b;
          if (!match_formula(concl, gg, lr.pvars, b)) continue;
          if (solve_premises(lr, 0, b, depth)) {
            used.insert(lr.name);
            ok = true;
            break;
          }
        }
        if (ok) break;
      }
    }
    in_progress.erase(key);
    return ok;
  }

  // ---- sub-proofs under extra hypotheses ----

  bool prove_under(const std::vector<FormulaPtr>& extra, const FormulaPtr& g,
                   int depth) {
    Engine e(c);
    e.light = true;
    e.fresh_counter = fresh_counter + 100;
    e.used = used;
    for (auto& h : raw_hyps) e.raw_hyps.push_back(h);
    for (auto& h : extra) e.raw_hyps.push_back(h);
    for (auto& h : e.raw_hyps) e.add_hyp(h);
    e.close();
    bool ok = e.prove(norm_formula(c, g), depth + 1);
    if (ok)
      for (auto& n : e.used) used.insert(n);
    return ok;
  }

  // ---- arithmetic goals ----

  bool prove_le_zero(Poly p) {
    if (p.constant()) return p.c <= 0;
    for (auto& q : les) {
      Poly d = p;
      d.add(q, -1);
      if (d.constant() && d.c <= 0) return true;
    }
    return false;
  }

  bool prove_cmp(const TermPtr& a, const TermPtr& b, long long slack) {
    Poly p;
    to_poly(canon(N(a)), p, 1);
    to_poly(canon(N(b)), p, -1);
    p.c += slack;
    return prove_le_zero(p);
  }

  // ---- disequality ----

  bool tneq(const TermPtr& a0, const TermPtr& b0, int depth) {
    if (!c.budget() || depth >= kMaxDepth) return false;
    TermPtr a = canon(N(a0)), b = canon(N(b0));
    for (auto& d : diseqs) {
      if ((teq(d.first, a) && teq(d.second, b)) ||
          (teq(d.first, b) && teq(d.second, a)))
        return true;
    }
    if (a->kind == TermKind::IntLit && b->kind == TermKind::IntLit)
      return a->ival != b->ival;
    if (a->kind == TermKind::BoolLit && b->kind == TermKind::BoolLit)
      return a->bval != b->bval;
    // strict order in either direction
    if (prove_cmp(a, b, 1) || prove_cmp(b, a, 1)) return true;
    // addresses: program variables live in their own blocks; fields and
    // array cells are distinguished by their selector and their base
    auto is_addr = [](const TermPtr& t) {
      return t->kind == TermKind::VarAddr || t->kind == TermKind::FieldAddr ||
             t->kind == TermKind::IndexAddr;
    };
    if (is_addr(a) && is_addr(b)) {
      if (a->kind == TermKind::VarAddr && b->kind == TermKind::VarAddr)
        return a->name != b->name;
      if (a->kind != b->kind) return true;
      if (a->kind == TermKind::FieldAddr) {
        if (a->name != b->name) return true;
        if (tneq(a->args[0], b->args[0], depth + 1)) return true;
        // same selector: the addresses differ iff the bases do, which may
        // follow from a lemma (e.g. distinct members of disjoint sets)
        return try_lemmas(
            norm_formula(c, mk_not(mk_eq(a->args[0], b->args[0]))), depth + 1);
      }
      if (a->kind == TermKind::IndexAddr) {
        if (tneq(a->args[1], b->args[1], depth + 1)) return true;
        return tneq(a->args[0], b->args[0], depth + 1);
      }
    }
    if (a->kind == TermKind::NilLit && is_addr(b)) return true;
    if (b->kind == TermKind::NilLit && is_addr(a)) return true;
    return false;
  }

  // ---- set goals ----

  std::vector<TermPtr> set_ops(const TermPtr& s) {
    std::vector<TermPtr> out;
    TermPtr n = normalize_set(canon(N(s)));
    std::function<void(const TermPtr&)> go = [&](const TermPtr& t) {
      if (is_set_op(t)) {
        go(t->args[0]);
        go(t->args[1]);
      } else if (!(t->kind == TermKind::SetLit && t->args.empty())) {
        out.push_back(t);
      }
    };
    go(n);
    return out;
  }

  bool prove_in(const TermPtr& e, const TermPtr& s, int depth) {
    if (!c.budget() || depth >= kMaxDepth) return false;
    for (auto& op : set_ops(s)) {
      if (op->kind == TermKind::SetLit) {
        for (auto& x : op->args)
          if (teq(e, x)) return true;
        continue;
      }
      if (op->kind == TermKind::Apply && !op->is_msf && op->name == "\\") {
        if (prove_in(e, op->args[0], depth + 1) &&
            prove_notin(e, op->args[1], depth + 1))
          return true;
        continue;
      }
      if (op->kind == TermKind::Cond) {
        if (prove_in(e, op->args[1], depth + 1) &&
            prove_in(e, op->args[2], depth + 1))
          return true;
        continue;
      }
      // hypotheses: e' in S' / subset chains
      for (auto& a : atoms) {
        if (a->kind == FormulaKind::BoolTerm &&
            a->t1->kind == TermKind::Apply && !a->t1->is_msf) {
          if (a->t1->name == "in" && teq(a->t1->args[0], e) &&
              teq(a->t1->args[1], op))
            return true;
          if (a->t1->name == "subset" && teq(a->t1->args[1], op) &&
              prove_in(e, a->t1->args[0], depth + 1))
            return true;
        }
      }
      // a lemma may place e into this operand directly
      if (try_lemmas(norm_formula(c, mk_boolterm(mk_apply("in", {e, op}))),
                     depth))
        return true;
    }
    FormulaPtr g = mk_boolterm(mk_apply("in", {e, s}));
    return atom_present(g) || try_lemmas(norm_formula(c, g), depth);
  }

  bool prove_notin(const TermPtr& e, const TermPtr& s, int depth) {
    if (!c.budget() || depth >= kMaxDepth) return false;
    for (auto& op : set_ops(s)) {
      if (!notin_one(e, op, depth)) {
        FormulaPtr g = mk_not(mk_boolterm(mk_apply("in", {e, s})));
        return atom_present(norm_formula(c, g)) ||
               try_lemmas(norm_formula(c, g), depth);
      }
    }
    return true;
  }

  bool notin_one(const TermPtr& e, const TermPtr& op, int depth) {
    if (op->kind == TermKind::SetLit) {
      for (auto& x : op->args)
        if (!tneq(e, x, depth + 1)) return false;
      return true;
    }
    if (op->kind == TermKind::Cond)
      return prove_notin(e, op->args[1], depth + 1) &&
             prove_notin(e, op->args[2], depth + 1);
    if (op->kind == TermKind::Apply && !op->is_msf && op->name == "\\")
      return prove_in(e, op->args[1], depth + 1) ||
             prove_notin(e, op->args[0], depth + 1);
    if (op->kind == TermKind::Apply && !op->is_msf && op->name == "inter")
      return prove_notin(e, op->args[0], depth + 1) ||
             prove_notin(e, op->args[1], depth + 1);
    if (op->kind == TermKind::UnionComp) {
      std::string x = fresh(op->name);
      std::map<std::string, TermPtr> m{{op->name, mk_var(x)}};
      std::vector<FormulaPtr> extra{
          mk_boolterm(mk_apply("in", {mk_var(x), op->args[0]}))};
      if (op->args.size() > 2)
        extra.push_back(term_to_formula(c, subst_vars(op->args[2], m)));
      return prove_under(
          extra,
          mk_not(mk_boolterm(mk_apply("in", {e, subst_vars(op->args[1], m)}))),
          depth);
    }
    // direct hypothesis
    FormulaPtr g = mk_not(mk_boolterm(mk_apply("in", {e, op})));
    if (atom_present(norm_formula(c, g))) return true;
    // from disjointness: e in T and op `inter` T = {}
    for (auto& a : atoms) {
      const TermPtr* other = empty_inter_partner(a, op);
      if (other && prove_in(e, *other, depth + 1)) return true;
    }
    if (scopebound_apply(op, depth, [&](const TermPtr& bound) {
          return prove_notin(e, bound, depth + 1);
        }))
      return true;
    return try_lemmas(norm_formula(c, g), depth);
  }

  // If atom a says A inter B = {} and one side equals op, return the other.
  const TermPtr* empty_inter_partner(const FormulaPtr& a, const TermPtr& op) {
    if (a->kind != FormulaKind::Eq) return nullptr;
    const TermPtr *it = nullptr, *empty = nullptr;
    if (a->t1->kind == TermKind::Apply && a->t1->name == "inter") {
      it = &a->t1;
      empty = &a->t2;
    } else if (a->t2->kind == TermKind::Apply && a->t2->name == "inter") {
      it = &a->t2;
      empty = &a->t1;
    } else {
      return nullptr;
    }
    if (!((*empty)->kind == TermKind::SetLit && (*empty)->args.empty()))
      return nullptr;
    if (teq((*it)->args[0], op)) return &(*it)->args[1];
    if (teq((*it)->args[1], op)) return &(*it)->args[0];
    return nullptr;
  }

  // Replace a symbolic scope application by its declared bound, when the
  // declaration's guard is provable.
  bool scopebound_apply(const TermPtr& op, int depth,
                        const std::function<bool(const TermPtr&)>& k) {
    if (!(op->kind == TermKind::Apply && op->is_msf)) return false;
    for (auto& sb : c.u.scope_bounds) {
      if (sb.fn != op->name) continue;
      const FuncDef* f = c.u.find_func(sb.fn);
      if (!f || f->params.size() != op->args.size()) continue;
      std::map<std::string, TermPtr> m;
      for (size_t i = 0; i < f->params.size(); ++i)
        m[f->params[i].first] = op->args[i];
      FormulaPtr guard = subst_vars_formula(sb.guard, m);
      if (!prove(norm_formula(c, guard), depth + 1)) continue;
      if (k(subst_vars(sb.bound, m))) {
        used.insert("scope bound for " + sb.fn);
        return true;
      }
    }
    return false;
  }

  bool prove_subset(const TermPtr& s, const TermPtr& t, int depth) {
    if (!c.budget() || depth >= kMaxDepth) return false;
    if (teq(s, t)) return true;
    FormulaPtr g = mk_boolterm(mk_apply("subset", {s, t}));
    if (atom_present(norm_formula(c, g))) return true;
    auto tops = set_ops(t);
    auto present = [&](const TermPtr& o) {
      for (auto& x : tops)
        if (teq(o, x)) return true;
      return false;
    };
    bool all = true;
    for (auto& o : set_ops(s)) {
      if (present(o)) continue;
      if (o->kind == TermKind::SetLit) {
        bool elems = true;
        for (auto& e : o->args)
          if (!prove_in(e, t, depth + 1)) {
            elems = false;
            break;
          }
        if (elems) continue;
      }
      all = false;
      break;
    }
    if (all) return true;
    // one transitive step through a subset hypothesis
    for (auto& a : atoms) {
      if (a->kind == FormulaKind::BoolTerm && a->t1->kind == TermKind::Apply &&
          !a->t1->is_msf && a->t1->name == "subset" &&
          teq(a->t1->args[0], s) && prove_subset(a->t1->args[1], t, depth + 1))
        return true;
    }
    return try_lemmas(norm_formula(c, g), depth);
  }

  bool prove_empty_inter(const TermPtr& s, const TermPtr& t, int depth,
                         bool flipped = false) {
    if (!c.budget() || depth >= kMaxDepth) return false;
    bool all = true;
    for (auto& op : set_ops(s)) {
      if (empty_inter_one(op, t, depth)) continue;
      all = false;
      break;
    }
    if (all) return true;
    if (!flipped && prove_empty_inter(t, s, depth, true)) return true;
    return false;
  }

  bool empty_inter_one(const TermPtr& op, const TermPtr& t, int depth) {
    if (op->kind == TermKind::SetLit) {
      for (auto& e : op->args)
        if (!prove_notin(e, t, depth + 1)) return false;
      return true;
    }
    if (op->kind == TermKind::Cond)
      return prove_empty_inter(op->args[1], t, depth + 1) &&
             prove_empty_inter(op->args[2], t, depth + 1);
    if (op->kind == TermKind::UnionComp) {
      std::string x = fresh(op->name);
      std::map<std::string, TermPtr> m{{op->name, mk_var(x)}};
      std::vector<FormulaPtr> extra{
          mk_boolterm(mk_apply("in", {mk_var(x), op->args[0]}))};
      if (op->args.size() > 2)
        extra.push_back(term_to_formula(c, subst_vars(op->args[2], m)));
      return prove_under(extra,
                         mk_eq(mk_apply("inter",
                                        {subst_vars(op->args[1], m), t}),
                               mk_empty_set()),
                         depth);
    }
    // find a hypothesis `op inter B = {}` with t a subset of B
    for (auto& a : atoms) {
      const TermPtr* other = empty_inter_partner(a, op);
      if (other && prove_subset(t, *other, depth + 1)) return true;
    }
    if (scopebound_apply(op, depth, [&](const TermPtr& bound) {
          return prove_empty_inter(bound, t, depth + 1);
        }))
      return true;
    // element-wise when t is finite
    TermPtr ct = normalize_set(canon(N(t)));
    if (ct->kind == TermKind::SetLit) {
      for (auto& e : ct->args)
        if (!prove_notin(e, op, depth + 1)) return false;
      return !ct->args.empty();
    }
    return false;
  }

  // ---- definedness ----

  bool prove_nonnil(const TermPtr& a, int depth) {
    if (tneq(a, mk_nil(), depth + 1)) return true;
    return try_lemmas(mk_not(mk_eq(a, mk_nil())), depth + 1);
  }

  bool prove_defined(const TermPtr& t0, int depth) {
    if (!c.budget() || depth >= kMaxDepth) return false;
    TermPtr t = canon(N(t0));
    if (defined.count(print_term(t)) || defined.count(print_term(N(t0))))
      return true;
    switch (t->kind) {
      case TermKind::IntLit:
      case TermKind::BoolLit:
      case TermKind::NilLit:
      case TermKind::Var:
      case TermKind::VarAddr:
      case TermKind::ScopeOfPred:
        return true;
      case TermKind::FieldAddr:
        return prove_defined(t->args[0], depth + 1) &&
               prove_nonnil(t->args[0], depth);
      case TermKind::IndexAddr:
        return prove_defined(t->args[0], depth + 1) &&
               prove_defined(t->args[1], depth + 1) &&
               prove_nonnil(t->args[0], depth);
      case TermKind::Deref: {
        const TermPtr& a = t->args[0];
        if (a->kind == TermKind::VarAddr) return true;  // program variable
        if (a->kind == TermKind::FieldAddr || a->kind == TermKind::IndexAddr)
          return prove_defined(a, depth + 1);
        return false;
      }
      case TermKind::Old:
        return prove_defined(t->args[0], depth + 1);
      case TermKind::SetLit:
      case TermKind::SeqLit:
      case TermKind::MapLit: {
        for (auto& a : t->args)
          if (!prove_defined(a, depth + 1)) return false;
        return true;
      }
      case TermKind::Cond: {
        if (!prove_defined(t->args[0], depth + 1)) return false;
        FormulaPtr guard = term_to_formula(c, t->args[0]);
        return prove_under({guard}, mk_defined(t->args[1]), depth) &&
               prove_under({mk_not(guard)}, mk_defined(t->args[2]), depth);
      }
      case TermKind::AllIn: {
        if (!prove_defined(t->args[0], depth + 1)) return false;
        std::string x = fresh(t->name);
        std::map<std::string, TermPtr> m{{t->name, mk_var(x)}};
        std::vector<FormulaPtr> extra{
            mk_boolterm(mk_apply("in", {mk_var(x), t->args[0]}))};
        return prove_under(extra, mk_defined(subst_vars(t->args[1], m)),
                           depth);
      }
      case TermKind::Apply: {
        if (t->is_msf) break;
        if (t->name == "&&" || t->name == "||") {
          if (prove_defined(t->args[0], depth + 1) &&
              prove_defined(t->args[1], depth + 1))
            return true;
          // a decided operand settles the whole connective
          FormulaPtr a = term_to_formula(c, t->args[0]);
          FormulaPtr b = term_to_formula(c, t->args[1]);
          if (t->name == "&&")
            return prove(norm_formula(c, mk_not(a)), depth + 1) ||
                   prove(norm_formula(c, mk_not(b)), depth + 1);
          return prove(norm_formula(c, a), depth + 1) ||
                 prove(norm_formula(c, b), depth + 1);
        }
        static const std::set<std::string> strict_ops = {
            "+",  "-",    "*",      "neg",     "<",    "<=",  ">",
            ">=", "=",    "!=",     "union",   "inter", "\\", "in",
            "subset", "psubset", "++", "rng",  "head", "tail", "cons",
            "Block", "InHeap", "!"};
        if (strict_ops.count(t->name)) {
          for (auto& a : t->args)
            if (!prove_defined(a, depth + 1)) return false;
          return true;
        }
        if (t->name == "/")
          return prove_defined(t->args[0], depth + 1) &&
                 prove_defined(t->args[1], depth + 1) &&
                 tneq(t->args[1], mk_int(0), depth + 1);
        if (t->name == "MAX" || t->name == "MIN")
          // also needs non-emptiness; rely on hypotheses for that
          break;
        break;
      }
      default:
        break;
    }
    FormulaPtr g = mk_defined(t);
    return atom_present(g) || try_lemmas(g, depth);
  }

  // ---- top-level goal dispatch ----

  bool prove(const FormulaPtr& g0, int depth) {
    if (!g0 || !c.budget() || depth >= kMaxDepth) return false;
    FormulaPtr g = depth == 0 ? norm_formula(c, g0) : g0;
    switch (g->kind) {
      case FormulaKind::BoolTerm: {
        const TermPtr& t = g->t1;
        if (t->kind == TermKind::BoolLit) return t->bval;
        if (t->kind == TermKind::Apply && !t->is_msf && t->args.size() == 2) {
          if (t->name == "<" && prove_cmp(t->args[0], t->args[1], 1))
            return true;
          if (t->name == "<=" && prove_cmp(t->args[0], t->args[1], 0))
            return true;
          if (t->name == "in" && prove_in(t->args[0], t->args[1], depth))
            return true;
          if (t->name == "subset" &&
              prove_subset(t->args[0], t->args[1], depth))
            return true;
          if (t->name == "psubset" && atom_present(g)) return true;
        }
        break;
      }
      case FormulaKind::Eq: {
        if (teq(g->t1, g->t2)) return true;
        // empty intersections
        auto as_empty_inter = [&](const TermPtr& l,
                                  const TermPtr& r) -> bool {
          return r->kind == TermKind::SetLit && r->args.empty() &&
                 l->kind == TermKind::Apply && !l->is_msf &&
                 l->name == "inter" &&
                 prove_empty_inter(l->args[0], l->args[1], depth);
        };
        if (as_empty_inter(g->t1, g->t2) || as_empty_inter(g->t2, g->t1))
          return true;
        // integers: both directions of <=
        Poly p;
        if (to_poly(canon(N(g->t1)), p, 1)) {
          if (prove_cmp(g->t1, g->t2, 0) && prove_cmp(g->t2, g->t1, 0))
            return true;
        }
        break;
      }
      case FormulaKind::StrongEq:
        if (teq(g->t1, g->t2)) return true;
        break;
      case FormulaKind::Defined:
        if (prove_defined(g->t1, depth)) return true;
        break;
      case FormulaKind::And:
        return prove(g->f1, depth) && prove(g->f2, depth);
      case FormulaKind::Or:
        if (prove(g->f1, depth + 1) || prove(g->f2, depth + 1)) return true;
        break;
      case FormulaKind::Implies:
        return prove_under({g->f1}, g->f2, depth);
      case FormulaKind::Not: {
        const FormulaPtr& n = g->f1;
        if (n->kind == FormulaKind::Eq && tneq(n->t1, n->t2, depth))
          return true;
        if (n->kind == FormulaKind::BoolTerm &&
            n->t1->kind == TermKind::Apply && !n->t1->is_msf) {
          const TermPtr& t = n->t1;
          if (t->name == "in" &&
              prove_notin(t->args[0], t->args[1], depth))
            return true;
          if (t->name == "<" && prove_cmp(t->args[1], t->args[0], 0))
            return true;
          if (t->name == "<=" && prove_cmp(t->args[1], t->args[0], 1))
            return true;
        }
        break;
      }
      case FormulaKind::Forall: {
        if (g->bound) {
          std::string x = fresh(g->var);
          std::map<std::string, TermPtr> m{{g->var, mk_var(x)}};
          std::vector<FormulaPtr> extra{
              mk_boolterm(mk_apply("in", {mk_var(x), g->bound}))};
          if (prove_under(extra, subst_vars_formula(g->f1, m), depth))
            return true;
        }
        break;
      }
      case FormulaKind::Outlying:
        return prove(g->f1, depth) &&
               prove_empty_inter(scope_of_formula(c.u, g->f1), g->t1, depth);
      default:
        break;
    }
    if (atom_present(g)) return true;
    // disjunction unit resolution: (a or b) with the other branch refuted
    for (auto& d : disjs) {
      if (!c.budget()) break;
      if (formula_teq(d.first, g) && formula_teq(d.second, g)) return true;
      if (formula_teq(d.second, g) &&
          prove(norm_formula(c, mk_not(d.first)), depth + 1))
        return true;
      if (formula_teq(d.first, g) &&
          prove(norm_formula(c, mk_not(d.second)), depth + 1))
        return true;
    }
    return try_lemmas(g, depth);
  }
};

std::vector<LemmaRule> build_rules(const Unit& u) {
  std::vector<LemmaRule> out;
  for (auto& l : u.lemmas) {
    LemmaRule lr;
    lr.name = l.name;
    FormulaPtr f = l.formula;
    while (f->kind == FormulaKind::Forall) {
      lr.pvars.insert(f->var);
      if (f->bound)
        lr.premises.push_back(
            mk_boolterm(mk_apply("in", {mk_var(f->var), f->bound})));
      f = f->f1;
    }
    while (f->kind == FormulaKind::Implies) {
      for (auto& p : conjuncts_of(f->f1)) lr.premises.push_back(p);
      f = f->f2;
    }
    lr.conclusions = conjuncts_of(f);
    out.push_back(std::move(lr));
  }
  return out;
}

}  // namespace

Prover::Prover(const Unit& u) : u_(u) {}

EntailResult Prover::entails(const std::vector<FormulaPtr>& hyps,
                             const FormulaPtr& goal,
                             const std::vector<std::string>* only_lemmas) {
  Ctx ctx{u_, build_rules(u_), only_lemmas};
  Engine e(ctx);
  e.raw_hyps = hyps;
  for (auto& h : hyps) e.add_hyp(h);
  e.close();
  EntailResult r;
  try {
    r.ok = e.prove(goal, 0);
  } catch (const Error&) {
    r.ok = false;  // e.g. unknown function inside a scope computation
  }
  if (r.ok) r.lemmas_used.assign(e.used.begin(), e.used.end());
  return r;
}

}  // namespace sl
