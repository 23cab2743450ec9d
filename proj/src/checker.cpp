#include "sl/checker.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "sl/logic.hpp"
#include "sl/scope.hpp"
#include "sl/types.hpp"

namespace sl {

int ScriptReport::count(ObligationStatus s) const {
  int n = 0;
  for (auto& o : obligations)
    if (o.status == s) ++n;
  return n;
}

bool UnitReport::all_checked() const {
  for (auto& s : scripts)
    if (!s.checked) return false;
  return true;
}

bool UnitReport::has_open() const {
  for (auto& s : scripts)
    for (auto& o : s.obligations)
      if (o.status == ObligationStatus::Open) return true;
  return false;
}

namespace {

bool same_formula(const FormulaPtr& a, const FormulaPtr& b) {
  if (!a || !b) return a == b;
  if (print_formula(a) == print_formula(b) || formula_equal(a, b)) return true;
  // conjunction order and association do not matter at boundaries
  std::multiset<std::string> ca, cb;
  for (auto& c : conjuncts_of(a)) ca.insert(print_formula(c));
  for (auto& c : conjuncts_of(b)) cb.insert(print_formula(c));
  return ca == cb;
}

FormulaPtr and_of(std::vector<FormulaPtr> cs, Span sp) {
  if (cs.empty()) return mk_true();
  return mk_and_all(std::move(cs), sp);
}

// ---------------------------------------------------------------------------
// Symbolic store for straight-line runs

struct SymState {
  std::vector<std::pair<TermPtr, TermPtr>> entries;  // address -> value
  std::map<std::string, size_t> index;               // printed address -> slot
  std::set<std::string> fresh_keys;   // units of freshly allocated blocks
  std::set<std::string> fresh_vars;   // names of fresh pointer symbols

  const TermPtr* lookup(const std::string& key) const {
    auto it = index.find(key);
    return it == index.end() ? nullptr : &entries[it->second].second;
  }
  void write(const TermPtr& addr, const TermPtr& val, bool fresh) {
    std::string key = print_term(addr);
    auto it = index.find(key);
    if (it != index.end()) {
      entries[it->second].second = val;
      return;
    }
    index[key] = entries.size();
    entries.emplace_back(addr, val);
    if (fresh) fresh_keys.insert(key);
  }
  std::vector<TermPtr> written(bool include_fresh) const {
    std::vector<TermPtr> out;
    for (auto& e : entries)
      if (include_fresh || !fresh_keys.count(print_term(e.first)))
        out.push_back(e.first);
    return out;
  }
};

// Purely syntactic unit-address distinctness: used to decide whether an
// unwritten read can bypass the store without a side condition.
bool ground_distinct(const TermPtr& a, const TermPtr& b,
                     const std::set<std::string>& fresh_vars) {
  auto fresh_root = [&](const TermPtr& t) {
    return t->kind == TermKind::Var && fresh_vars.count(t->name) > 0;
  };
  if (a->kind == TermKind::VarAddr && b->kind == TermKind::VarAddr)
    return a->name != b->name;
  if ((a->kind == TermKind::VarAddr) != (b->kind == TermKind::VarAddr))
    return true;  // a variable's cell vs a heap/record unit
  if (a->kind == TermKind::FieldAddr && b->kind == TermKind::IndexAddr)
    return true;
  if (a->kind == TermKind::IndexAddr && b->kind == TermKind::FieldAddr)
    return true;
  if (a->kind == TermKind::FieldAddr && b->kind == TermKind::FieldAddr) {
    if (a->name != b->name) return true;
    if (fresh_root(a->args[0]) != fresh_root(b->args[0])) return true;
    if (fresh_root(a->args[0]) && fresh_root(b->args[0]))
      return a->args[0]->name != b->args[0]->name;
    return ground_distinct(a->args[0], b->args[0], fresh_vars) &&
           a->args[0]->kind != TermKind::Deref &&
           b->args[0]->kind != TermKind::Deref;
  }
  if (a->kind == TermKind::IndexAddr && b->kind == TermKind::IndexAddr) {
    if (a->args[1]->kind == TermKind::IntLit &&
        b->args[1]->kind == TermKind::IntLit)
      return a->args[1]->ival != b->args[1]->ival;
    if (fresh_root(a->args[0]) != fresh_root(b->args[0])) return true;
    return false;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Walker

struct FrameCtx {
  std::string name;
  FormulaPtr framed;
  TermPtr written;  // the E of the inner Outlying
  Span span;
};

struct BlockResult {
  FormulaPtr pre, post;
};

struct Walker {
  const Unit& u;
  ScriptReport& rep;
  Prover prover;
  int next_id = 1;
  int fresh_counter = 0;

  Walker(const Unit& un, ScriptReport& r) : u(un), rep(r), prover(un) {}

  Obligation& emit(ObligationKind k, std::vector<FormulaPtr> hyps,
                   FormulaPtr goal, Span sp,
                   const std::vector<std::string>* only = nullptr) {
    Obligation o;
    o.id = next_id++;
    o.kind = k;
    o.hyps = std::move(hyps);
    o.goal = std::move(goal);
    o.origin = sp;
    EntailResult r = prover.entails(o.hyps, o.goal, only);
    if (r.ok) {
      o.status = ObligationStatus::Discharged;
      o.note = r.note();
    }
    rep.obligations.push_back(std::move(o));
    return rep.obligations.back();
  }

  // silent check: true if provable; no obligation recorded
  bool holds(const std::vector<FormulaPtr>& hyps, const FormulaPtr& goal) {
    return prover.entails(hyps, goal).ok;
  }

  TermPtr fscope(const FormulaPtr& f) {
    return scope_of_formula(u, f, &rep.scope_extension_used);
  }

  // ---- straight-line runs ----

  struct RunCheck {
    Walker& w;
    std::vector<FormulaPtr> hyps;  // pre-state facts (plain syntax)
    SymState sym;
    std::vector<std::pair<FormulaPtr, ObligationKind>> sides;
    Span span;

    TermPtr wset(bool include_fresh) const {
      return mk_setlit(sym.written(include_fresh));
    }

    void side(FormulaPtr f, ObligationKind k) {
      sides.emplace_back(std::move(f), k);
    }

    bool fn_is_pure(const TermPtr& app) {
      try {
        TermPtr sc = app->is_msf
                         ? app  // a scope application reads its own value
                         : derive_msf(w.u, app->name).body;
        if (!app->is_msf)
          return sc->kind == TermKind::SetLit && sc->args.empty();
        return false;
      } catch (const Error&) {
        return false;
      }
    }

    // Translate a current-state term into a pre-state reading through the
    // symbolic store.
    TermPtr precoord(const TermPtr& t) {
      switch (t->kind) {
        case TermKind::Old:
          return erase_old(t->args[0]);  // explicit pre-state reading
        case TermKind::Deref: {
          TermPtr a = precoord(t->args[0]);
          std::string key = print_term(a);
          if (const TermPtr* v = sym.lookup(key)) return *v;
          for (auto& e : sym.entries)
            if (!ground_distinct(a, e.first, sym.fresh_vars))
              side(mk_not(mk_eq(a, e.first, t->span), t->span),
                   ObligationKind::Consequence);
          return mk_deref(a, t->span);
        }
        case TermKind::Apply: {
          std::vector<TermPtr> args;
          for (auto& x : t->args) args.push_back(precoord(x));
          bool user = t->is_msf || w.u.find_func(t->name) != nullptr;
          if (user && !fn_is_pure(t)) {
            TermPtr app = t->is_msf ? mk_msf(t->name, args, t->span)
                                    : mk_apply(t->name, args, t->span);
            TermPtr sc = t->is_msf ? app : mk_msf(t->name, args, t->span);
            if (!sym.entries.empty())
              side(mk_eq(mk_apply("inter", {sc, wset(false)}, t->span),
                         mk_empty_set(), t->span),
                   ObligationKind::ScopeDisjoint);
            return app;
          }
          auto nt = std::make_shared<Term>(*t);
          nt->args = std::move(args);
          return nt;
        }
        default: {
          auto nt = std::make_shared<Term>(*t);
          for (auto& a : nt->args) a = precoord(a);
          if (t->farg) nt->farg = precoord_f(t->farg);
          return nt;
        }
      }
    }

    FormulaPtr precoord_f(const FormulaPtr& f) {
      if (!f) return f;
      auto nf = std::make_shared<Formula>(*f);
      nf->t1 = f->t1 ? precoord(f->t1) : nullptr;
      nf->t2 = f->t2 ? precoord(f->t2) : nullptr;
      nf->f1 = precoord_f(f->f1);
      nf->f2 = precoord_f(f->f2);
      nf->bound = f->bound ? precoord(f->bound) : nullptr;
      return nf;
    }

    void flush_sides() {
      for (auto& s : sides) {
        if (!w.holds(hyps, s.first))
          w.emit(s.second, hyps, s.first, span);  // records its own status
      }
      sides.clear();
    }

    void do_assign(const StmtPtr& s) {
      TermPtr addr = precoord(s->target);
      TermPtr val = precoord(s->rhs);
      // target address must be a valid unit: non-nil base
      const TermPtr* base = nullptr;
      if (s->target->kind == TermKind::FieldAddr ||
          s->target->kind == TermKind::IndexAddr)
        base = &s->target->args[0];
      if (base) {
        FormulaPtr nn =
            mk_not(mk_eq(precoord(*base), mk_nil(s->span), s->span), s->span);
        if (!w.holds(hyps, nn))
          w.emit(ObligationKind::Definedness, hyps, nn, s->span);
      }
      FormulaPtr dv = mk_defined(val, s->span);
      if (!w.holds(hyps, dv))
        w.emit(ObligationKind::Definedness, hyps, dv, s->span);
      flush_sides();
      sym.write(addr, val, false);
    }

    void do_alloc(const StmtPtr& s) {
      TermPtr addr = precoord(s->target);
      flush_sides();
      std::string nu = "nu" + std::to_string(++w.fresh_counter);
      sym.fresh_vars.insert(nu);
      TermPtr v = mk_var(nu, s->span);
      sym.write(addr, v, false);
      hyps.push_back(mk_not(mk_eq(v, mk_nil(s->span), s->span), s->span));
      hyps.push_back(
          mk_boolterm(mk_apply("InHeap", {v}, s->span), s->span));
      // initialized units of the fresh block
      TypePtr rt = resolve_type(w.u, s->alloc_type);
      auto unit_default = [&](const TypePtr& t) -> TermPtr {
        TypePtr r = resolve_type(w.u, t);
        if (r->kind == TypeKind::Bool) return mk_bool(false, s->span);
        if (r->kind == TypeKind::Int) return mk_int(0, s->span);
        return mk_nil(s->span);
      };
      if (rt->kind == TypeKind::Record) {
        for (auto& fld : rt->fields)
          sym.write(mk_deref_addr_field(v, fld.first, s->span),
                    unit_default(fld.second), true);
      } else if (rt->kind == TypeKind::Array) {
        for (long long i = 0; i < rt->len; ++i)
          sym.write(mk_indexaddr(v, mk_int(i, s->span), s->span),
                    unit_default(rt->elem), true);
      } else {
        sym.write(v, unit_default(rt), true);
      }
    }

    static TermPtr mk_deref_addr_field(const TermPtr& p, const std::string& n,
                                       Span sp) {
      return mk_fieldaddr(p, n, sp);
    }
  };

  void check_run(const FormulaPtr& pre, const std::vector<StmtPtr>& run,
                 const FormulaPtr& post, Span sp) {
    if (mentions_old(pre))
      fail(ErrorKind::PreStateLeak,
           "boundary assertion mentions a pre-state term", sp);
    bool only_skip = true;
    for (auto& s : run)
      if (s->kind != StmtKind::Skip) only_skip = false;
    if (only_skip) {
      if (!same_formula(pre, post))
        fail(ErrorKind::RuleMismatch,
             "skip requires the postcondition to restate the precondition",
             sp);
      return;
    }
    RunCheck rc{*this};
    rc.span = sp;
    rc.hyps = conjuncts_of(pre);
    for (auto& s : run) {
      if (s->kind == StmtKind::Assign)
        rc.do_assign(s);
      else if (s->kind == StmtKind::Alloc)
        rc.do_alloc(s);
    }
    // claimed post, conjunct by conjunct
    auto pre_cs = conjuncts_of(pre);
    for (auto& q : conjuncts_of(post)) {
      if (q->kind == FormulaKind::PredVar ||
          (q->kind == FormulaKind::Outlying &&
           q->f1->kind == FormulaKind::PredVar)) {
        check_survival(q, pre_cs, rc, sp);
        continue;
      }
      FormulaPtr qhat = rc.precoord_f(q);
      rc.flush_sides();
      if (!holds(rc.hyps, qhat))
        emit(ObligationKind::Consequence, rc.hyps, qhat, q->span);
    }
  }

  // A predicate variable survives a run when the precondition localizes it
  // away from everything the run wrote.
  void check_survival(const FormulaPtr& q,
                      const std::vector<FormulaPtr>& pre_cs, RunCheck& rc,
                      Span sp) {
    const std::string& r =
        q->kind == FormulaKind::PredVar ? q->var : q->f1->var;
    std::vector<TermPtr> w = rc.sym.written(false);
    const FormulaPtr* outl = nullptr;
    for (auto& p : pre_cs) {
      if (p->kind == FormulaKind::PredVar && p->var == r && w.empty()) return;
      if (p->kind == FormulaKind::Outlying &&
          p->f1->kind == FormulaKind::PredVar && p->f1->var == r)
        outl = &p;
    }
    if (!outl)
      fail(ErrorKind::RuleMismatch,
           "$" + r + " survives a write only under an Outlying($" + r +
               ", ...) precondition",
           sp);
    if (q->kind == FormulaKind::Outlying &&
        print_term((*outl)->t1) != print_term(q->t1))
      fail(ErrorKind::RuleMismatch,
           "Outlying($" + r + ", ...) changed its write set across a run", sp);
    // every written address must be inside the declared write set
    TermPtr e = normalize_set((*outl)->t1);
    std::set<std::string> elems;
    if (e->kind == TermKind::SetLit)
      for (auto& x : e->args) elems.insert(print_term(x));
    for (auto& a : w) {
      if (elems.count(print_term(a))) continue;
      if (holds(rc.hyps,
                mk_boolterm(mk_apply("in", {a, (*outl)->t1}, sp), sp)))
        continue;
      fail(ErrorKind::RuleMismatch,
           "write to " + print_term(a) + " is outside the set protecting $" +
               r,
           sp);
    }
  }

  // ---- if / while ----

  FormulaPtr strip_def_conjunct(const FormulaPtr& cur, const TermPtr& cond,
                                Span sp) {
    auto cs = conjuncts_of(cur);
    std::string want = print_term(cond);
    std::vector<FormulaPtr> rest;
    bool found = false;
    for (auto& c : cs) {
      if (!found && c->kind == FormulaKind::Defined &&
          print_term(c->t1) == want) {
        found = true;
        continue;
      }
      rest.push_back(c);
    }
    if (!found)
      fail(ErrorKind::RuleMismatch,
           "branching requires a definedness conjunct for the guard: def(" +
               want + ")",
           sp);
    return and_of(rest, sp);
  }

  FormulaPtr check_if(const FormulaPtr& cur, const StmtPtr& s) {
    if (mentions_old(cur))
      fail(ErrorKind::PreStateLeak,
           "boundary assertion mentions a pre-state term", s->span);
    FormulaPtr p = strip_def_conjunct(cur, s->cond, s->span);
    FormulaPtr guard = mk_boolterm(s->cond, s->span);
    FormulaPtr then_pre = mk_and(p, guard, s->span);
    FormulaPtr else_pre = mk_and(p, mk_not(guard, s->span), s->span);
    BlockResult thenr = walk_block(s->body, nullptr);
    if (!same_formula(thenr.pre, then_pre))
      fail(ErrorKind::RuleMismatch,
           "then-branch precondition must be the guard added to the rest",
           s->span);
    if (!s->else_body.empty()) {
      BlockResult elser = walk_block(s->else_body, nullptr);
      if (!same_formula(elser.pre, else_pre))
        fail(ErrorKind::RuleMismatch,
             "else-branch precondition must be the negated guard added to "
             "the rest",
             s->span);
      if (!same_formula(thenr.post, elser.post))
        fail(ErrorKind::RuleMismatch,
             "the two branches must establish the same postcondition",
             s->span);
      return thenr.post;
    }
    // missing else: the negated-guard precondition must already establish
    // the common post
    emit(ObligationKind::Consequence, conjuncts_of(else_pre), thenr.post,
         s->span);
    return thenr.post;
  }

  FormulaPtr check_while(const FormulaPtr& cur, const StmtPtr& s) {
    if (mentions_old(cur))
      fail(ErrorKind::PreStateLeak,
           "boundary assertion mentions a pre-state term", s->span);
    FormulaPtr inv = strip_def_conjunct(cur, s->cond, s->span);
    FormulaPtr guard = mk_boolterm(s->cond, s->span);
    BlockResult body = walk_block(s->body, nullptr);
    if (!same_formula(body.pre, mk_and(inv, guard, s->span)))
      fail(ErrorKind::RuleMismatch,
           "loop body precondition must be the invariant plus the guard",
           s->span);
    if (!same_formula(body.post, cur))
      fail(ErrorKind::RuleMismatch,
           "loop body must re-establish the invariant with the guard's "
           "definedness",
           s->span);
    return mk_and(inv, mk_not(guard, s->span), s->span);
  }

  // ---- block walk ----

  BlockResult walk_block(const std::vector<ScriptItem>& items,
                         FormulaPtr cur) {
    FormulaPtr pre = cur;
    std::vector<FrameCtx> frames;
    size_t i = 0;
    auto need_assert = [&](size_t j, const char* what) -> const ScriptItem& {
      if (j >= items.size() || items[j].kind != ItemKind::Assert)
        fail(ErrorKind::RuleMismatch,
             std::string("expected an assertion after ") + what,
             j > 0 ? items[j - 1].span : Span{});
      return items[j];
    };
    while (i < items.size()) {
      const ScriptItem& it = items[i];
      switch (it.kind) {
        case ItemKind::Assert: {
          if (!cur) {
            cur = pre = it.formula;
          } else if (!same_formula(cur, it.formula)) {
            fail(ErrorKind::RuleMismatch,
                 "assertion does not match the established formula", it.span);
          } else {
            cur = it.formula;
          }
          ++i;
          break;
        }
        case ItemKind::Conseq: {
          if (!cur)
            fail(ErrorKind::RuleMismatch, "'=>' before any assertion",
                 it.span);
          emit(ObligationKind::Consequence, conjuncts_of(cur), it.formula,
               it.span, it.by.empty() ? nullptr : &it.by);
          cur = it.formula;
          ++i;
          break;
        }
        case ItemKind::SubUp: {
          const ScriptItem& inner = need_assert(i + 1, "'sub+'");
          std::map<std::string, TermPtr> m{{it.name, it.term}};
          FormulaPtr back = subst_vars_formula(inner.formula, m);
          if (!same_formula(back, cur) &&
              !same_formula(erase_old(back), erase_old(cur)))
            fail(ErrorKind::RuleMismatch,
                 "substituting " + print_term(it.term) + " for " + it.name +
                     " in the inner precondition must give the outer one",
                 it.span);
          emit(ObligationKind::Definedness, conjuncts_of(cur),
               mk_defined(it.term, it.span), it.span);
          cur = inner.formula;
          i += 2;
          break;
        }
        case ItemKind::SubDown: {
          if (!cur)
            fail(ErrorKind::RuleMismatch, "'sub-' before any assertion",
                 it.span);
          TermPtr rep_t = it.term->kind == TermKind::Old
                              ? it.term
                              : mk_old(it.term, it.span);
          std::map<std::string, TermPtr> m{{it.name, rep_t}};
          cur = subst_vars_formula(cur, m);
          ++i;
          break;
        }
        case ItemKind::FrameUp: {
          if (!cur)
            fail(ErrorKind::RuleMismatch, "'frame+' before any assertion",
                 it.span);
          const ScriptItem& inner = need_assert(i + 1, "'frame+'");
          auto inner_cs = conjuncts_of(inner.formula);
          const FormulaPtr* outl = nullptr;
          std::vector<FormulaPtr> p;
          for (auto& cj : inner_cs) {
            if (!outl && cj->kind == FormulaKind::Outlying &&
                cj->f1->kind == FormulaKind::PredVar &&
                cj->f1->var == it.name) {
              outl = &cj;
              continue;
            }
            p.push_back(cj);
          }
          if (!outl)
            fail(ErrorKind::RuleMismatch,
                 "the framed precondition must localize $" + it.name +
                     " with Outlying($" + it.name + ", ...)",
                 it.span);
          // outer pre = inner rest + framed formula (as multisets)
          std::multiset<std::string> have, want;
          for (auto& cj : conjuncts_of(cur)) have.insert(print_formula(cj));
          for (auto& cj : p) want.insert(print_formula(cj));
          for (auto& cj : conjuncts_of(it.formula))
            want.insert(print_formula(cj));
          if (have != want)
            fail(ErrorKind::RuleMismatch,
                 "outer precondition must split into the framed formula and "
                 "the inner rest",
                 it.span);
          // At the bracket entry the pre-state reading coincides with the
          // current state, so hypotheses are taken with old() erased.
          emit(ObligationKind::ScopeDisjoint, conjuncts_of(erase_old(cur)),
               mk_eq(mk_apply("inter",
                              {erase_old(fscope(it.formula)), (*outl)->t1},
                              it.span),
                     mk_empty_set(), it.span),
               it.span);
          frames.push_back(FrameCtx{it.name, it.formula, (*outl)->t1,
                                    it.span});
          cur = inner.formula;
          i += 2;
          break;
        }
        case ItemKind::FrameDown: {
          if (frames.empty() || frames.back().name != it.name)
            fail(ErrorKind::RuleMismatch,
                 "'frame-' without a matching 'frame+' for $" + it.name,
                 it.span);
          FrameCtx fc = frames.back();
          frames.pop_back();
          if (!cur)
            fail(ErrorKind::RuleMismatch, "'frame-' before any assertion",
                 it.span);
          std::vector<FormulaPtr> q;
          bool seen = false;
          for (auto& cj : conjuncts_of(cur)) {
            if (!seen && cj->kind == FormulaKind::PredVar &&
                cj->var == it.name) {
              seen = true;
              continue;
            }
            q.push_back(cj);
          }
          if (!seen)
            fail(ErrorKind::RuleMismatch,
                 "the inner postcondition must still contain $" + it.name,
                 it.span);
          if (!same_formula(it.formula, fc.framed) &&
              !same_formula(it.formula, erase_old(fc.framed)))
            fail(ErrorKind::RuleMismatch,
                 "'frame-' must restore the formula framed at 'frame+' "
                 "(pre-state terms erased)",
                 it.span);
          for (auto& cj : conjuncts_of(it.formula)) q.push_back(cj);
          cur = and_of(q, it.span);
          ++i;
          break;
        }
        case ItemKind::Junction: {
          if (!cur)
            fail(ErrorKind::RuleMismatch, "junction before any assertion",
                 it.span);
          if (it.name == "conj") {
            BlockResult a = walk_block(it.block1, nullptr);
            BlockResult b = walk_block(it.block2, nullptr);
            if (!same_formula(a.pre, cur) || !same_formula(b.pre, cur))
              fail(ErrorKind::RuleMismatch,
                   "both conjunction branches must start from the current "
                   "assertion",
                   it.span);
            cur = mk_and(a.post, b.post, it.span);
          } else if (it.name == "disj") {
            BlockResult a = walk_block(it.block1, nullptr);
            BlockResult b = walk_block(it.block2, nullptr);
            if (cur->kind != FormulaKind::Or ||
                !same_formula(cur->f1, a.pre) ||
                !same_formula(cur->f2, b.pre))
              fail(ErrorKind::RuleMismatch,
                   "a disjunction junction needs the current assertion to "
                   "split into the branch preconditions",
                   it.span);
            if (!same_formula(a.post, b.post))
              fail(ErrorKind::RuleMismatch,
                   "both disjunction branches must establish the same "
                   "postcondition",
                   it.span);
            cur = a.post;
          } else {  // all / exist
            BlockResult a = walk_block(it.block1, nullptr);
            bool isall = it.name == "all";
            FormulaPtr expect =
                isall ? mk_forall(it.term->name, it.var_type, nullptr, a.pre,
                                  it.span)
                      : mk_exists(it.term->name, it.var_type, nullptr, a.pre,
                                  it.span);
            if (!same_formula(cur, expect))
              fail(ErrorKind::RuleMismatch,
                   "the quantifier junction must match the current "
                   "assertion's binder",
                   it.span);
            cur = isall ? mk_forall(it.term->name, it.var_type, nullptr,
                                    a.post, it.span)
                        : mk_exists(it.term->name, it.var_type, nullptr,
                                    a.post, it.span);
          }
          ++i;
          break;
        }
        case ItemKind::Statement: {
          if (!cur)
            fail(ErrorKind::RuleMismatch, "statement before any assertion",
                 it.span);
          const StmtPtr& s = it.stmt;
          if (s->kind == StmtKind::If) {
            cur = check_if(cur, s);
            const ScriptItem& post = need_assert(i + 1, "'if'");
            if (!same_formula(post.formula, cur))
              fail(ErrorKind::RuleMismatch,
                   "the assertion after 'if' must match both branch "
                   "postconditions",
                   post.span);
            cur = post.formula;
            i += 2;
            break;
          }
          if (s->kind == StmtKind::While) {
            cur = check_while(cur, s);
            const ScriptItem& post = need_assert(i + 1, "'while'");
            if (!same_formula(post.formula, cur))
              fail(ErrorKind::RuleMismatch,
                   "the assertion after 'while' must be the invariant plus "
                   "the negated guard",
                   post.span);
            cur = post.formula;
            i += 2;
            break;
          }
          // straight-line run
          std::vector<StmtPtr> run;
          size_t j = i;
          while (j < items.size() && items[j].kind == ItemKind::Statement &&
                 (items[j].stmt->kind == StmtKind::Skip ||
                  items[j].stmt->kind == StmtKind::Assign ||
                  items[j].stmt->kind == StmtKind::Alloc)) {
            run.push_back(items[j].stmt);
            ++j;
          }
          const ScriptItem& post = need_assert(j, "the statements");
          check_run(cur, run, post.formula, it.span);
          cur = post.formula;
          i = j + 1;
          break;
        }
      }
    }
    if (!frames.empty())
      fail(ErrorKind::RuleMismatch,
           "'frame+' for $" + frames.back().name + " is never closed",
           frames.back().span);
    if (!cur)
      fail(ErrorKind::RuleMismatch, "empty proof script", Span{});
    return {pre, cur};
  }
};

}  // namespace

ScriptReport check_script(const Unit& u, const ProofScript& s) {
  ScriptReport rep;
  rep.name = s.name;
  Walker w(u, rep);
  try {
    w.walk_block(s.items, nullptr);
    rep.checked = true;
  } catch (const Error& e) {
    rep.checked = false;
    rep.error = e.message;
    rep.error_kind = e.kind;
    rep.error_span = e.span;
  }
  return rep;
}

UnitReport check_unit_scripts(const Unit& u) {
  UnitReport r;
  int id = 1;
  for (auto& sb : u.scope_bounds) {
    const FuncDef* f = u.find_func(sb.fn);
    Obligation o;
    o.id = id++;
    o.kind = ObligationKind::ScopeBound;
    o.hyps = {sb.guard};
    std::vector<TermPtr> params;
    if (f)
      for (auto& p : f->params) params.push_back(mk_var(p.first, sb.span));
    o.goal = mk_boolterm(
        mk_apply("subset", {mk_msf(sb.fn, params, sb.span), sb.bound},
                 sb.span),
        sb.span);
    o.origin = sb.span;
    o.status = ObligationStatus::Assumed;
    o.note = "declared scope bound";
    r.assumptions.push_back(std::move(o));
  }
  for (auto& s : u.scripts) r.scripts.push_back(check_script(u, s));
  return r;
}

std::string report_text(const Unit& u, const UnitReport& r) {
  std::string out;
  for (auto& a : r.assumptions) {
    out += "assumption " + std::to_string(a.id) + " at " + u.file + ":" +
           std::to_string(a.origin.line) + " (" +
           obligation_kind_str(a.kind) + "): " + print_formula(a.goal) +
           " -- " + obligation_status_str(a) + "\n";
  }
  for (auto& s : r.scripts) {
    for (auto& o : s.obligations) {
      out += "obligation " + std::to_string(o.id) + " at " + u.file + ":" +
             std::to_string(o.origin.line) + " (" +
             obligation_kind_str(o.kind) + "): " + print_formula(o.goal) +
             " -- " + obligation_status_str(o) + "\n";
    }
    if (s.scope_extension_used)
      out += "note: a union scope was used for a disjunctive or existential "
             "formula\n";
    out += "script " + s.name + ": ";
    if (s.checked) {
      out += "checked, obligations " +
             std::to_string(s.count(ObligationStatus::Discharged)) +
             " discharged / " +
             std::to_string(s.count(ObligationStatus::Assumed)) +
             " assumed / " + std::to_string(s.count(ObligationStatus::Open)) +
             " open\n";
    } else {
      out += "failed at " + u.file + ":" +
             std::to_string(s.error_span.line) + ": " + s.error + "\n";
    }
  }
  return out;
}

std::string report_lines(const Unit& u, const UnitReport& r) {
  std::string out;
  for (auto& a : r.assumptions)
    out += u.file + ":" + std::to_string(a.origin.line) + ": assumption " +
           std::to_string(a.id) + " " + obligation_kind_str(a.kind) + " " +
           obligation_status_str(a) + "\n";
  for (auto& s : r.scripts) {
    if (!s.checked) {
      out += u.file + ":" + std::to_string(s.error_span.line) + ": script " +
             s.name + " failed: " + s.error + "\n";
      continue;
    }
    for (auto& o : s.obligations)
      out += u.file + ":" + std::to_string(o.origin.line) + ": obligation " +
             s.name + "/" + std::to_string(o.id) + " " +
             obligation_kind_str(o.kind) + " " + obligation_status_str(o) +
             "\n";
  }
  return out;
}

}  // namespace sl
