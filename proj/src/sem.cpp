#include "sl/sem.hpp"

#include <algorithm>
#include <random>

#include "sl/scope.hpp"
#include "sl/types.hpp"

namespace sl {

std::string Address::str() const {
  std::string s = "b" + std::to_string(block);
  for (auto& p : path) s += "." + p;
  return s;
}

Value Value::undef(UndefReason r) {
  Value v;
  v.kind = Undef;
  v.reason = r;
  return v;
}
Value Value::of_int(long long x) {
  Value v;
  v.kind = Int;
  v.i = x;
  return v;
}
Value Value::of_bool(bool x) {
  Value v;
  v.kind = Bool;
  v.b = x;
  return v;
}
Value Value::nil() {
  Value v;
  v.kind = Ptr;
  return v;
}
Value Value::of_ptr(Address a) {
  Value v;
  v.kind = Ptr;
  v.addr = std::move(a);
  return v;
}
Value Value::of_set(std::vector<Value> es) {
  std::sort(es.begin(), es.end(),
            [](const Value& a, const Value& b) { return a.key() < b.key(); });
  es.erase(std::unique(es.begin(), es.end(),
                       [](const Value& a, const Value& b) {
                         return a.key() == b.key();
                       }),
           es.end());
  Value v;
  v.kind = Set;
  v.elems = std::move(es);
  return v;
}
Value Value::of_seq(std::vector<Value> es) {
  Value v;
  v.kind = Seq;
  v.elems = std::move(es);
  return v;
}
Value Value::of_map(std::vector<std::pair<Value, Value>> es) {
  std::map<std::string, std::pair<Value, Value>> m;
  for (auto& kv : es) m[kv.first.key()] = kv;  // later entries override
  Value v;
  v.kind = MapV;
  for (auto& kv : m) v.entries.push_back(kv.second);
  return v;
}

std::string Value::key() const {
  switch (kind) {
    case Int:
      return "i:" + std::to_string(i);
    case Bool:
      return b ? "b:1" : "b:0";
    case Ptr:
      return addr ? "p:" + addr->str() : "p:nil";
    case Set: {
      std::string s = "s:{";
      for (auto& e : elems) s += e.key() + ",";
      return s + "}";
    }
    case Seq: {
      std::string s = "q:[";
      for (auto& e : elems) s += e.key() + ",";
      return s + "]";
    }
    case MapV: {
      std::string s = "m:{";
      for (auto& kv : entries) s += kv.first.key() + "=>" + kv.second.key() + ",";
      return s + "}";
    }
    case Undef:
      return "u:" + std::to_string(static_cast<int>(reason));
  }
  return "?";
}

std::string value_str(const Value& v) {
  switch (v.kind) {
    case Value::Int:
      return std::to_string(v.i);
    case Value::Bool:
      return v.b ? "true" : "false";
    case Value::Ptr:
      return v.addr ? v.addr->str() : "nil";
    case Value::Set: {
      std::string s = "{";
      for (size_t i = 0; i < v.elems.size(); ++i)
        s += (i ? ", " : "") + value_str(v.elems[i]);
      return s + "}";
    }
    case Value::Seq: {
      std::string s = "[";
      for (size_t i = 0; i < v.elems.size(); ++i)
        s += (i ? ", " : "") + value_str(v.elems[i]);
      return s + "]";
    }
    case Value::MapV: {
      std::string s = "{";
      for (size_t i = 0; i < v.entries.size(); ++i)
        s += (i ? ", " : "") + value_str(v.entries[i].first) + " |-> " +
             value_str(v.entries[i].second);
      return s + "}";
    }
    case Value::Undef:
      switch (v.reason) {
        case UndefReason::NilDeref: return "undef(nil-deref)";
        case UndefReason::FuelExhausted: return "undef(fuel)";
        case UndefReason::GuardUndefined: return "undef(guard)";
        case UndefReason::PartialOp: return "undef(partial)";
        case UndefReason::NotEvaluable: return "undef(symbolic)";
      }
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Block layout

namespace {

void layout(const Unit& u, const TypePtr& t0, std::vector<std::string> prefix,
            std::vector<std::pair<Address, TypePtr>>& out, long long block) {
  TypePtr t = resolve_type(u, t0);
  switch (t->kind) {
    case TypeKind::Record:
      for (auto& f : t->fields) {
        auto p = prefix;
        p.push_back(f.first);
        layout(u, f.second, std::move(p), out, block);
      }
      return;
    case TypeKind::Array:
      for (long long i = 0; i < t->len; ++i) {
        auto p = prefix;
        p.push_back(std::to_string(i));
        layout(u, t->elem, std::move(p), out, block);
      }
      return;
    default:
      out.push_back({Address{block, std::move(prefix)}, t});
      return;
  }
}

Value default_value(const TypePtr& t, long long int_default) {
  switch (t->kind) {
    case TypeKind::Bool:
      return Value::of_bool(false);
    case TypeKind::PtrTo:
    case TypeKind::PtrTop:
      return Value::nil();
    default:
      return Value::of_int(int_default);
  }
}

}  // namespace

long long MemState::alloc_block(const Unit& u, const TypePtr& t,
                                long long int_default) {
  long long b = next_block++;
  std::vector<std::pair<Address, TypePtr>> cells;
  layout(u, t, {}, cells, b);
  auto& paths = block_units[b];
  for (auto& cell : cells) {
    units[cell.first] = default_value(cell.second, int_default);
    std::string joined;
    for (auto& p : cell.first.path) joined += (joined.empty() ? "" : ".") + p;
    paths.push_back(joined);
  }
  return b;
}

std::vector<Address> MemState::addresses_of(long long block) const {
  std::vector<Address> out;
  for (auto it = units.lower_bound(Address{block, {}});
       it != units.end() && it->first.block == block; ++it)
    out.push_back(it->first);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

Tri tri_of(const Value& v) {
  if (v.kind == Value::Bool) return v.b ? Tri::True : Tri::False;
  return Tri::Undefined;
}

Value tri_val(Tri t) {
  switch (t) {
    case Tri::True: return Value::of_bool(true);
    case Tri::False: return Value::of_bool(false);
    case Tri::Undefined: return Value::undef(UndefReason::PartialOp);
  }
  return Value::undef(UndefReason::PartialOp);
}

Tri tri_and(Tri a, Tri b) {
  if (a == Tri::False || b == Tri::False) return Tri::False;
  if (a == Tri::True && b == Tri::True) return Tri::True;
  return Tri::Undefined;
}
Tri tri_or(Tri a, Tri b) {
  if (a == Tri::True || b == Tri::True) return Tri::True;
  if (a == Tri::False && b == Tri::False) return Tri::False;
  return Tri::Undefined;
}
Tri tri_not(Tri a) {
  if (a == Tri::True) return Tri::False;
  if (a == Tri::False) return Tri::True;
  return Tri::Undefined;
}

bool set_contains(const Value& s, const Value& e) {
  for (auto& x : s.elems)
    if (x.key() == e.key()) return true;
  return false;
}

Value eval_builtin(EvalCtx& cx, const std::string& op,
                   std::vector<Value>& a, const MemState& st) {
  auto ints = [&](size_t n) {
    for (size_t i = 0; i < n; ++i)
      if (a[i].kind != Value::Int) return false;
    return true;
  };
  // non-strict connectives first
  if (op == "&&") return tri_val(tri_and(tri_of(a[0]), tri_of(a[1])));
  if (op == "||") return tri_val(tri_or(tri_of(a[0]), tri_of(a[1])));
  if (op == "!") return tri_val(tri_not(tri_of(a[0])));
  for (auto& v : a)
    if (!v.defined()) return v;  // strict otherwise
  if (op == "+" && ints(2)) return Value::of_int(a[0].i + a[1].i);
  if (op == "-" && ints(2)) return Value::of_int(a[0].i - a[1].i);
  if (op == "*" && ints(2)) return Value::of_int(a[0].i * a[1].i);
  if (op == "/" && ints(2))
    return a[1].i == 0 ? Value::undef(UndefReason::PartialOp)
                       : Value::of_int(a[0].i / a[1].i);
  if (op == "neg" && ints(1)) return Value::of_int(-a[0].i);
  if (op == "<" && ints(2)) return Value::of_bool(a[0].i < a[1].i);
  if (op == "<=" && ints(2)) return Value::of_bool(a[0].i <= a[1].i);
  if (op == ">" && ints(2)) return Value::of_bool(a[0].i > a[1].i);
  if (op == ">=" && ints(2)) return Value::of_bool(a[0].i >= a[1].i);
  if (op == "=") return Value::of_bool(a[0].key() == a[1].key());
  if (op == "!=") return Value::of_bool(a[0].key() != a[1].key());
  if (op == "union" && a[0].kind == Value::Set && a[1].kind == Value::Set) {
    auto es = a[0].elems;
    es.insert(es.end(), a[1].elems.begin(), a[1].elems.end());
    return Value::of_set(std::move(es));
  }
  if (op == "inter" && a[0].kind == Value::Set && a[1].kind == Value::Set) {
    std::vector<Value> es;
    for (auto& e : a[0].elems)
      if (set_contains(a[1], e)) es.push_back(e);
    return Value::of_set(std::move(es));
  }
  if (op == "\\" && a[0].kind == Value::Set && a[1].kind == Value::Set) {
    std::vector<Value> es;
    for (auto& e : a[0].elems)
      if (!set_contains(a[1], e)) es.push_back(e);
    return Value::of_set(std::move(es));
  }
  if (op == "in" && a[1].kind == Value::Set)
    return Value::of_bool(set_contains(a[1], a[0]));
  if ((op == "subset" || op == "psubset") && a[0].kind == Value::Set &&
      a[1].kind == Value::Set) {
    for (auto& e : a[0].elems)
      if (!set_contains(a[1], e)) return Value::of_bool(false);
    if (op == "psubset")
      return Value::of_bool(a[0].elems.size() < a[1].elems.size());
    return Value::of_bool(true);
  }
  // the untyped empty literal {} evaluates as an empty set; map operators
  // accept it as the empty map
  for (auto& v : a)
    if (op == "++" && v.kind == Value::Set && v.elems.empty())
      v = Value::of_map({});
  if (op == "++" && a[0].kind == Value::MapV && a[1].kind == Value::MapV) {
    auto es = a[0].entries;
    es.insert(es.end(), a[1].entries.begin(), a[1].entries.end());
    return Value::of_map(std::move(es));
  }
  if (op == "rng") {
    if (a[0].kind == Value::Seq) return Value::of_set(a[0].elems);
    if (a[0].kind == Value::MapV) {
      std::vector<Value> es;
      for (auto& kv : a[0].entries) es.push_back(kv.second);
      return Value::of_set(std::move(es));
    }
  }
  if (op == "head" && a[0].kind == Value::Seq)
    return a[0].elems.empty() ? Value::undef(UndefReason::PartialOp)
                              : a[0].elems.front();
  if (op == "tail" && a[0].kind == Value::Seq) {
    if (a[0].elems.empty()) return Value::undef(UndefReason::PartialOp);
    return Value::of_seq({a[0].elems.begin() + 1, a[0].elems.end()});
  }
  if (op == "cons" && a[1].kind == Value::Seq) {
    std::vector<Value> es{a[0]};
    es.insert(es.end(), a[1].elems.begin(), a[1].elems.end());
    return Value::of_seq(std::move(es));
  }
  if ((op == "MAX" || op == "MIN") && a[0].kind == Value::Set) {
    if (a[0].elems.empty()) return Value::undef(UndefReason::PartialOp);
    long long best = 0;
    bool first = true;
    for (auto& e : a[0].elems) {
      if (e.kind != Value::Int) return Value::undef(UndefReason::PartialOp);
      if (first || (op == "MAX" ? e.i > best : e.i < best)) best = e.i;
      first = false;
    }
    return Value::of_int(best);
  }
  if (op == "Block") {
    if (a[0].kind != Value::Ptr) return Value::undef(UndefReason::PartialOp);
    if (!a[0].addr) return Value::of_set({});  // Block(nil) = {}
    // the sub-block rooted at the address: every unit of the allocation
    // whose path extends the address's path (a scalar unit is its own block)
    const auto& pre = a[0].addr->path;
    std::vector<Value> es;
    for (auto& ad : st.addresses_of(a[0].addr->block)) {
      if (ad.path.size() < pre.size() ||
          !std::equal(pre.begin(), pre.end(), ad.path.begin()))
        continue;
      es.push_back(Value::of_ptr(ad));
    }
    return Value::of_set(std::move(es));
  }
  if (op == "InHeap") {
    if (a[0].kind != Value::Ptr) return Value::undef(UndefReason::PartialOp);
    return Value::of_bool(a[0].addr && st.heap.count(a[0].addr->block) > 0);
  }
  return Value::undef(UndefReason::PartialOp);
}

}  // namespace

Value eval_term(EvalCtx& cx, const TermPtr& t) {
  switch (t->kind) {
    case TermKind::IntLit:
      return Value::of_int(t->ival);
    case TermKind::BoolLit:
      return Value::of_bool(t->bval);
    case TermKind::NilLit:
      return Value::nil();
    case TermKind::Var: {
      auto it = cx.env.find(t->name);
      return it != cx.env.end() ? it->second
                                : Value::undef(UndefReason::NotEvaluable);
    }
    case TermKind::VarAddr: {
      auto it = cx.var_addr.find(t->name);
      return it != cx.var_addr.end() ? Value::of_ptr(it->second)
                                     : Value::undef(UndefReason::NotEvaluable);
    }
    case TermKind::Deref: {
      Value a = eval_term(cx, t->args[0]);
      if (a.kind != Value::Ptr) return Value::undef(UndefReason::PartialOp);
      if (!a.addr) return Value::undef(UndefReason::NilDeref);
      if (cx.trace) cx.trace->insert(*a.addr);
      auto it = cx.st.units.find(*a.addr);
      if (it == cx.st.units.end()) return Value::undef(UndefReason::NilDeref);
      return it->second;
    }
    case TermKind::FieldAddr: {
      Value a = eval_term(cx, t->args[0]);
      if (a.kind != Value::Ptr) return Value::undef(UndefReason::PartialOp);
      if (!a.addr) return Value::undef(UndefReason::NilDeref);
      Address r = *a.addr;
      r.path.push_back(t->name);
      return Value::of_ptr(std::move(r));
    }
    case TermKind::IndexAddr: {
      Value a = eval_term(cx, t->args[0]);
      Value i = eval_term(cx, t->args[1]);
      if (a.kind != Value::Ptr || i.kind != Value::Int)
        return Value::undef(UndefReason::PartialOp);
      if (!a.addr) return Value::undef(UndefReason::NilDeref);
      Address r = *a.addr;
      r.path.push_back(std::to_string(i.i));
      if (!cx.st.units.count(r))
        return Value::undef(UndefReason::PartialOp);  // out of bounds
      return Value::of_ptr(std::move(r));
    }
    case TermKind::Apply: {
      const FuncDef* f =
          (t->is_msf || !cx.u.find_func(t->name)) ? nullptr
                                                  : cx.u.find_func(t->name);
      if (!f && !t->is_msf) {
        std::vector<Value> args;
        for (auto& a : t->args) args.push_back(eval_term(cx, a));
        return eval_builtin(cx, t->name, args, cx.st);
      }
      // user function or derived scope function
      const FuncDef* fd = cx.u.find_func(t->name);
      if (!fd) return Value::undef(UndefReason::NotEvaluable);
      TermPtr body;
      if (t->is_msf) {
        body = derive_msf(cx.u, t->name).body;
      } else if (fd->is_abstract) {
        return Value::undef(UndefReason::NotEvaluable);
      } else {
        body = fd->body;
      }
      if (cx.fuel <= 0) return Value::undef(UndefReason::FuelExhausted);
      EvalCtx sub = cx;
      sub.env.clear();
      for (size_t i = 0; i < fd->params.size(); ++i)
        sub.env[fd->params[i].first] = eval_term(cx, t->args[i]);
      sub.fuel = cx.fuel - 1;
      Value r = eval_term(sub, body);
      if (cx.trace && sub.trace == cx.trace) {
        // trace already shared
      }
      return r;
    }
    case TermKind::Cond: {
      Value g = eval_term(cx, t->args[0]);
      Tri tg = tri_of(g);
      if (tg == Tri::Undefined)
        return g.defined() ? Value::undef(UndefReason::GuardUndefined)
                           : Value::undef(UndefReason::GuardUndefined);
      return eval_term(cx, tg == Tri::True ? t->args[1] : t->args[2]);
    }
    case TermKind::Old: {
      EvalCtx sub = cx;
      static const MemState empty;
      if (cx.pre) {
        // re-seat the state reference: build a fresh context
        EvalCtx pcx{cx.u, *cx.pre, cx.pre, cx.env, cx.var_addr, cx.fuel,
                    nullptr};
        return eval_term(pcx, t->args[0]);
      }
      sub.trace = nullptr;
      return eval_term(sub, t->args[0]);
    }
    case TermKind::SetLit: {
      std::vector<Value> es;
      for (auto& a : t->args) {
        Value v = eval_term(cx, a);
        if (!v.defined()) return v;
        es.push_back(std::move(v));
      }
      return Value::of_set(std::move(es));
    }
    case TermKind::SeqLit: {
      std::vector<Value> es;
      for (auto& a : t->args) {
        Value v = eval_term(cx, a);
        if (!v.defined()) return v;
        es.push_back(std::move(v));
      }
      return Value::of_seq(std::move(es));
    }
    case TermKind::MapLit: {
      std::vector<std::pair<Value, Value>> es;
      for (size_t i = 0; i + 1 < t->args.size(); i += 2) {
        Value k = eval_term(cx, t->args[i]);
        Value v = eval_term(cx, t->args[i + 1]);
        if (!k.defined()) return k;
        if (!v.defined()) return v;
        es.emplace_back(std::move(k), std::move(v));
      }
      return Value::of_map(std::move(es));
    }
    case TermKind::ScopeOfPred:
      return Value::undef(UndefReason::NotEvaluable);
    case TermKind::ScopeOfTerm:
      return eval_term(cx, scope_of_term(cx.u, t->args[0]));
    case TermKind::ScopeOfFormula:
      return eval_term(cx, scope_of_formula(cx.u, t->farg));
    case TermKind::AllIn: {
      Value s = eval_term(cx, t->args[0]);
      if (s.kind != Value::Set)
        return s.defined() ? Value::undef(UndefReason::PartialOp) : s;
      Tri acc = Tri::True;
      for (auto& e : s.elems) {
        EvalCtx sub = cx;
        sub.env[t->name] = e;
        // no early exit: the read trace must cover every element, so that
        // evaluation reads exactly the scope of the term
        acc = tri_and(acc, tri_of(eval_term(sub, t->args[1])));
      }
      return tri_val(acc);
    }
    case TermKind::UnionComp: {
      Value s = eval_term(cx, t->args[0]);
      if (s.kind != Value::Set)
        return s.defined() ? Value::undef(UndefReason::PartialOp) : s;
      std::vector<Value> es;
      for (auto& e : s.elems) {
        EvalCtx sub = cx;
        sub.env[t->name] = e;
        if (t->args.size() > 2) {
          Tri keep = tri_of(eval_term(sub, t->args[2]));
          if (keep == Tri::Undefined)
            return Value::undef(UndefReason::GuardUndefined);
          if (keep == Tri::False) {
            // evaluate the body for its reads only: the scope of a
            // comprehension covers the body at every element of the domain
            eval_term(sub, t->args[1]);
            continue;
          }
        }
        Value b = eval_term(sub, t->args[1]);
        if (b.kind != Value::Set)
          return b.defined() ? Value::undef(UndefReason::PartialOp) : b;
        es.insert(es.end(), b.elems.begin(), b.elems.end());
      }
      return Value::of_set(std::move(es));
    }
    default:
      return Value::undef(UndefReason::NotEvaluable);
  }
}

Tri eval_formula(EvalCtx& cx, const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaKind::BoolTerm:
      return tri_of(eval_term(cx, f->t1));
    case FormulaKind::Eq: {
      Value a = eval_term(cx, f->t1), b = eval_term(cx, f->t2);
      if (!a.defined() || !b.defined()) return Tri::Undefined;
      return a.key() == b.key() ? Tri::True : Tri::False;
    }
    case FormulaKind::StrongEq: {
      Value a = eval_term(cx, f->t1), b = eval_term(cx, f->t2);
      if (!a.defined() && !b.defined()) return Tri::True;
      if (a.defined() != b.defined()) return Tri::False;
      return a.key() == b.key() ? Tri::True : Tri::False;
    }
    case FormulaKind::Defined:
      return eval_term(cx, f->t1).defined() ? Tri::True : Tri::False;
    case FormulaKind::And:
      return tri_and(eval_formula(cx, f->f1), eval_formula(cx, f->f2));
    case FormulaKind::Or:
      return tri_or(eval_formula(cx, f->f1), eval_formula(cx, f->f2));
    case FormulaKind::Not:
      return tri_not(eval_formula(cx, f->f1));
    case FormulaKind::Implies:
      return tri_or(tri_not(eval_formula(cx, f->f1)),
                    eval_formula(cx, f->f2));
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      if (!f->bound) return Tri::Undefined;
      Value s = eval_term(cx, f->bound);
      if (s.kind != Value::Set) return Tri::Undefined;
      Tri acc = f->kind == FormulaKind::Forall ? Tri::True : Tri::False;
      for (auto& e : s.elems) {
        EvalCtx sub = cx;
        sub.env[f->var] = e;
        Tri b = eval_formula(sub, f->f1);
        acc = f->kind == FormulaKind::Forall ? tri_and(acc, b)
                                             : tri_or(acc, b);
      }
      return acc;
    }
    case FormulaKind::PredVar:
      return Tri::Undefined;
    case FormulaKind::Outlying: {
      Tri body = eval_formula(cx, f->f1);
      Value sc = eval_term(cx, scope_of_formula(cx.u, f->f1));
      Value e = eval_term(cx, f->t1);
      if (sc.kind != Value::Set || e.kind != Value::Set)
        return tri_and(body, Tri::Undefined);
      bool disjoint = true;
      for (auto& x : sc.elems)
        if (set_contains(e, x)) disjoint = false;
      return tri_and(body, disjoint ? Tri::True : Tri::False);
    }
    case FormulaKind::FuncDefEq:
      return Tri::True;
  }
  return Tri::Undefined;
}

// ---------------------------------------------------------------------------
// Execution

namespace {

bool exec_stmt(EvalCtx& cx0, MemState& st, const StmtPtr& s, std::string* err);

bool run_items(EvalCtx& cx0, MemState& st,
               const std::vector<ScriptItem>& items, std::string* err) {
  for (auto& it : items) {
    if (it.kind == ItemKind::Statement) {
      if (!exec_stmt(cx0, st, it.stmt, err)) return false;
    } else if (it.kind == ItemKind::Junction) {
      if (!run_items(cx0, st, it.block1, err)) return false;
      // block2 of conj/disj annotates the same program; do not re-run it
    }
  }
  return true;
}

bool exec_stmt(EvalCtx& cx0, MemState& st, const StmtPtr& s,
               std::string* err) {
  EvalCtx cx{cx0.u, st, cx0.pre, cx0.env, cx0.var_addr, cx0.fuel, cx0.trace};
  switch (s->kind) {
    case StmtKind::Skip:
      return true;
    case StmtKind::Assign: {
      Value a = eval_term(cx, s->target);
      if (a.kind != Value::Ptr || !a.addr) {
        *err = "assignment through nil or undefined address";
        return false;
      }
      Value v = eval_term(cx, s->rhs);
      if (!v.defined()) {
        *err = "assignment of an undefined value: " + value_str(v);
        return false;
      }
      auto it = st.units.find(*a.addr);
      if (it == st.units.end()) {
        *err = "assignment to a non-existent unit " + a.addr->str();
        return false;
      }
      it->second = v;
      return true;
    }
    case StmtKind::Alloc: {
      Value a = eval_term(cx, s->target);
      if (a.kind != Value::Ptr || !a.addr) {
        *err = "alloc through nil or undefined address";
        return false;
      }
      long long b = st.alloc_block(cx.u, s->alloc_type);
      st.heap.insert(b);
      auto it = st.units.find(*a.addr);
      if (it == st.units.end()) {
        *err = "alloc target unit does not exist";
        return false;
      }
      it->second = Value::of_ptr(Address{b, {}});
      return true;
    }
    case StmtKind::If: {
      Tri g = tri_of(eval_term(cx, s->cond));
      if (g == Tri::Undefined) {
        *err = "if guard has no truth value";
        return false;
      }
      return run_items(cx0, st, g == Tri::True ? s->body : s->else_body, err);
    }
    case StmtKind::While: {
      for (int iter = 0; iter < 100000; ++iter) {
        EvalCtx c2{cx0.u, st, cx0.pre, cx0.env, cx0.var_addr, cx0.fuel,
                   cx0.trace};
        Tri g = tri_of(eval_term(c2, s->cond));
        if (g == Tri::Undefined) {
          *err = "while guard has no truth value";
          return false;
        }
        if (g == Tri::False) return true;
        if (!run_items(cx0, st, s->body, err)) return false;
      }
      *err = "while loop exceeded the iteration limit";
      return false;
    }
  }
  return true;
}

}  // namespace

MemState exec_items(EvalCtx cx, MemState st,
                    const std::vector<ScriptItem>& items, std::string* err) {
  err->clear();
  run_items(cx, st, items, err);
  return st;
}

// ---------------------------------------------------------------------------
// Random states

MemState random_state(const Unit& u, std::uint64_t seed,
                      std::map<std::string, Address>* var_addr) {
  std::mt19937_64 rng(seed);
  MemState st;

  // heap blocks for each record typedef
  std::map<std::string, std::vector<long long>> record_blocks;
  for (auto& td : u.typedefs) {
    TypePtr rt = resolve_type(u, td.second);
    if (rt->kind != TypeKind::Record) continue;
    int n = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) {
      long long b = st.alloc_block(u, rt);
      st.heap.insert(b);
      record_blocks[td.first].push_back(b);
    }
  }

  // program variable blocks
  std::map<std::string, long long> var_block;
  for (auto& v : u.vars) {
    long long b = st.alloc_block(u, v.second);
    var_block[v.first] = b;
    if (var_addr) {
      TypePtr rt = resolve_type(u, v.second);
      Address a{b, {}};
      (*var_addr)[v.first] = a;
    }
  }

  // wire pointers and randomize scalars
  auto pointee_name = [&](const TypePtr& t) -> std::string {
    if (t->kind != TypeKind::PtrTo) return "";
    if (t->elem && t->elem->kind == TypeKind::Named) return t->elem->name;
    return "";
  };
  auto randomize = [&](const TypePtr& t0, const Address& a) {
    TypePtr t = resolve_type(u, t0);
    if (t->kind == TypeKind::Int) {
      st.units[a] = Value::of_int(static_cast<long long>(rng() % 17) - 4);
    } else if (t->kind == TypeKind::Bool) {
      st.units[a] = Value::of_bool(rng() & 1);
    } else if (t->kind == TypeKind::PtrTo || t->kind == TypeKind::PtrTop) {
      std::string n = pointee_name(t);
      auto it = record_blocks.find(n);
      if (it != record_blocks.end() && (rng() % 3) != 0) {
        long long b = it->second[rng() % it->second.size()];
        st.units[a] = Value::of_ptr(Address{b, {}});
      } else {
        st.units[a] = Value::nil();
      }
    }
  };
  std::function<void(const TypePtr&, Address)> walk =
      [&](const TypePtr& t0, Address a) {
        TypePtr t = resolve_type(u, t0);
        if (t->kind == TypeKind::Record) {
          for (auto& f : t->fields) {
            Address p = a;
            p.path.push_back(f.first);
            walk(f.second, p);
          }
        } else if (t->kind == TypeKind::Array) {
          for (long long i = 0; i < t->len; ++i) {
            Address p = a;
            p.path.push_back(std::to_string(i));
            walk(t->elem, p);
          }
        } else {
          randomize(t, a);
        }
      };
  for (auto& td : u.typedefs) {
    auto it = record_blocks.find(td.first);
    if (it == record_blocks.end()) continue;
    for (long long b : it->second) walk(td.second, Address{b, {}});
  }
  for (auto& v : u.vars) walk(v.second, Address{var_block[v.first], {}});
  return st;
}

std::string dump_state(const MemState& st) {
  std::string out;
  for (auto& kv : st.units) {
    out += kv.first.str();
    if (st.heap.count(kv.first.block)) out += " (heap)";
    out += " = " + value_str(kv.second) + "\n";
  }
  return out;
}

}  // namespace sl
