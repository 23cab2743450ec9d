#pragma once
// Property harnesses over random memory states, shared by the semantics
// suite (small runs) and the acceptance suite (full runs):
//   - scope exactness: evaluating the scope form of a term yields exactly
//     the unit addresses the evaluator reads for the term itself;
//   - scope idempotence and the frame property;
//   - the memory-model axioms (block structure, variable cells, record
//     fields, array elements);
//   - end-to-end execution of the tree-update program.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "sl/scope.hpp"
#include "test_util.hpp"

namespace props {

struct RunStats {
  long long cases = 0;     // instances actually checked (not skipped)
  long long failures = 0;
  std::string first;       // description of the first failure
};

inline void record(RunStats* r, const std::string& what) {
  if (r->failures++ == 0) r->first = what;
}

// Terms exercising every evaluator construct of the tree unit: variables,
// field reads, conditionals, recursive functions over the heap, binders,
// comprehensions (with and without filter) and block queries.
inline std::vector<std::string> tree_corpus() {
  return {
      "root",
      "pt",
      "k + d * 2",
      "pt->K",
      "pt->D - k",
      "root->l",
      "root->l->K",
      "pt != nil ? pt->K : k",
      "pt = nil ? 0 : (pt->K < k ? pt->D : d)",
      "{&pt} union FldD(root)",
      "MSet()",
      "NodeSet(root)",
      "NodeSet(pt) union NodeSet(root)",
      "Dom(root)",
      "Map(root)",
      "MapP(pt)",
      "MapU(root, pt, d)",
      "isHBST(root)",
      "MAX({k} union Dom(root))",
      "k in Dom(root)",
      "all y in NodeSet(root) . y->K > k",
      "union { {&y->D} | y in NodeSet(root) }",
      "union { Block(y) | y in NodeSet(root) when y->K < k }",
      "Block(pt)",
      "Block(&root) union Block(&k)",
      "Dom(root) inter Dom(pt)",
      "FldD(root) \\ {&pt->D}",
  };
}

inline std::vector<sl::TermPtr> parse_corpus(
    const sl::Unit& u, const std::vector<std::string>& texts) {
  std::vector<sl::TermPtr> out;
  for (auto& s : texts) out.push_back(testutil::term(u, s));
  return out;
}

// eval(scope(e)) == the address trace of eval(e), whenever both are
// defined. Fuel is kept small so cyclic random heaps bottom out quickly.
inline RunStats scope_exactness(const sl::Unit& u,
                                const std::vector<sl::TermPtr>& corpus,
                                int states, int fuel = 8) {
  RunStats r;
  for (int seed = 0; seed < states; ++seed) {
    std::map<std::string, sl::Address> va;
    sl::MemState st = sl::random_state(u, seed, &va);
    for (auto& e : corpus) {
      sl::Trace tr;
      sl::EvalCtx cx{u, st, nullptr, {}, va, fuel, &tr};
      sl::Value v = eval_term(cx, e);
      if (!v.defined()) continue;
      sl::TermPtr m = sl::scope_of_term(u, e);
      sl::EvalCtx cs{u, st, nullptr, {}, va, fuel, nullptr};
      sl::Value sv = eval_term(cs, m);
      if (!sv.defined()) continue;
      std::set<sl::Address> want;
      if (!testutil::address_set(sv, &want)) {
        record(&r, "scope of " + sl::print_term(e) +
                       " is not an address set (seed " +
                       std::to_string(seed) + ")");
        continue;
      }
      ++r.cases;
      if (tr != want)
        record(&r, "trace/scope mismatch for " + sl::print_term(e) +
                       " at seed " + std::to_string(seed));
    }
  }
  return r;
}

// SCOPE-1: evaluating a scope form reads only units inside its own value.
// SCOPE-2: the scope of a scope form is contained in its value.
inline RunStats scope_idempotence(const sl::Unit& u,
                                  const std::vector<sl::TermPtr>& corpus,
                                  int states, int fuel = 8) {
  RunStats r;
  for (int seed = 0; seed < states; ++seed) {
    std::map<std::string, sl::Address> va;
    sl::MemState st = sl::random_state(u, seed, &va);
    for (auto& e : corpus) {
      sl::TermPtr m = sl::scope_of_term(u, e);
      sl::Trace tr;
      sl::EvalCtx cx{u, st, nullptr, {}, va, fuel, &tr};
      sl::Value mv = eval_term(cx, m);
      if (!mv.defined()) continue;
      std::set<sl::Address> mset;
      if (!testutil::address_set(mv, &mset)) continue;
      ++r.cases;
      if (!std::includes(mset.begin(), mset.end(), tr.begin(), tr.end())) {
        record(&r, "scope form of " + sl::print_term(e) +
                       " read outside its value (seed " +
                       std::to_string(seed) + ")");
        continue;
      }
      sl::TermPtr mm = sl::scope_of_term(u, m);
      sl::EvalCtx c2{u, st, nullptr, {}, va, fuel, nullptr};
      sl::Value mmv = eval_term(c2, mm);
      if (!mmv.defined()) continue;
      std::set<sl::Address> mmset;
      if (!testutil::address_set(mmv, &mmset)) continue;
      if (!std::includes(mset.begin(), mset.end(), mmset.begin(),
                         mmset.end()))
        record(&r, "scope of scope of " + sl::print_term(e) +
                       " escapes (seed " + std::to_string(seed) + ")");
    }
  }
  return r;
}

inline sl::Value mutated(const sl::Value& v, const sl::MemState& st) {
  switch (v.kind) {
    case sl::Value::Int:
      return sl::Value::of_int(v.i + 1);
    case sl::Value::Bool:
      return sl::Value::of_bool(!v.b);
    case sl::Value::Ptr:
      if (v.addr) return sl::Value::nil();
      for (long long b : st.heap) return sl::Value::of_ptr({b, {}});
      return v;  // nothing to retarget to
    default:
      return v;
  }
}

// Mutating any unit outside the value of the scope form never changes the
// evaluation of the term (including its definedness).
inline RunStats frame_property(const sl::Unit& u,
                               const std::vector<sl::TermPtr>& corpus,
                               int states, int fuel = 6) {
  RunStats r;
  for (int seed = 0; seed < states; ++seed) {
    std::map<std::string, sl::Address> va;
    sl::MemState st = sl::random_state(u, seed, &va);
    for (auto& e : corpus) {
      sl::TermPtr m = sl::scope_of_term(u, e);
      sl::EvalCtx cs{u, st, nullptr, {}, va, fuel, nullptr};
      sl::Value mv = eval_term(cs, m);
      if (!mv.defined()) continue;
      std::set<sl::Address> mset;
      if (!testutil::address_set(mv, &mset)) continue;
      sl::EvalCtx cx{u, st, nullptr, {}, va, fuel, nullptr};
      sl::Value before = eval_term(cx, e);
      for (auto& unit : st.units) {
        if (mset.count(unit.first)) continue;
        sl::Value nv = mutated(unit.second, st);
        if (nv.key() == unit.second.key()) continue;
        sl::MemState st2 = st;
        st2.units[unit.first] = nv;
        sl::EvalCtx c2{u, st2, nullptr, {}, va, fuel, nullptr};
        sl::Value after = eval_term(c2, e);
        ++r.cases;
        if (!testutil::same_result(before, after))
          record(&r, "mutating " + unit.first.str() + " outside scope of " +
                         sl::print_term(e) + " changed its value (seed " +
                         std::to_string(seed) + ")");
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Memory-model axioms

// Every pointer of the state: unit addresses plus the roots of the
// enclosing sub-blocks (record and array prefixes).
inline std::set<sl::Address> all_pointers(const sl::MemState& st) {
  std::set<sl::Address> out;
  for (auto& kv : st.units) {
    sl::Address a = kv.first;
    out.insert(a);
    while (!a.path.empty()) {
      a.path.pop_back();
      out.insert(a);
    }
  }
  return out;
}

inline std::set<sl::Address> block_of(const sl::Unit& u,
                                      const sl::MemState& st,
                                      const sl::Address& p) {
  sl::EvalCtx cx{u, st, nullptr, {}, {}, 8, nullptr};
  cx.env["x"] = sl::Value::of_ptr(p);
  static const sl::TermPtr q = sl::mk_apply("Block", {sl::mk_var("x")});
  std::set<sl::Address> out;
  testutil::address_set(eval_term(cx, q), &out);
  return out;
}

inline RunStats memory_axioms(const sl::Unit& u, int states) {
  RunStats r;
  for (int seed = 0; seed < states; ++seed) {
    std::map<std::string, sl::Address> va;
    sl::MemState st = sl::random_state(u, seed, &va);
    auto ptrs = all_pointers(st);
    std::map<sl::Address, std::set<sl::Address>> blk;
    for (auto& p : ptrs) blk[p] = block_of(u, st, p);

    // access: every stored non-nil pointer names a live object
    for (auto& kv : st.units) {
      if (kv.second.kind != sl::Value::Ptr || !kv.second.addr) continue;
      ++r.cases;
      if (blk.count(*kv.second.addr)
              ? blk[*kv.second.addr].empty()
              : block_of(u, st, *kv.second.addr).empty())
        record(&r, "dangling pointer in " + kv.first.str());
    }

    // block trichotomy: distinct pointers have disjoint or strictly
    // nested blocks
    for (auto i = ptrs.begin(); i != ptrs.end(); ++i)
      for (auto j = std::next(i); j != ptrs.end(); ++j) {
        const auto &a = blk[*i], &b = blk[*j];
        bool disjoint = true;
        for (auto& x : a)
          if (b.count(x)) {
            disjoint = false;
            break;
          }
        bool a_in_b = !disjoint && a.size() < b.size() &&
                      std::includes(b.begin(), b.end(), a.begin(), a.end());
        bool b_in_a = !disjoint && b.size() < a.size() &&
                      std::includes(a.begin(), a.end(), b.begin(), b.end());
        ++r.cases;
        if (!disjoint && !a_in_b && !b_in_a)
          record(&r, "blocks of " + i->str() + " and " + j->str() +
                         " overlap without nesting (seed " +
                         std::to_string(seed) + ")");
      }

    // variable cells: live, pairwise distinct, and no variable's block
    // sits strictly inside another block
    for (auto& v : va) {
      ++r.cases;
      if (blk[v.second].empty())
        record(&r, "variable " + v.first + " has an empty block");
      for (auto& w : va)
        if (v.first < w.first && v.second == w.second)
          record(&r, "variables " + v.first + " and " + w.first +
                         " share an address");
      const auto& vb = blk[v.second];
      for (auto& p : ptrs) {
        const auto& pb = blk[p];
        if (vb.size() < pb.size() &&
            std::includes(pb.begin(), pb.end(), vb.begin(), vb.end()))
          record(&r, "variable block of " + v.first +
                         " nested inside block of " + p.str());
      }
    }

    // record fields / array elements: every component of a live block is
    // itself live, and distinct components have disjoint blocks
    std::set<long long> blocks;
    for (auto& kv : st.units) blocks.insert(kv.first.block);
    for (long long b : blocks) {
      std::set<std::string> heads;
      for (auto& ad : st.addresses_of(b))
        if (!ad.path.empty()) heads.insert(ad.path[0]);
      std::vector<std::set<sl::Address>> comp;
      for (auto& h : heads) {
        sl::Address f{b, {h}};
        auto fb = blk.count(f) ? blk[f] : block_of(u, st, f);
        ++r.cases;
        if (fb.empty())
          record(&r, "component " + f.str() + " of a live block is empty");
        comp.push_back(std::move(fb));
      }
      for (size_t i = 0; i < comp.size(); ++i)
        for (size_t j = i + 1; j < comp.size(); ++j) {
          ++r.cases;
          for (auto& x : comp[i])
            if (comp[j].count(x)) {
              record(&r, "sibling components of block " +
                             std::to_string(b) + " overlap");
              break;
            }
        }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// End-to-end run of the tree-update program

// A well-formed search tree over distinct keys; returns the key list.
inline std::vector<long long> build_bst(const sl::Unit& u, sl::MemState* st,
                                        std::map<std::string, sl::Address>* va,
                                        std::mt19937_64* rng) {
  const sl::TypePtr* node = u.find_typedef("Node");
  for (auto& v : u.vars) {
    long long b = st->alloc_block(u, v.second);
    (*va)[v.first] = sl::Address{b, {}};
  }
  int n = 1 + static_cast<int>((*rng)() % 8);
  std::vector<long long> keys;
  while (static_cast<int>(keys.size()) < n) {
    long long k = static_cast<long long>((*rng)() % 200) - 100;
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      keys.push_back(k);
  }
  long long root = 0;
  for (long long k : keys) {
    long long b = st->alloc_block(u, *node);
    st->heap.insert(b);
    st->units[{b, {"K"}}] = sl::Value::of_int(k);
    st->units[{b, {"D"}}] =
        sl::Value::of_int(static_cast<long long>((*rng)() % 50));
    if (root == 0) {
      root = b;
      continue;
    }
    long long cur = root;
    for (;;) {
      long long ck = st->units[{cur, {"K"}}].i;
      std::string side = k < ck ? "l" : "r";
      sl::Value& link = st->units[{cur, {side}}];
      if (!link.addr) {
        link = sl::Value::of_ptr({b, {}});
        break;
      }
      cur = link.addr->block;
    }
  }
  st->units[(*va)["root"]] = sl::Value::of_ptr({root, {}});
  return keys;
}

// Execute the update script's program from random search trees containing
// the looked-up key; the final map must be the old map overridden at k, and
// only the cursor variable and data fields may have changed.
inline RunStats tree_update_end_to_end(const sl::Unit& u, int runs) {
  RunStats r;
  const sl::ProofScript& script = testutil::script_named(u, "bst_update");
  sl::FormulaPtr spec =
      testutil::formula(u, "Map(root) = old(Map(root)) ++ {k |-> d}");
  sl::TermPtr writable = testutil::term(u, "{&pt} union FldD(root)");
  for (int run = 0; run < runs; ++run) {
    std::mt19937_64 rng(run);
    sl::MemState st;
    std::map<std::string, sl::Address> va;
    std::vector<long long> keys = build_bst(u, &st, &va, &rng);
    st.units[va["k"]] = sl::Value::of_int(keys[rng() % keys.size()]);
    st.units[va["d"]] = sl::Value::of_int(static_cast<long long>(rng() % 50));
    sl::MemState pre = st;

    std::string err;
    sl::EvalCtx cx{u, st, nullptr, {}, va, 64, nullptr};
    sl::MemState post = exec_items(cx, st, script.items, &err);
    ++r.cases;
    if (!err.empty()) {
      record(&r, "run " + std::to_string(run) + " faulted: " + err);
      continue;
    }
    sl::EvalCtx fin{u, post, &pre, {}, va, 64, nullptr};
    if (eval_formula(fin, spec) != sl::Tri::True) {
      record(&r, "run " + std::to_string(run) +
                     ": final map is not the overridden old map");
      continue;
    }
    sl::EvalCtx pc{u, pre, nullptr, {}, va, 64, nullptr};
    std::set<sl::Address> frame;
    if (!testutil::address_set(eval_term(pc, writable), &frame)) {
      record(&r, "run " + std::to_string(run) + ": frame set not evaluable");
      continue;
    }
    for (auto& kv : post.units) {
      auto it = pre.units.find(kv.first);
      bool changed =
          it == pre.units.end() || !testutil::same_result(it->second, kv.second);
      if (changed && !frame.count(kv.first))
        record(&r, "run " + std::to_string(run) + " wrote " + kv.first.str() +
                       " outside the declared frame");
    }
  }
  return r;
}

}  // namespace props
