// slc: command line driver for the scope-annotated proof toolkit.
//
//   slc check <files...>   parse, typecheck and verify the proof scripts
//   slc msf <file> [fn..]  print derived scope functions
//   slc eval <file>        run a unit's programs on random states
//   slc selftest <files..> randomized scope-soundness checks
//   slc fmt <file>         parse and re-print a unit in core form

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sl/checker.hpp"
#include "sl/frontend.hpp"
#include "sl/logic.hpp"
#include "sl/scope.hpp"
#include "sl/sem.hpp"
#include "sl/types.hpp"

using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

sl::Unit load_unit(const std::string& path) {
  sl::Unit u = sl::parse_unit(slurp(path), path);
  u = sl::expand_abbreviations(u);
  sl::check_unit(u);
  return u;
}

const char* kind_name(sl::ErrorKind k) {
  switch (k) {
    case sl::ErrorKind::Parse: return "parse error";
    case sl::ErrorKind::Type: return "type error";
    case sl::ErrorKind::RuleMismatch: return "rule mismatch";
    case sl::ErrorKind::PreStateLeak: return "pre-state leak";
    case sl::ErrorKind::UnknownScope: return "unknown scope";
    default: return "internal error";
  }
}

json obligation_json(const sl::Obligation& o, const std::string& file) {
  json h = json::array();
  for (auto& hy : o.hyps) h.push_back(sl::print_formula(hy));
  return json{{"id", o.id},
              {"kind", sl::obligation_kind_str(o.kind)},
              {"hyps", h},
              {"goal", sl::print_formula(o.goal)},
              {"file", file},
              {"line", o.origin.line},
              {"status", sl::obligation_status_str(o)},
              {"note", o.note}};
}

int cmd_check(const std::vector<std::string>& files, const std::string& fmt,
              bool fail_on_open, const std::string& obligations_path) {
  bool any_error = false, any_open = false;
  json all = json::array();
  for (auto& path : files) {
    sl::Unit u;
    try {
      u = load_unit(path);
    } catch (const sl::Error& e) {
      std::cout << path << ":" << e.span.line << ": " << kind_name(e.kind)
                << ": " << e.message << "\n";
      any_error = true;
      continue;
    } catch (const std::exception& e) {
      std::cout << "error: " << e.what() << "\n";
      any_error = true;
      continue;
    }
    sl::UnitReport r = sl::check_unit_scripts(u);
    std::cout << (fmt == "lines" ? sl::report_lines(u, r)
                                 : sl::report_text(u, r));
    if (!r.all_checked()) any_error = true;
    if (r.has_open()) any_open = true;
    json ju{{"file", path}, {"assumptions", json::array()},
            {"scripts", json::array()}};
    for (auto& a : r.assumptions)
      ju["assumptions"].push_back(obligation_json(a, path));
    for (auto& s : r.scripts) {
      json js{{"name", s.name},
              {"checked", s.checked},
              {"obligations", json::array()}};
      if (!s.checked) {
        js["error"] = s.error;
        js["error_kind"] = kind_name(s.error_kind);
        js["line"] = s.error_span.line;
      }
      for (auto& o : s.obligations)
        js["obligations"].push_back(obligation_json(o, path));
      ju["scripts"].push_back(std::move(js));
    }
    all.push_back(std::move(ju));
  }
  if (!obligations_path.empty()) {
    std::ofstream out(obligations_path);
    out << all.dump(2) << "\n";
  }
  if (any_error) return 1;
  if (any_open && fail_on_open) return 2;
  return 0;
}

int cmd_msf(const std::string& path, std::vector<std::string> fns) {
  sl::Unit u = load_unit(path);
  if (fns.empty())
    for (auto& f : u.funcs) fns.push_back(f.name);
  for (auto& name : fns) {
    sl::FuncDef m = sl::derive_msf(u, name);
    std::cout << "scopef(" << name << ")(";
    for (size_t i = 0; i < m.params.size(); ++i)
      std::cout << (i ? ", " : "") << m.params[i].first;
    std::cout << ") = " << sl::print_term(m.body);
    if (sl::msf_is_recursive(u, name)) std::cout << "   [recursive]";
    std::cout << "\n";
  }
  return 0;
}

int cmd_eval(const std::string& path, std::uint64_t seed, int iters,
             int fuel) {
  sl::Unit u = load_unit(path);
  for (auto& script : u.scripts) {
    int ran = 0, pre_true = 0, post_true = 0, errors = 0;
    for (int it = 0; it < iters; ++it) {
      std::map<std::string, sl::Address> va;
      sl::MemState st = sl::random_state(u, seed + it, &va);
      sl::EvalCtx cx{u, st};
      cx.var_addr = va;
      cx.fuel = fuel;
      // find the leading assertion
      const sl::FormulaPtr* pre = nullptr;
      for (auto& item : script.items)
        if (item.kind == sl::ItemKind::Assert) {
          pre = &item.formula;
          break;
        }
      if (pre && sl::eval_formula(cx, *pre) != sl::Tri::True) continue;
      ++pre_true;
      std::string err;
      sl::MemState post = sl::exec_items(cx, st, script.items, &err);
      ++ran;
      if (!err.empty()) {
        ++errors;
        continue;
      }
      const sl::FormulaPtr* fin = nullptr;
      for (auto& item : script.items)
        if (item.kind == sl::ItemKind::Assert) fin = &item.formula;
      if (fin) {
        sl::EvalCtx pcx{u, post};
        pcx.pre = &st;
        pcx.var_addr = va;
        pcx.fuel = fuel;
        if (sl::eval_formula(pcx, *fin) == sl::Tri::True) ++post_true;
      }
    }
    std::cout << "program " << script.name << ": " << pre_true << "/" << iters
              << " states satisfied the precondition, " << ran - errors
              << " ran to completion, " << post_true
              << " satisfied the final assertion, " << errors
              << " runtime errors\n";
  }
  return 0;
}

// For every defined function, evaluate its body on random states and check
// that every unit the evaluation read is in the evaluated scope set.
int cmd_selftest(const std::vector<std::string>& files, std::uint64_t seed,
                 int iters, int fuel) {
  int failures = 0;
  for (auto& path : files) {
    sl::Unit u = load_unit(path);
    for (auto& f : u.funcs) {
      if (f.is_abstract || f.params.size() != 1) continue;
      int checked = 0;
      for (int it = 0; it < iters; ++it) {
        std::map<std::string, sl::Address> va;
        sl::MemState st = sl::random_state(u, seed + it, &va);
        // apply f to each program variable of a compatible pointer type
        for (auto& v : u.vars) {
          if (!sl::type_compat(u, v.second, f.params[0].second)) continue;
          sl::TermPtr arg =
              sl::mk_deref(sl::mk_varaddr(v.first), sl::Span{});
          sl::TermPtr app = sl::mk_apply(f.name, {arg}, sl::Span{});
          sl::Trace tr;
          sl::EvalCtx cx{u, st};
          cx.var_addr = va;
          cx.fuel = fuel;
          cx.trace = &tr;
          sl::Value val = sl::eval_term(cx, app);
          if (!val.defined()) continue;
          sl::EvalCtx cx2{u, st};
          cx2.var_addr = va;
          cx2.fuel = fuel;
          sl::Value sc = sl::eval_term(
              cx2, sl::expand_term(
                       u, sl::mk_msf(f.name, {arg}, sl::Span{})));
          if (!sc.defined()) continue;
          ++checked;
          std::set<std::string> scope_keys;
          for (auto& e : sc.elems)
            if (e.kind == sl::Value::Ptr && e.addr)
              scope_keys.insert(e.addr->str());
          for (auto& a : tr)
            if (!scope_keys.count(a.str())) {
              std::cout << path << ": " << f.name << "(" << v.first
                        << ") read " << a.str()
                        << " outside its scope (seed " << (seed + it)
                        << ")\n";
              ++failures;
            }
        }
      }
      std::cout << path << ": " << f.name << ": " << checked
                << " applications traced\n";
    }
  }
  std::cout << (failures ? "selftest FAILED\n" : "selftest ok\n");
  return failures ? 1 : 0;
}

void print_type(std::ostream& os, const sl::TypePtr& t) {
  os << sl::type_str(t);
}

int cmd_fmt(const std::string& path) {
  sl::Unit u = sl::expand_abbreviations(sl::parse_unit(slurp(path), path));
  std::ostream& os = std::cout;
  for (auto& td : u.typedefs) {
    os << "type " << td.first << " = ";
    print_type(os, td.second);
    os << ";\n";
  }
  for (auto& v : u.vars) {
    os << "var " << v.first << ": ";
    print_type(os, v.second);
    os << ";\n";
  }
  for (auto& f : u.funcs) {
    os << (f.is_abstract ? "abstract " : "rec ") << f.name << "(";
    for (size_t i = 0; i < f.params.size(); ++i) {
      os << (i ? ", " : "") << f.params[i].first << ": ";
      print_type(os, f.params[i].second);
    }
    os << "): ";
    print_type(os, f.ret);
    if (f.is_abstract) {
      if (f.scope_term) os << " scope " << sl::print_term(f.scope_term);
      os << ";\n";
    } else {
      os << " := " << sl::print_term(f.body) << ";\n";
    }
  }
  for (auto& sb : u.scope_bounds) {
    os << "scopebound " << sb.fn << " within " << sl::print_term(sb.bound);
    if (sb.guard) os << " when " << sl::print_formula(sb.guard);
    os << ";\n";
  }
  for (auto& l : u.lemmas)
    os << "lemma " << l.name << ": " << sl::print_formula(l.formula) << ";\n";
  struct P {
    std::ostream& os;
    void items(const std::vector<sl::ScriptItem>& is, int d) {
      std::string in(d * 2, ' ');
      for (auto& it : is) {
        switch (it.kind) {
          case sl::ItemKind::Assert:
            os << in << "{ " << sl::print_formula(it.formula) << " }\n";
            break;
          case sl::ItemKind::Conseq: {
            os << in << "=>";
            if (!it.by.empty()) {
              os << "[";
              for (size_t i = 0; i < it.by.size(); ++i)
                os << (i ? ", " : "") << it.by[i];
              os << "]";
            }
            os << " { " << sl::print_formula(it.formula) << " }\n";
            break;
          }
          case sl::ItemKind::SubUp:
            os << in << "sub+ " << it.name << " := " << sl::print_term(it.term)
               << ";\n";
            break;
          case sl::ItemKind::SubDown:
            os << in << "sub- " << it.name << " := " << sl::print_term(it.term)
               << ";\n";
            break;
          case sl::ItemKind::FrameUp:
            os << in << "frame+ $" << it.name << " := "
               << sl::print_formula(it.formula) << ";\n";
            break;
          case sl::ItemKind::FrameDown:
            os << in << "frame- $" << it.name << " := "
               << sl::print_formula(it.formula) << ";\n";
            break;
          case sl::ItemKind::Junction:
            os << in << it.name;
            if (it.term) os << " " << it.term->name;
            os << " {\n";
            items(it.block1, d + 1);
            os << in << "}";
            if (!it.block2.empty()) {
              os << " {\n";
              items(it.block2, d + 1);
              os << in << "}";
            }
            os << "\n";
            break;
          case sl::ItemKind::Statement:
            stmt(it.stmt, d);
            break;
        }
      }
    }
    void stmt(const sl::StmtPtr& s, int d) {
      std::string in(d * 2, ' ');
      switch (s->kind) {
        case sl::StmtKind::Skip:
          os << in << "skip;\n";
          break;
        case sl::StmtKind::Assign:
          os << in << "*(" << sl::print_term(s->target)
             << ") := " << sl::print_term(s->rhs) << ";\n";
          break;
        case sl::StmtKind::Alloc:
          os << in << "*(" << sl::print_term(s->target) << ") := alloc("
             << sl::type_str(s->alloc_type) << ");\n";
          break;
        case sl::StmtKind::If:
          os << in << "if (" << sl::print_term(s->cond) << ") {\n";
          items(s->body, d + 1);
          os << in << "}";
          if (!s->else_body.empty()) {
            os << " else {\n";
            items(s->else_body, d + 1);
            os << in << "}";
          }
          os << "\n";
          break;
        case sl::StmtKind::While:
          os << in << "while (" << sl::print_term(s->cond) << ") {\n";
          items(s->body, d + 1);
          os << in << "}\n";
          break;
      }
    }
  } p{os};
  for (auto& s : u.scripts) {
    os << "proof " << s.name << " {\n";
    p.items(s.items, 1);
    os << "}\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scope-annotated proof toolkit"};
  app.require_subcommand(1);

  std::vector<std::string> files, fns;
  std::string format = "text", obligations_path;
  bool fail_on_open = false;
  std::uint64_t seed = 1;
  int iters = 32, fuel = 64;

  auto* check = app.add_subcommand("check", "verify proof scripts");
  check->add_option("files", files, "input .sl files")->required();
  check->add_option("--format", format, "text|lines")
      ->check(CLI::IsMember({"text", "lines"}));
  check->add_flag("--fail-on-open", fail_on_open,
                  "exit 2 when any obligation stays open");
  check->add_option("--obligations", obligations_path,
                    "write all obligations as JSON to this file");

  std::string one_file;
  auto* msf = app.add_subcommand("msf", "print derived scope functions");
  msf->add_option("file", one_file, "input .sl file")->required();
  msf->add_option("functions", fns, "functions (default: all)");

  auto* ev = app.add_subcommand("eval", "run programs on random states");
  ev->add_option("file", one_file, "input .sl file")->required();
  ev->add_option("--seed", seed, "base random seed");
  ev->add_option("--iters", iters, "number of random states");
  ev->add_option("--fuel", fuel, "recursion fuel for evaluation");

  auto* self = app.add_subcommand("selftest", "randomized scope soundness");
  self->add_option("files", files, "input .sl files")->required();
  self->add_option("--seed", seed, "base random seed");
  self->add_option("--iters", iters, "number of random states");
  self->add_option("--fuel", fuel, "recursion fuel for evaluation");

  auto* fmt = app.add_subcommand("fmt", "re-print a unit in core form");
  fmt->add_option("file", one_file, "input .sl file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed())
      return cmd_check(files, format, fail_on_open, obligations_path);
    if (msf->parsed()) return cmd_msf(one_file, fns);
    if (ev->parsed()) return cmd_eval(one_file, seed, iters, fuel);
    if (self->parsed()) return cmd_selftest(files, seed, iters, fuel);
    if (fmt->parsed()) return cmd_fmt(one_file);
  } catch (const sl::Error& e) {
    std::cerr << kind_name(e.kind) << " at line " << e.span.line << ": "
              << e.message << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
