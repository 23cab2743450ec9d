#include "sl/frontend.hpp"

#include <cctype>
#include <set>

namespace sl {
namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok {
  End, Ident, Int,
  LBrace, RBrace, LParen, RParen, LBracket, RBracket,
  Semi, Colon, Comma, Dot, Question, Dollar,
  Amp, Star, Plus, Minus, Slash, Backslash,
  Lt, Le, Gt, Ge, Eq, StrongEq, Ne, AndAnd, OrOr, Bang,
  Implies, Maplet, PlusPlus, Assign, Arrow, Bar,
};

struct Token {
  Tok kind;
  std::string text;
  long long ival = 0;
  Span span;
};

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  int line = 1, col = 1;

  explicit Lexer(const std::string& s) : src(s) {}

  char peek(size_t off = 0) const {
    return pos + off < src.size() ? src[pos + off] : '\0';
  }
  char advance() {
    char c = src[pos++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  }

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      while (pos < src.size()) {
        if (std::isspace((unsigned char)peek())) {
          advance();
        } else if (peek() == '/' && peek(1) == '/') {
          while (pos < src.size() && peek() != '\n') advance();
        } else {
          break;
        }
      }
      Span sp{line, col};
      if (pos >= src.size()) {
        out.push_back({Tok::End, "", 0, sp});
        return out;
      }
      char c = peek();
      if (std::isalpha((unsigned char)c) || c == '_') {
        std::string id;
        while (pos < src.size() &&
               (std::isalnum((unsigned char)peek()) || peek() == '_'))
          id += advance();
        out.push_back({Tok::Ident, id, 0, sp});
        continue;
      }
      if (std::isdigit((unsigned char)c)) {
        long long v = 0;
        while (pos < src.size() && std::isdigit((unsigned char)peek()))
          v = v * 10 + (advance() - '0');
        out.push_back({Tok::Int, "", v, sp});
        continue;
      }
      auto two = [&](char a, char b) { return c == a && peek(1) == b; };
      auto emit = [&](Tok k, int n, const char* tx) {
        for (int i = 0; i < n; ++i) advance();
        out.push_back({k, tx, 0, sp});
      };
      if (two('=', '=') && peek(2) == '=') { emit(Tok::StrongEq, 3, "==="); continue; }
      if (two('=', '>')) { emit(Tok::Implies, 2, "=>"); continue; }
      if (two('!', '=')) { emit(Tok::Ne, 2, "!="); continue; }
      if (two('<', '=')) { emit(Tok::Le, 2, "<="); continue; }
      if (two('>', '=')) { emit(Tok::Ge, 2, ">="); continue; }
      if (two('&', '&')) { emit(Tok::AndAnd, 2, "&&"); continue; }
      if (c == '|' && peek(1) == '-' && peek(2) == '>') { emit(Tok::Maplet, 3, "|->"); continue; }
      if (two('|', '|')) { emit(Tok::OrOr, 2, "||"); continue; }
      if (two('+', '+')) { emit(Tok::PlusPlus, 2, "++"); continue; }
      if (two(':', '=')) { emit(Tok::Assign, 2, ":="); continue; }
      if (two('-', '>')) { emit(Tok::Arrow, 2, "->"); continue; }
      switch (c) {
        case '{': emit(Tok::LBrace, 1, "{"); break;
        case '}': emit(Tok::RBrace, 1, "}"); break;
        case '(': emit(Tok::LParen, 1, "("); break;
        case ')': emit(Tok::RParen, 1, ")"); break;
        case '[': emit(Tok::LBracket, 1, "["); break;
        case ']': emit(Tok::RBracket, 1, "]"); break;
        case ';': emit(Tok::Semi, 1, ";"); break;
        case ':': emit(Tok::Colon, 1, ":"); break;
        case ',': emit(Tok::Comma, 1, ","); break;
        case '.': emit(Tok::Dot, 1, "."); break;
        case '?': emit(Tok::Question, 1, "?"); break;
        case '$': emit(Tok::Dollar, 1, "$"); break;
        case '&': emit(Tok::Amp, 1, "&"); break;
        case '*': emit(Tok::Star, 1, "*"); break;
        case '+': emit(Tok::Plus, 1, "+"); break;
        case '-': emit(Tok::Minus, 1, "-"); break;
        case '/': emit(Tok::Slash, 1, "/"); break;
        case '\\': emit(Tok::Backslash, 1, "\\"); break;
        case '<': emit(Tok::Lt, 1, "<"); break;
        case '>': emit(Tok::Gt, 1, ">"); break;
        case '=': emit(Tok::Eq, 1, "="); break;
        case '!': emit(Tok::Bang, 1, "!"); break;
        case '|': emit(Tok::Bar, 1, "|"); break;
        default:
          fail(ErrorKind::Parse, std::string("unexpected character '") + c + "'",
               sp);
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Parser

struct Parser {
  std::vector<Token> toks;
  size_t i = 0;

  const Token& cur() const { return toks[i]; }
  const Token& ahead(size_t n = 1) const {
    return toks[std::min(i + n, toks.size() - 1)];
  }
  bool at(Tok k) const { return cur().kind == k; }
  bool at_kw(const char* kw) const {
    return cur().kind == Tok::Ident && cur().text == kw;
  }
  Token eat() { return toks[i++]; }
  Token expect(Tok k, const char* what) {
    if (!at(k))
      fail(ErrorKind::Parse,
           std::string("expected ") + what + ", got '" + cur().text + "'",
           cur().span);
    return eat();
  }
  void expect_kw(const char* kw) {
    if (!at_kw(kw))
      fail(ErrorKind::Parse,
           std::string("expected '") + kw + "', got '" + cur().text + "'",
           cur().span);
    eat();
  }
  std::string expect_ident(const char* what) {
    return expect(Tok::Ident, what).text;
  }

  // ---- types ----

  TypePtr parse_type() {
    Span sp = cur().span;
    if (at_kw("int")) { eat(); return Type::intt(); }
    if (at_kw("bool")) { eat(); return Type::boolt(); }
    if (at_kw("anyptr")) { eat(); return Type::ptrtop(); }
    if (at_kw("ptr")) { eat(); return Type::ptr(parse_type()); }
    if (at_kw("arr")) {
      eat();
      expect(Tok::LBracket, "'['");
      TypePtr e = parse_type();
      expect(Tok::Semi, "';'");
      long long n = expect(Tok::Int, "array length").ival;
      expect(Tok::RBracket, "']'");
      return Type::array(e, n);
    }
    if (at_kw("rec")) {
      eat();
      expect(Tok::LBrace, "'{'");
      std::vector<std::pair<std::string, TypePtr>> fs;
      while (!at(Tok::RBrace)) {
        std::string fn = expect_ident("field name");
        expect(Tok::Colon, "':'");
        fs.emplace_back(fn, parse_type());
        expect(Tok::Semi, "';'");
      }
      eat();
      return Type::record(std::move(fs));
    }
    if (at_kw("set") || at_kw("seq")) {
      bool isset = cur().text == "set";
      eat();
      expect(Tok::Lt, "'<'");
      TypePtr e = parse_type();
      expect(Tok::Gt, "'>'");
      return isset ? Type::set_of(e) : Type::seq_of(e);
    }
    if (at_kw("map")) {
      eat();
      expect(Tok::Lt, "'<'");
      TypePtr k = parse_type();
      expect(Tok::Comma, "','");
      TypePtr v = parse_type();
      expect(Tok::Gt, "'>'");
      return Type::map_of(k, v);
    }
    if (at(Tok::Ident)) return Type::named(eat().text);
    fail(ErrorKind::Parse, "expected a type", sp);
  }

  // ---- terms ----
  // full:      cond > or > and > cmp > setop > additive > mult > unary
  // atom mode: starts at cmp (&&, ||, ?: belong to the enclosing formula)

  TermPtr parse_term() { return parse_cond(); }

  TermPtr parse_cond() {
    TermPtr c = parse_or();
    if (at(Tok::Question)) {
      Span sp = eat().span;
      TermPtr a = parse_cond();
      expect(Tok::Colon, "':'");
      TermPtr b = parse_cond();
      return mk_cond(c, a, b, sp);
    }
    return c;
  }
  TermPtr parse_or() {
    TermPtr l = parse_and();
    while (at(Tok::OrOr)) {
      Span sp = eat().span;
      l = mk_apply("||", {l, parse_and()}, sp);
    }
    return l;
  }
  TermPtr parse_and() {
    TermPtr l = parse_cmp();
    while (at(Tok::AndAnd)) {
      Span sp = eat().span;
      l = mk_apply("&&", {l, parse_cmp()}, sp);
    }
    return l;
  }
  TermPtr parse_cmp() {
    TermPtr l = parse_setop();
    const char* op = nullptr;
    bool negate = false;
    if (at(Tok::Eq)) op = "=";
    else if (at(Tok::Ne)) op = "!=";
    else if (at(Tok::Lt)) op = "<";
    else if (at(Tok::Le)) op = "<=";
    else if (at(Tok::Gt)) op = ">";
    else if (at(Tok::Ge)) op = ">=";
    else if (at_kw("in")) op = "in";
    else if (at_kw("notin")) { op = "in"; negate = true; }
    else if (at_kw("subset")) op = "subset";
    else if (at_kw("psubset")) op = "psubset";
    if (!op) return l;
    Span sp = eat().span;
    TermPtr r = parse_setop();
    TermPtr app = mk_apply(op, {l, r}, sp);
    return negate ? mk_apply("!", {app}, sp) : app;
  }
  TermPtr parse_setop() {
    TermPtr l = parse_additive();
    while (true) {
      const char* op = nullptr;
      if (at_kw("union") && ahead().kind != Tok::LBrace) op = "union";
      else if (at_kw("inter")) op = "inter";
      else if (at(Tok::Backslash)) op = "\\";
      else if (at(Tok::PlusPlus)) op = "++";
      if (!op) return l;
      Span sp = eat().span;
      l = mk_apply(op, {l, parse_additive()}, sp);
    }
  }
  TermPtr parse_additive() {
    TermPtr l = parse_mult();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      const char* op = at(Tok::Plus) ? "+" : "-";
      Span sp = eat().span;
      l = mk_apply(op, {l, parse_mult()}, sp);
    }
    return l;
  }
  TermPtr parse_mult() {
    TermPtr l = parse_unary();
    while (at(Tok::Star) || at(Tok::Slash)) {
      const char* op = at(Tok::Star) ? "*" : "/";
      Span sp = eat().span;
      l = mk_apply(op, {l, parse_unary()}, sp);
    }
    return l;
  }
  TermPtr parse_unary() {
    Span sp = cur().span;
    if (at(Tok::Bang)) {
      eat();
      return mk_apply("!", {parse_unary()}, sp);
    }
    if (at(Tok::Minus)) {
      eat();
      TermPtr a = parse_unary();
      if (a->kind == TermKind::IntLit) return mk_int(-a->ival, sp);
      return mk_apply("neg", {a}, sp);
    }
    if (at(Tok::Star)) {
      eat();
      return mk_deref(parse_unary(), sp);
    }
    if (at(Tok::Amp)) {
      eat();
      auto t = std::make_shared<Term>();
      t->kind = TermKind::SAddr;
      t->span = sp;
      t->args = {parse_postfix()};
      return t;
    }
    return parse_postfix();
  }
  // While parsing the set a binder ranges over, '.' ends the set term (it
  // separates the binder head from the body) instead of selecting a field.
  bool in_binder_domain = false;

  TermPtr parse_binder_domain() {
    bool saved = in_binder_domain;
    in_binder_domain = true;
    TermPtr s = parse_term();
    in_binder_domain = saved;
    return s;
  }

  TermPtr parse_postfix() {
    TermPtr e = parse_primary();
    while (true) {
      Span sp = cur().span;
      if (at(Tok::Arrow)) {
        eat();
        auto t = std::make_shared<Term>();
        t->kind = TermKind::SArrow;
        t->span = sp;
        t->name = expect_ident("field name");
        t->args = {e};
        e = t;
      } else if (at(Tok::Dot) && !in_binder_domain) {
        eat();
        auto t = std::make_shared<Term>();
        t->kind = TermKind::SDot;
        t->span = sp;
        t->name = expect_ident("field name");
        t->args = {e};
        e = t;
      } else if (at(Tok::LBracket)) {
        eat();
        auto t = std::make_shared<Term>();
        t->kind = TermKind::SIndex;
        t->span = sp;
        t->args = {e, parse_term()};
        expect(Tok::RBracket, "']'");
        e = t;
      } else {
        return e;
      }
    }
  }

  TermPtr parse_primary() {
    Span sp = cur().span;
    if (at(Tok::Int)) return mk_int(eat().ival, sp);
    if (at_kw("true")) { eat(); return mk_bool(true, sp); }
    if (at_kw("false")) { eat(); return mk_bool(false, sp); }
    if (at_kw("nil")) { eat(); return mk_nil(sp); }
    if (at_kw("old")) {
      eat();
      expect(Tok::LParen, "'('");
      TermPtr a = parse_term();
      expect(Tok::RParen, "')'");
      return mk_old(a, sp);
    }
    if (at_kw("scopef")) {
      eat();
      expect(Tok::LParen, "'('");
      std::string fn = expect_ident("function name");
      expect(Tok::RParen, "')'");
      expect(Tok::LParen, "'('");
      return mk_msf(fn, parse_args(), sp);
    }
    if (at_kw("scope")) {
      eat();
      expect(Tok::LParen, "'('");
      TermPtr r = parse_scope_arg(sp);
      expect(Tok::RParen, "')'");
      return r;
    }
    if (at_kw("all")) {
      eat();
      std::string x = expect_ident("binder");
      expect_kw("in");
      TermPtr s = parse_binder_domain();
      expect(Tok::Dot, "'.'");
      TermPtr b = parse_term();
      return mk_allin(x, s, b, sp);
    }
    if (at_kw("union") && ahead().kind == Tok::LBrace) {
      eat();
      eat();  // '{'
      TermPtr body = parse_term();
      expect(Tok::Bar, "'|'");
      std::string x = expect_ident("binder");
      expect_kw("in");
      TermPtr s = parse_term();
      TermPtr filt;
      if (at_kw("when")) {
        eat();
        filt = parse_term();
      }
      expect(Tok::RBrace, "'}'");
      return mk_unioncomp(x, s, body, filt, sp);
    }
    if (at(Tok::Ident)) {
      std::string id = eat().text;
      if (at(Tok::LParen)) {
        eat();
        return mk_apply(id, parse_args(), sp);
      }
      auto t = std::make_shared<Term>();
      t->kind = TermKind::SVar;
      t->name = id;
      t->span = sp;
      return t;
    }
    if (at(Tok::LParen)) {
      eat();
      TermPtr e = parse_term();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (at(Tok::LBrace)) {
      eat();
      if (at(Tok::RBrace)) {
        eat();
        return mk_setlit({}, sp);
      }
      TermPtr first = parse_term();
      if (at(Tok::Maplet)) {
        std::vector<TermPtr> kvs{first};
        eat();
        kvs.push_back(parse_term());
        while (at(Tok::Comma)) {
          eat();
          kvs.push_back(parse_term());
          expect(Tok::Maplet, "'|->'");
          kvs.push_back(parse_term());
        }
        expect(Tok::RBrace, "'}'");
        return mk_maplit(std::move(kvs), sp);
      }
      std::vector<TermPtr> es{first};
      while (at(Tok::Comma)) {
        eat();
        es.push_back(parse_term());
      }
      expect(Tok::RBrace, "'}'");
      return mk_setlit(std::move(es), sp);
    }
    if (at(Tok::LBracket)) {
      eat();
      std::vector<TermPtr> es;
      if (!at(Tok::RBracket)) {
        es.push_back(parse_term());
        while (at(Tok::Comma)) {
          eat();
          es.push_back(parse_term());
        }
      }
      expect(Tok::RBracket, "']'");
      return mk_seqlit(std::move(es), sp);
    }
    fail(ErrorKind::Parse, "expected a term, got '" + cur().text + "'", sp);
  }

  std::vector<TermPtr> parse_args() {
    std::vector<TermPtr> args;
    if (!at(Tok::RParen)) {
      args.push_back(parse_term());
      while (at(Tok::Comma)) {
        eat();
        args.push_back(parse_term());
      }
    }
    expect(Tok::RParen, "')'");
    return args;
  }

  // scope($r) | scope(term) | scope(formula)
  TermPtr parse_scope_arg(Span sp) {
    if (at(Tok::Dollar)) {
      eat();
      return mk_scope_pred(expect_ident("predicate variable"), sp);
    }
    FormulaPtr f = parse_formula();
    if (f->kind == FormulaKind::BoolTerm) return mk_scope_term(f->t1, sp);
    return mk_scope_formula(f, sp);
  }

  // ---- formulas ----

  FormulaPtr parse_formula() {
    FormulaPtr l = parse_formula_or();
    if (at(Tok::Implies)) {
      Span sp = eat().span;
      return mk_implies(l, parse_formula(), sp);
    }
    return l;
  }
  FormulaPtr parse_formula_or() {
    FormulaPtr l = parse_formula_and();
    while (at(Tok::OrOr)) {
      Span sp = eat().span;
      l = mk_or(l, parse_formula_and(), sp);
    }
    return l;
  }
  FormulaPtr parse_formula_and() {
    FormulaPtr l = parse_formula_atom();
    while (at(Tok::AndAnd)) {
      Span sp = eat().span;
      l = mk_and(l, parse_formula_atom(), sp);
    }
    return l;
  }

  FormulaPtr parse_formula_atom() {
    Span sp = cur().span;
    if (at(Tok::Bang)) {
      eat();
      return mk_not(parse_formula_atom(), sp);
    }
    if (at(Tok::Dollar)) {
      eat();
      return mk_predvar(expect_ident("predicate variable"), sp);
    }
    if (at_kw("def")) {
      eat();
      expect(Tok::LParen, "'('");
      TermPtr t = parse_term();
      expect(Tok::RParen, "')'");
      return mk_defined(t, sp);
    }
    if (at_kw("Outlying")) {
      eat();
      expect(Tok::LParen, "'('");
      FormulaPtr p = parse_formula();
      expect(Tok::Comma, "','");
      TermPtr e = parse_term();
      expect(Tok::RParen, "')'");
      return mk_outlying(p, e, sp);
    }
    if (at_kw("forall") || at_kw("exists")) {
      bool fa = cur().text == "forall";
      eat();
      std::string x = expect_ident("binder");
      TypePtr ty;
      TermPtr bound;
      if (at_kw("in")) {
        eat();
        bound = parse_binder_domain();
      } else if (at(Tok::Colon)) {
        eat();
        ty = parse_type();
      }
      std::vector<std::pair<std::string, TypePtr>> more;
      while (at(Tok::Comma)) {  // forall x: T, y: T . F
        eat();
        std::string y = expect_ident("binder");
        expect(Tok::Colon, "':'");
        more.emplace_back(y, parse_type());
      }
      expect(Tok::Dot, "'.'");
      FormulaPtr body = parse_formula();
      for (auto it = more.rbegin(); it != more.rend(); ++it)
        body = fa ? mk_forall(it->first, it->second, nullptr, body, sp)
                  : mk_exists(it->first, it->second, nullptr, body, sp);
      return fa ? mk_forall(x, ty, bound, body, sp)
                : mk_exists(x, ty, bound, body, sp);
    }
    // A term at comparison level; = / !== / === become formula atoms.
    // A leading '(' is ambiguous between a parenthesized term and a
    // parenthesized formula: try the term reading first, backtrack to the
    // formula reading when it fails (printed formulas rely on this).
    if (at(Tok::LParen)) {
      size_t save = i;
      try {
        return parse_comparison_atom(sp);
      } catch (const Error&) {
        i = save;
      }
      eat();  // '('
      FormulaPtr f = parse_formula();
      expect(Tok::RParen, "')'");
      return f;
    }
    return parse_comparison_atom(sp);
  }

  FormulaPtr parse_comparison_atom(Span sp) {
    TermPtr l = parse_setop();
    if (at(Tok::Eq)) {
      Span esp = eat().span;
      return mk_eq(l, parse_setop(), esp);
    }
    if (at(Tok::Ne)) {
      Span esp = eat().span;
      return mk_not(mk_eq(l, parse_setop(), esp), esp);
    }
    if (at(Tok::StrongEq)) {
      Span esp = eat().span;
      return mk_strongeq(l, parse_setop(), esp);
    }
    const char* op = nullptr;
    bool negate = false;
    if (at(Tok::Lt)) op = "<";
    else if (at(Tok::Le)) op = "<=";
    else if (at(Tok::Gt)) op = ">";
    else if (at(Tok::Ge)) op = ">=";
    else if (at_kw("in")) op = "in";
    else if (at_kw("notin")) { op = "in"; negate = true; }
    else if (at_kw("subset")) op = "subset";
    else if (at_kw("psubset")) op = "psubset";
    if (op) {
      Span esp = eat().span;
      FormulaPtr a = mk_boolterm(mk_apply(op, {l, parse_setop()}, esp), esp);
      return negate ? mk_not(a, esp) : a;
    }
    return mk_boolterm(l, sp);
  }

  // ---- declarations / scripts ----

  std::vector<std::pair<std::string, TypePtr>> parse_params() {
    std::vector<std::pair<std::string, TypePtr>> ps;
    expect(Tok::LParen, "'('");
    if (!at(Tok::RParen)) {
      while (true) {
        std::string n = expect_ident("parameter");
        expect(Tok::Colon, "':'");
        ps.emplace_back(n, parse_type());
        if (!at(Tok::Comma)) break;
        eat();
      }
    }
    expect(Tok::RParen, "')'");
    return ps;
  }

  std::vector<ScriptItem> parse_script_block() {
    expect(Tok::LBrace, "'{'");
    std::vector<ScriptItem> items;
    while (!at(Tok::RBrace)) items.push_back(parse_script_item());
    eat();
    return items;
  }

  ScriptItem parse_script_item() {
    Span sp = cur().span;
    ScriptItem it;
    it.span = sp;
    if (at(Tok::LBrace)) {
      eat();
      it.kind = ItemKind::Assert;
      it.formula = parse_formula();
      expect(Tok::RBrace, "'}'");
      return it;
    }
    if (at(Tok::Implies)) {
      eat();
      it.kind = ItemKind::Conseq;
      if (at(Tok::LBracket)) {
        eat();
        if (!at(Tok::RBracket)) {
          it.by.push_back(expect_ident("lemma name"));
          while (at(Tok::Comma)) {
            eat();
            it.by.push_back(expect_ident("lemma name"));
          }
        }
        expect(Tok::RBracket, "']'");
      }
      expect(Tok::LBrace, "'{'");
      it.formula = parse_formula();
      expect(Tok::RBrace, "'}'");
      return it;
    }
    if (at_kw("sub") && (ahead().kind == Tok::Plus || ahead().kind == Tok::Minus)) {
      eat();
      it.kind = at(Tok::Plus) ? ItemKind::SubUp : ItemKind::SubDown;
      eat();
      it.name = expect_ident("logic variable");
      expect(Tok::Assign, "':='");
      it.term = parse_term();
      expect(Tok::Semi, "';'");
      return it;
    }
    if (at_kw("frame") &&
        (ahead().kind == Tok::Plus || ahead().kind == Tok::Minus)) {
      eat();
      it.kind = at(Tok::Plus) ? ItemKind::FrameUp : ItemKind::FrameDown;
      eat();
      expect(Tok::Dollar, "'$'");
      it.name = expect_ident("predicate variable");
      expect(Tok::Assign, "':='");
      it.formula = parse_formula();
      expect(Tok::Semi, "';'");
      return it;
    }
    if (at_kw("conj") || at_kw("disj")) {
      it.kind = ItemKind::Junction;
      it.name = eat().text;
      it.block1 = parse_script_block();
      it.block2 = parse_script_block();
      return it;
    }
    if ((at_kw("all") || at_kw("exist")) && ahead().kind == Tok::Ident) {
      it.kind = ItemKind::Junction;
      it.name = eat().text;
      it.term = mk_var(expect_ident("binder"), sp);
      expect(Tok::Colon, "':'");
      it.var_type = parse_type();
      it.block1 = parse_script_block();
      return it;
    }
    // statements
    it.kind = ItemKind::Statement;
    auto st = std::make_shared<Stmt>();
    st->span = sp;
    if (at_kw("skip")) {
      eat();
      expect(Tok::Semi, "';'");
      st->kind = StmtKind::Skip;
      it.stmt = st;
      return it;
    }
    if (at_kw("if")) {
      eat();
      expect(Tok::LParen, "'('");
      st->kind = StmtKind::If;
      st->cond = parse_term();
      expect(Tok::RParen, "')'");
      st->body = parse_script_block();
      expect_kw("else");
      st->else_body = parse_script_block();
      it.stmt = st;
      return it;
    }
    if (at_kw("while")) {
      eat();
      expect(Tok::LParen, "'('");
      st->kind = StmtKind::While;
      st->cond = parse_term();
      expect(Tok::RParen, "')'");
      st->body = parse_script_block();
      it.stmt = st;
      return it;
    }
    // assignment / alloc: lvalue := rhs ;
    TermPtr lhs = parse_term();
    expect(Tok::Assign, "':='");
    if (at_kw("alloc")) {
      eat();
      expect(Tok::LParen, "'('");
      st->kind = StmtKind::Alloc;
      st->alloc_type = parse_type();
      expect(Tok::RParen, "')'");
    } else {
      st->kind = StmtKind::Assign;
      st->rhs = parse_term();
    }
    expect(Tok::Semi, "';'");
    st->target = lhs;  // surface lvalue; expansion turns it into an address
    it.stmt = st;
    return it;
  }

  Unit parse_unit(const std::string& file) {
    Unit u;
    u.file = file;
    while (!at(Tok::End)) {
      Span sp = cur().span;
      if (at_kw("type")) {
        eat();
        std::string n = expect_ident("type name");
        expect(Tok::Eq, "'='");
        u.typedefs.emplace_back(n, parse_type());
        expect(Tok::Semi, "';'");
      } else if (at_kw("var")) {
        eat();
        std::string n = expect_ident("variable name");
        expect(Tok::Colon, "':'");
        u.vars.emplace_back(n, parse_type());
        expect(Tok::Semi, "';'");
      } else if (at_kw("rec")) {
        eat();
        FuncDef f;
        f.span = sp;
        f.name = expect_ident("function name");
        f.params = parse_params();
        expect(Tok::Colon, "':'");
        f.ret = parse_type();
        expect(Tok::Assign, "':='");
        f.body = parse_term();
        expect(Tok::Semi, "';'");
        u.funcs.push_back(std::move(f));
      } else if (at_kw("abstract")) {
        eat();
        FuncDef f;
        f.span = sp;
        f.is_abstract = true;
        f.name = expect_ident("function name");
        f.params = parse_params();
        expect(Tok::Colon, "':'");
        f.ret = parse_type();
        if (at_kw("scope")) {
          eat();
          f.scope_term = parse_term();
        } else {
          f.scope_term = mk_empty_set();
        }
        expect(Tok::Semi, "';'");
        u.funcs.push_back(std::move(f));
      } else if (at_kw("scopebound")) {
        eat();
        ScopeBoundDecl d;
        d.span = sp;
        d.fn = expect_ident("function name");
        expect_kw("within");
        d.bound = parse_term();
        if (at_kw("when")) {
          eat();
          d.guard = parse_formula();
        } else {
          d.guard = mk_true();
        }
        expect(Tok::Semi, "';'");
        u.scope_bounds.push_back(std::move(d));
      } else if (at_kw("lemma")) {
        eat();
        Lemma l;
        l.span = sp;
        l.name = expect_ident("lemma name");
        expect(Tok::Colon, "':'");
        l.formula = parse_formula();
        expect(Tok::Semi, "';'");
        u.lemmas.push_back(std::move(l));
      } else if (at_kw("proof")) {
        eat();
        ProofScript s;
        s.span = sp;
        s.name = expect_ident("proof name");
        s.items = parse_script_block();
        u.scripts.push_back(std::move(s));
      } else {
        fail(ErrorKind::Parse, "expected a declaration, got '" + cur().text + "'",
             sp);
      }
    }
    return u;
  }
};

// ---------------------------------------------------------------------------
// Abbreviation expansion

struct Expander {
  const Unit& u;
  std::vector<std::string> bound;  // logic binders currently in scope

  bool is_bound(const std::string& n) const {
    for (auto& b : bound)
      if (b == n) return true;
    return false;
  }
  bool is_progvar(const std::string& n) const {
    return !is_bound(n) && u.find_var(n) != nullptr;
  }

  static bool lvalue_sugar(const TermPtr& t) {
    switch (t->kind) {
      case TermKind::SDot:
      case TermKind::SIndex:
      case TermKind::SArrow:
        return true;
      default:
        return false;
    }
  }

  // The address of a surface lvalue.
  TermPtr addr_of(const TermPtr& t) {
    switch (t->kind) {
      case TermKind::SVar:
        if (is_progvar(t->name)) return mk_varaddr(t->name, t->span);
        fail(ErrorKind::Parse,
             "cannot take the address of '" + t->name +
                 "' (not a program variable)",
             t->span);
      case TermKind::SArrow:
        return mk_fieldaddr(term(t->args[0]), t->name, t->span);
      case TermKind::SDot:
        return mk_fieldaddr(addr_of(t->args[0]), t->name, t->span);
      case TermKind::SIndex: {
        TermPtr base = (t->args[0]->kind == TermKind::SVar &&
                        is_progvar(t->args[0]->name)) ||
                               lvalue_sugar(t->args[0])
                           ? addr_of(t->args[0])
                           : term(t->args[0]);
        return mk_indexaddr(base, term(t->args[1]), t->span);
      }
      case TermKind::Deref:
        return term(t->args[0]);
      default:
        fail(ErrorKind::Parse, "expected an lvalue", t->span);
    }
  }

  TermPtr term(const TermPtr& t) {
    if (!t) return t;
    switch (t->kind) {
      case TermKind::SVar:
        if (is_progvar(t->name))
          return mk_deref(mk_varaddr(t->name, t->span), t->span);
        return mk_var(t->name, t->span);
      case TermKind::SArrow:
      case TermKind::SDot:
      case TermKind::SIndex:
        return mk_deref(addr_of(t), t->span);
      case TermKind::SAddr:
        return addr_of(t->args[0]);
      case TermKind::AllIn: {
        bound.push_back(t->name);
        TermPtr s = term(t->args[0]);
        // note: binder is visible in the body only
        TermPtr b = term(t->args[1]);
        bound.pop_back();
        return mk_allin(t->name, s, b, t->span);
      }
      case TermKind::UnionComp: {
        TermPtr s;
        {
          // bound set is outside the binder scope
          s = term(t->args[0]);
        }
        bound.push_back(t->name);
        TermPtr b = term(t->args[1]);
        TermPtr filt = t->args.size() > 2 ? term(t->args[2]) : nullptr;
        bound.pop_back();
        return mk_unioncomp(t->name, s, b, filt, t->span);
      }
      case TermKind::ScopeOfFormula:
        return mk_scope_formula(formula(t->farg), t->span);
      default: {
        if (t->args.empty() && !t->farg) return t;
        auto c = std::make_shared<Term>(*t);
        for (auto& a : c->args) a = term(a);
        return c;
      }
    }
  }

  FormulaPtr formula(const FormulaPtr& f) {
    if (!f) return f;
    auto c = std::make_shared<Formula>(*f);
    bool binder = f->kind == FormulaKind::Forall || f->kind == FormulaKind::Exists;
    if (c->t1) c->t1 = term(c->t1);
    if (c->t2) c->t2 = term(c->t2);
    if (c->bound) c->bound = term(c->bound);
    if (binder) bound.push_back(f->var);
    if (c->f1) c->f1 = formula(c->f1);
    if (c->f2) c->f2 = formula(c->f2);
    if (binder) bound.pop_back();
    return c;
  }

  StmtPtr stmt(const StmtPtr& s) {
    auto c = std::make_shared<Stmt>(*s);
    switch (s->kind) {
      case StmtKind::Skip:
        break;
      case StmtKind::Assign:
        c->target = addr_of(s->target);
        c->rhs = term(s->rhs);
        break;
      case StmtKind::Alloc:
        c->target = addr_of(s->target);
        break;
      case StmtKind::If:
        c->cond = term(s->cond);
        c->body = items(s->body);
        c->else_body = items(s->else_body);
        break;
      case StmtKind::While:
        c->cond = term(s->cond);
        c->body = items(s->body);
        break;
    }
    return c;
  }

  std::vector<ScriptItem> items(const std::vector<ScriptItem>& xs) {
    std::vector<ScriptItem> out;
    out.reserve(xs.size());
    for (auto& x : xs) {
      ScriptItem c = x;
      if (c.formula) c.formula = formula(c.formula);
      if (c.term && c.kind != ItemKind::Junction) c.term = term(c.term);
      if (c.stmt) c.stmt = stmt(c.stmt);
      if (c.kind == ItemKind::Junction && (c.name == "all" || c.name == "exist")) {
        bound.push_back(c.term->name);
        c.block1 = items(x.block1);
        bound.pop_back();
      } else {
        c.block1 = items(x.block1);
        c.block2 = items(x.block2);
      }
      out.push_back(std::move(c));
    }
    return out;
  }
};

}  // namespace

Unit parse_unit(const std::string& source, const std::string& file) {
  Lexer lx(source);
  Parser p{lx.run()};
  return p.parse_unit(file);
}

TermPtr parse_term_text(const std::string& source) {
  Lexer lx(source);
  Parser p{lx.run()};
  TermPtr t = p.parse_term();
  p.expect(Tok::End, "end of input");
  return t;
}

FormulaPtr parse_formula_text(const std::string& source) {
  Lexer lx(source);
  Parser p{lx.run()};
  FormulaPtr f = p.parse_formula();
  p.expect(Tok::End, "end of input");
  return f;
}

Unit expand_abbreviations(const Unit& u) {
  Unit out = u;
  Expander ex{u, {}};
  for (auto& f : out.funcs) {
    for (auto& pr : f.params) ex.bound.push_back(pr.first);
    if (f.body) f.body = ex.term(f.body);
    if (f.scope_term) f.scope_term = ex.term(f.scope_term);
    ex.bound.clear();
  }
  for (auto& sb : out.scope_bounds) {
    const FuncDef* fd = u.find_func(sb.fn);
    if (fd)
      for (auto& pr : fd->params) ex.bound.push_back(pr.first);
    sb.bound = ex.term(sb.bound);
    sb.guard = ex.formula(sb.guard);
    ex.bound.clear();
  }
  for (auto& l : out.lemmas) l.formula = ex.formula(l.formula);
  for (auto& s : out.scripts) s.items = ex.items(s.items);
  return out;
}

TermPtr expand_term(const Unit& u, const TermPtr& t) {
  Expander ex{u, {}};
  return ex.term(t);
}

FormulaPtr expand_formula(const Unit& u, const FormulaPtr& f) {
  Expander ex{u, {}};
  return ex.formula(f);
}

}  // namespace sl
