#include "lcstrs/program.hpp"
#include "lcstrs/theory.hpp"

#include <cctype>
#include <functional>

namespace lcstrs {

namespace {

// ---- lexer ----

enum class Tok { Ident, Int, Hole, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1, col = 1;
};

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {"fun", "rule", "goal", "lemma", "prec", "not", "true", "false"};
  return k;
}

bool is_op_text(const std::string& s) {
  static const std::set<std::string> ops = {"+", "-", "*", "=", "!=", "<", "<=", ">", ">=", "/\\", "\\/", "not"};
  return ops.count(s) > 0;
}

std::vector<Token> lex(const std::string& src, bool allow_holes) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto adv = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  static const std::vector<std::string> puncts = {"::", "->", "<=", ">=", "!=", "/\\", "\\/", "~", "[", "]", "(",
                                                  ")",  ";",  "+",  "-",  "*",  "=",  "<",  ">"};
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      adv(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') adv(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
        ++j;
      t.kind = Tok::Ident;
      t.text = src.substr(i, j - i);
      adv(j - i);
      out.push_back(t);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Int;
      t.text = src.substr(i, j - i);
      adv(j - i);
      out.push_back(t);
      continue;
    }
    if (c == '#') {
      std::size_t j = i + 1;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (!allow_holes || j == i + 1)
        throw ParseError(line, col, "'#' names are reserved for template holes");
      t.kind = Tok::Hole;
      t.text = src.substr(i, j - i);
      adv(j - i);
      out.push_back(t);
      continue;
    }
    bool matched = false;
    for (const auto& p : puncts) {
      if (src.compare(i, p.size(), p) == 0) {
        t.kind = Tok::Punct;
        t.text = p;
        adv(p.size());
        out.push_back(t);
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(line, col, std::string("unexpected character '") + c + "'");
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

// ---- raw syntax ----

struct Raw;
using RawP = std::shared_ptr<Raw>;

struct TypeSyn;
using TypeSynP = std::shared_ptr<TypeSyn>;
struct TypeSyn {
  std::string sort;
  TypeSynP from, to;
};

struct Raw {
  enum K { Ident, Lit, Op, Hole, App } k = Ident;
  std::string name;
  Int lit;
  RawP f, a;
  TypeSynP annot;
  int line = 0, col = 0;
  int ty = -1;
};

Type to_type(const TypeSynP& t) {
  if (!t->from) return t->sort == "Int" ? int_type() : t->sort == "Bool" ? bool_type() : sort_type(t->sort);
  return arrow(to_type(t->from), to_type(t->to));
}

// ---- type inference ----

struct TyArena {
  struct N {
    int kind = 0;  // 0 meta, 1 sort, 2 arrow
    std::string sort;
    int a = -1, b = -1;
    int bound = -1;
  };
  std::vector<N> ns;

  int meta() {
    ns.push_back(N{});
    return static_cast<int>(ns.size()) - 1;
  }
  int sort(const std::string& s) {
    N n;
    n.kind = 1;
    n.sort = s;
    ns.push_back(n);
    return static_cast<int>(ns.size()) - 1;
  }
  int arr(int a, int b) {
    N n;
    n.kind = 2;
    n.a = a;
    n.b = b;
    ns.push_back(n);
    return static_cast<int>(ns.size()) - 1;
  }
  int of(const Type& t) { return t->is_arrow() ? arr(of(t->from), of(t->to)) : sort(t->sort); }
  int find(int x) {
    while (ns[x].kind == 0 && ns[x].bound >= 0) x = ns[x].bound;
    return x;
  }
  bool occurs(int m, int t) {
    t = find(t);
    if (t == m) return true;
    if (ns[t].kind == 2) return occurs(m, ns[t].a) || occurs(m, ns[t].b);
    return false;
  }
  bool unify(int x, int y) {
    x = find(x);
    y = find(y);
    if (x == y) return true;
    if (ns[x].kind == 0) {
      if (occurs(x, y)) return false;
      ns[x].bound = y;
      return true;
    }
    if (ns[y].kind == 0) return unify(y, x);
    if (ns[x].kind != ns[y].kind) return false;
    if (ns[x].kind == 1) return ns[x].sort == ns[y].sort;
    return unify(ns[x].a, ns[y].a) && unify(ns[x].b, ns[y].b);
  }
  Type resolve(int x) {
    x = find(x);
    if (ns[x].kind == 0) return nullptr;
    if (ns[x].kind == 1) return ns[x].sort == "Int" ? int_type() : ns[x].sort == "Bool" ? bool_type() : sort_type(ns[x].sort);
    Type a = resolve(ns[x].a), b = resolve(ns[x].b);
    if (!a || !b) return nullptr;
    return arrow(a, b);
  }
  std::string show(int x) {
    x = find(x);
    if (ns[x].kind == 0) return "?";
    if (ns[x].kind == 1) return ns[x].sort;
    std::string l = show(ns[x].a);
    if (ns[find(ns[x].a)].kind == 2) l = "(" + l + ")";
    return l + " -> " + show(ns[x].b);
  }
};

// Typing context for one statement.
struct Scope {
  const Program* prog = nullptr;
  std::map<std::string, Type>* fixed = nullptr;  // pre-typed variables
  bool allow_new = true;
  TyArena ar;
  std::map<std::string, int> vars;  // variable -> type node
  std::vector<std::string> var_order;
  std::map<std::string, std::pair<int, int>> var_loc;
  std::vector<std::pair<int, RawP>> eq_ops;  // (operand meta, node) for = and !=
};

bool is_var_name(const std::string& s) { return !s.empty() && std::islower(static_cast<unsigned char>(s[0])); }

int infer(Scope& sc, const RawP& r) {
  int t = -1;
  switch (r->k) {
    case Raw::Lit:
      t = sc.ar.sort("Int");
      break;
    case Raw::Hole:
      throw ParseError(r->line, r->col, "hole " + r->name + " needs a type from the template machinery");
    case Raw::Op: {
      if (r->name == "=" || r->name == "!=") {
        int m = sc.ar.meta();
        t = sc.ar.arr(m, sc.ar.arr(m, sc.ar.sort("Bool")));
        sc.eq_ops.emplace_back(m, r);
      } else {
        t = sc.ar.of(theory_op(r->name)->type);
      }
      break;
    }
    case Raw::Ident: {
      if (r->name == "true" || r->name == "false") {
        t = sc.ar.sort("Bool");
        break;
      }
      if (const SymbolInfo* s = sc.prog->find_symbol(r->name)) {
        t = sc.ar.of(s->type);
        break;
      }
      auto it = sc.vars.find(r->name);
      if (it != sc.vars.end()) {
        t = it->second;
        break;
      }
      if (sc.fixed) {
        auto ft = sc.fixed->find(r->name);
        if (ft != sc.fixed->end()) {
          t = sc.ar.of(ft->second);
          sc.vars[r->name] = t;
          sc.var_order.push_back(r->name);
          break;
        }
      }
      if (!is_var_name(r->name)) throw ParseError(r->line, r->col, "unknown symbol " + r->name);
      if (!sc.allow_new) throw ParseError(r->line, r->col, "unknown variable " + r->name);
      t = sc.ar.meta();
      sc.vars[r->name] = t;
      sc.var_order.push_back(r->name);
      sc.var_loc[r->name] = {r->line, r->col};
      break;
    }
    case Raw::App: {
      int tf = infer(sc, r->f);
      int ta = infer(sc, r->a);
      int res = sc.ar.meta();
      if (!sc.ar.unify(tf, sc.ar.arr(ta, res))) {
        int ff = sc.ar.find(tf);
        if (sc.ar.ns[ff].kind != 2)
          throw ParseError(r->line, r->col, "cannot apply a term of type " + sc.ar.show(tf) + " to an argument");
        throw ParseError(r->a->line, r->a->col,
                         "argument has type " + sc.ar.show(ta) + " but " + sc.ar.show(sc.ar.ns[ff].a) + " is expected");
      }
      t = res;
      break;
    }
  }
  if (r->annot) {
    if (!sc.ar.unify(t, sc.ar.of(to_type(r->annot))))
      throw ParseError(r->line, r->col, "annotation " + type_str(to_type(r->annot)) + " conflicts with type " +
                                            sc.ar.show(t));
  }
  r->ty = t;
  return t;
}

void finish_types(Scope& sc) {
  for (auto& [m, r] : sc.eq_ops) {
    Type t = sc.ar.resolve(m);
    if (!t) {
      // Both operands are unconstrained variables; nothing forces a sort.
      std::string who = "x";
      for (const auto& v : sc.var_order)
        if (sc.ar.find(sc.vars[v]) == sc.ar.find(m)) {
          who = v;
          break;
        }
      throw ParseError(r->line, r->col,
                       "cannot infer the operand type of " + r->name + "; annotate as " + who + "::Int");
    }
    if (t->is_arrow() || !is_theory_sort(t->sort))
      throw ParseError(r->line, r->col, r->name + " compares only Int or Bool values, not " + type_str(t));
  }
  for (const auto& v : sc.var_order) {
    if (!sc.ar.resolve(sc.vars[v])) {
      auto [l, c] = sc.var_loc.count(v) ? sc.var_loc[v] : std::pair<int, int>{0, 0};
      throw ParseError(l, c, "cannot infer the type of variable " + v + "; annotate as " + v + "::Int");
    }
  }
}

Term build(Scope& sc, const RawP& r, const std::map<std::string, Type>& holes) {
  switch (r->k) {
    case Raw::Lit:
      return mk_int(r->lit);
    case Raw::Hole: {
      auto it = holes.find(r->name);
      return mk_sym(r->name, it->second, false);
    }
    case Raw::Op:
      if (r->name == "=" || r->name == "!=") {
        Type full = sc.ar.resolve(r->ty);
        return theory_op(r->name, full->from);
      }
      return theory_op(r->name);
    case Raw::Ident: {
      if (r->name == "true" || r->name == "false") return mk_bool(r->name == "true");
      if (const SymbolInfo* s = sc.prog->find_symbol(r->name)) return mk_sym(s->name, s->type);
      return mk_var(r->name, sc.ar.resolve(sc.vars.at(r->name)));
    }
    case Raw::App:
      return mk_app(build(sc, r->f, holes), build(sc, r->a, holes));
  }
  throw ParseError(r->line, r->col, "internal: bad node");
}

// ---- parser ----

class Parser {
 public:
  Parser(std::vector<Token> toks, const Program* prog) : toks_(std::move(toks)), prog_(prog) {}

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_punct(const std::string& p, std::size_t k = 0) const {
    return peek(k).kind == Tok::Punct && peek(k).text == p;
  }
  bool at_kw(const std::string& kw) const { return peek().kind == Tok::Ident && peek().text == kw; }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(peek().line, peek().col, msg); }
  void expect(const std::string& p) {
    if (!at_punct(p)) fail("expected '" + p + "' but found " + describe(peek()));
    next();
  }
  static std::string describe(const Token& t) {
    if (t.kind == Tok::End) return "end of input";
    return "'" + t.text + "'";
  }
  bool done() const { return peek().kind == Tok::End; }

  TypeSynP type() {
    TypeSynP a = type_atom();
    if (at_punct("->")) {
      next();
      auto r = std::make_shared<TypeSyn>();
      r->from = a;
      r->to = type();
      return r;
    }
    return a;
  }

  TypeSynP type_atom() {
    if (at_punct("(")) {
      next();
      TypeSynP t = type();
      expect(")");
      return t;
    }
    if (peek().kind != Tok::Ident || keywords().count(peek().text)) fail("expected a type");
    auto t = std::make_shared<TypeSyn>();
    t->sort = next().text;
    return t;
  }

  RawP expr() { return or_expr(); }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Program* prog_;

  static RawP node(Raw::K k, const Token& at) {
    auto r = std::make_shared<Raw>();
    r->k = k;
    r->line = at.line;
    r->col = at.col;
    return r;
  }
  static RawP app(const RawP& f, const RawP& a) {
    auto r = std::make_shared<Raw>();
    r->k = Raw::App;
    r->f = f;
    r->a = a;
    r->line = f->line;
    r->col = f->col;
    return r;
  }
  static RawP binop(const Token& at, const std::string& op, const RawP& l, const RawP& r) {
    RawP o = node(Raw::Op, at);
    o->name = op;
    return app(app(o, l), r);
  }

  RawP or_expr() {
    RawP l = and_expr();
    while (at_punct("\\/")) {
      Token t = next();
      l = binop(t, "\\/", l, and_expr());
    }
    return l;
  }
  RawP and_expr() {
    RawP l = not_expr();
    while (at_punct("/\\")) {
      Token t = next();
      l = binop(t, "/\\", l, not_expr());
    }
    return l;
  }
  RawP not_expr() {
    if (at_kw("not")) {
      Token t = next();
      RawP o = node(Raw::Op, t);
      o->name = "not";
      return app(o, not_expr());
    }
    return cmp_expr();
  }
  RawP cmp_expr() {
    RawP l = add_expr();
    static const std::set<std::string> cmps = {"=", "!=", "<", "<=", ">", ">="};
    if (peek().kind == Tok::Punct && cmps.count(peek().text)) {
      Token t = next();
      RawP r = add_expr();
      if (peek().kind == Tok::Punct && cmps.count(peek().text)) fail("comparisons do not chain; use /\\");
      return binop(t, t.text, l, r);
    }
    return l;
  }
  RawP add_expr() {
    RawP l = mul_expr();
    while (at_punct("+") || at_punct("-")) {
      Token t = next();
      l = binop(t, t.text, l, mul_expr());
    }
    return l;
  }
  RawP mul_expr() {
    RawP l = unary();
    while (at_punct("*")) {
      Token t = next();
      l = binop(t, "*", l, unary());
    }
    return l;
  }
  RawP unary() {
    if (at_punct("-")) {
      Token t = next();
      RawP e = unary();
      if (e->k == Raw::Lit && !e->annot) {
        e->lit = -e->lit;
        e->line = t.line;
        e->col = t.col;
        return e;
      }
      RawP zero = node(Raw::Lit, t);
      zero->lit = 0;
      return binop(t, "-", zero, e);
    }
    return application();
  }
  bool starts_atom() const {
    const Token& t = peek();
    if (t.kind == Tok::Int || t.kind == Tok::Hole) return true;
    if (t.kind == Tok::Ident) return !keywords().count(t.text) || t.text == "true" || t.text == "false";
    if (at_punct("(")) return true;
    if (at_punct("[")) return is_bracket_op();
    return false;
  }
  bool is_bracket_op() const {
    if (!at_punct("[") || !(peek(2).kind == Tok::Punct && peek(2).text == "]")) return false;
    const Token& o = peek(1);
    return (o.kind == Tok::Punct || o.kind == Tok::Ident) && is_op_text(o.text);
  }
  RawP application() {
    if (!starts_atom()) fail("expected a term but found " + describe(peek()));
    RawP l = atom();
    while (starts_atom()) l = app(l, atom());
    return l;
  }
  RawP atom() {
    Token t = peek();
    RawP r;
    if (t.kind == Tok::Int) {
      next();
      if (prog_ && prog_->find_symbol(t.text)) {
        r = node(Raw::Ident, t);
        r->name = t.text;
      } else {
        r = node(Raw::Lit, t);
        r->lit = Int(t.text);
      }
    } else if (t.kind == Tok::Hole) {
      next();
      r = node(Raw::Hole, t);
      r->name = t.text;
    } else if (t.kind == Tok::Ident) {
      next();
      r = node(Raw::Ident, t);
      r->name = t.text;
    } else if (at_punct("(")) {
      next();
      r = expr();
      expect(")");
    } else if (is_bracket_op()) {
      next();
      Token o = next();
      next();
      r = node(Raw::Op, o);
      r->name = o.text;
    } else {
      fail("expected a term");
    }
    if (at_punct("::")) {
      next();
      r->annot = type_atom();
    }
    return r;
  }
};

struct Stmt {
  std::string kind;
  RawP a, b, c;
  Token at;
};

std::map<std::string, Type> collect_hole_types(const RawP& r, std::map<std::string, Type>& out) {
  if (!r) return out;
  if (r->k == Raw::Hole) {
    if (!r->annot) {
      // Default: binary integer operation, the shape used by the template bank.
      out.emplace(r->name, arrows({int_type(), int_type()}, int_type()));
    } else {
      out[r->name] = to_type(r->annot);
    }
  }
  collect_hole_types(r->f, out);
  collect_hole_types(r->a, out);
  return out;
}

// Replaces hole nodes by identifiers typed through a temporary scope entry.
int infer_with_holes(Scope& sc, const RawP& r, const std::map<std::string, Type>& holes) {
  if (r->k == Raw::Hole) {
    int t = sc.ar.of(holes.at(r->name));
    r->ty = t;
    return t;
  }
  if (r->k == Raw::App) {
    int tf = infer_with_holes(sc, r->f, holes);
    int ta = infer_with_holes(sc, r->a, holes);
    int res = sc.ar.meta();
    if (!sc.ar.unify(tf, sc.ar.arr(ta, res)))
      throw ParseError(r->line, r->col, "ill-typed application of type " + sc.ar.show(tf));
    if (r->annot && !sc.ar.unify(res, sc.ar.of(to_type(r->annot))))
      throw ParseError(r->line, r->col, "annotation conflicts with inferred type");
    r->ty = res;
    return res;
  }
  return infer(sc, r);
}

}  // namespace

// ---- statement typing ----

namespace {

struct Typed {
  Term a, b, c;
};

Typed type_statement(const Program& p, const Stmt& s, std::map<std::string, Type>* fixed, bool allow_new) {
  Scope sc;
  sc.prog = &p;
  sc.fixed = fixed;
  sc.allow_new = allow_new;
  std::map<std::string, Type> holes;
  collect_hole_types(s.a, holes);
  collect_hole_types(s.b, holes);
  collect_hole_types(s.c, holes);
  int ta = infer_with_holes(sc, s.a, holes);
  int tb = s.b ? infer_with_holes(sc, s.b, holes) : -1;
  if (s.b && !sc.ar.unify(ta, tb))
    throw ParseError(s.b->line, s.b->col,
                     "sides have different types: " + sc.ar.show(ta) + " and " + sc.ar.show(tb));
  if (s.c) {
    int tc = infer_with_holes(sc, s.c, holes);
    if (!sc.ar.unify(tc, sc.ar.sort("Bool")))
      throw ParseError(s.c->line, s.c->col, "constraint must have type Bool, not " + sc.ar.show(tc));
  }
  finish_types(sc);
  Typed out;
  out.a = build(sc, s.a, holes);
  if (s.b) out.b = build(sc, s.b, holes);
  out.c = s.c ? build(sc, s.c, holes) : mk_bool(true);
  if (fixed)
    for (const auto& v : sc.var_order) (*fixed)[v] = sc.ar.resolve(sc.vars[v]);
  return out;
}

void check_equation(const Equation& e, const Token& at) {
  if (!is_constraint(e.constraint))
    throw ParseError(at.line, at.col, "constraint " + to_string(e.constraint) +
                                          " must be a theory term whose variables have sort Int or Bool");
}

}  // namespace

Program parse_program(const std::string& text) {
  Program p;
  Parser ps(lex(text, false), &p);
  while (!ps.done()) {
    Token at = ps.peek();
    if (at.kind != Tok::Ident) ps.fail("expected a declaration but found " + Parser::describe(at));
    if (at.text == "fun") {
      ps.next();
      Token name = ps.next();
      if ((name.kind != Tok::Ident && name.kind != Tok::Int) || keywords().count(name.text))
        throw ParseError(name.line, name.col, "expected a symbol name");
      ps.expect("::");
      TypeSynP ty = ps.type();
      ps.expect(";");
      if (p.find_symbol(name.text)) throw ParseError(name.line, name.col, "symbol " + name.text + " declared twice");
      p.declare(name.text, to_type(ty));
    } else if (at.text == "rule" || at.text == "goal" || at.text == "lemma") {
      ps.next();
      Stmt s;
      s.kind = at.text;
      s.at = at;
      s.a = ps.expr();
      ps.expect(at.text == "rule" ? "->" : "~");
      s.b = ps.expr();
      if (ps.at_punct("[")) {
        ps.next();
        s.c = ps.expr();
        ps.expect("]");
      }
      ps.expect(";");
      Typed t = type_statement(p, s, nullptr, true);
      if (at.text == "rule") {
        try {
          p.add_rule(t.a, t.b, t.c);
        } catch (const TermError& e) {
          throw ParseError(at.line, at.col, e.what());
        }
      } else {
        Equation e{t.a, t.b, t.c};
        check_equation(e, at);
        (at.text == "goal" ? p.goals : p.lemmas).push_back(e);
      }
    } else if (at.text == "prec") {
      ps.next();
      std::vector<std::string> chain;
      for (;;) {
        Token n = ps.next();
        if (n.kind != Tok::Ident || !p.find_symbol(n.text))
          throw ParseError(n.line, n.col, "prec expects declared symbols");
        chain.push_back(n.text);
        if (ps.at_punct(">")) {
          ps.next();
          continue;
        }
        break;
      }
      ps.expect(";");
      if (chain.size() < 2) throw ParseError(at.line, at.col, "prec needs at least two symbols");
      p.precedences.push_back(chain);
    } else {
      ps.fail("expected fun, rule, goal, lemma or prec but found " + Parser::describe(at));
    }
  }
  return p;
}

Term parse_term(const std::string& text, const Program& p, std::map<std::string, Type>& vars, bool allow_new_vars,
                bool allow_holes, const Type& expected) {
  Parser ps(lex(text, allow_holes), &p);
  Stmt s;
  s.a = ps.expr();
  if (!ps.done()) ps.fail("unexpected " + Parser::describe(ps.peek()) + " after term");
  Scope sc;
  sc.prog = &p;
  sc.fixed = &vars;
  sc.allow_new = allow_new_vars;
  std::map<std::string, Type> holes;
  collect_hole_types(s.a, holes);
  int t = infer_with_holes(sc, s.a, holes);
  if (expected && !sc.ar.unify(t, sc.ar.of(expected)))
    throw ParseError(1, 1, "term has type " + sc.ar.show(t) + " but " + type_str(expected) + " is expected");
  finish_types(sc);
  Term out = build(sc, s.a, holes);
  for (const auto& v : sc.var_order) vars[v] = sc.ar.resolve(sc.vars[v]);
  return out;
}

Equation parse_equation(const std::string& text, const Program& p, std::map<std::string, Type>& vars,
                        bool allow_holes) {
  Parser ps(lex(text, allow_holes), &p);
  Stmt s;
  s.a = ps.expr();
  ps.expect("~");
  s.b = ps.expr();
  if (ps.at_punct("[")) {
    ps.next();
    s.c = ps.expr();
    ps.expect("]");
  }
  if (!ps.done()) ps.fail("unexpected " + Parser::describe(ps.peek()) + " after equation");
  Typed t = type_statement(p, s, &vars, true);
  Equation e{t.a, t.b, t.c};
  if (!is_constraint(e.constraint)) throw ParseError(1, 1, "constraint is not a theory term over Int/Bool variables");
  return e;
}

Type parse_type(const std::string& text) {
  Parser ps(lex(text, false), nullptr);
  TypeSynP t = ps.type();
  if (!ps.done()) ps.fail("unexpected " + Parser::describe(ps.peek()) + " after type");
  return to_type(t);
}

}  // namespace lcstrs
