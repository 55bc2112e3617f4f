#include "lcstrs/term.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace lcstrs {

// ---- types ----

Type sort_type(const std::string& name) {
  auto t = std::make_shared<TypeNode>();
  t->sort = name;
  return t;
}

Type arrow(Type from, Type to) {
  auto t = std::make_shared<TypeNode>();
  t->from = std::move(from);
  t->to = std::move(to);
  return t;
}

Type arrows(const std::vector<Type>& as, Type result) {
  for (auto it = as.rbegin(); it != as.rend(); ++it) result = arrow(*it, result);
  return result;
}

Type int_type() {
  static const Type t = sort_type("Int");
  return t;
}

Type bool_type() {
  static const Type t = sort_type("Bool");
  return t;
}

bool type_eq(const Type& a, const Type& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->is_arrow() != b->is_arrow()) return false;
  if (!a->is_arrow()) return a->sort == b->sort;
  return type_eq(a->from, b->from) && type_eq(a->to, b->to);
}

std::string type_str(const Type& t) {
  if (!t) return "?";
  if (!t->is_arrow()) return t->sort;
  std::string l = type_str(t->from);
  if (t->from->is_arrow()) l = "(" + l + ")";
  return l + " -> " + type_str(t->to);
}

std::vector<Type> arg_types(const Type& t) {
  std::vector<Type> out;
  Type cur = t;
  while (cur->is_arrow()) {
    out.push_back(cur->from);
    cur = cur->to;
  }
  return out;
}

Type result_type(const Type& t) {
  Type cur = t;
  while (cur->is_arrow()) cur = cur->to;
  return cur;
}

bool is_theory_sort(const std::string& s) { return s == "Int" || s == "Bool"; }

bool is_theory_type(const Type& t) {
  if (!t->is_arrow()) return is_theory_sort(t->sort);
  return is_theory_type(t->from) && is_theory_type(t->to);
}

// ---- terms ----

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

bool is_int_name(const std::string& n) {
  if (n.empty()) return false;
  std::size_t i = n[0] == '-' ? 1 : 0;
  if (i == n.size()) return false;
  for (; i < n.size(); ++i)
    if (n[i] < '0' || n[i] > '9') return false;
  return true;
}

}  // namespace

bool term_eq(const Term& a, const Term& b) {
  if (a == b) return true;
  if (a->hash != b->hash || a->kind != b->kind || a->size != b->size) return false;
  if (a->kind == TermKind::App) return term_eq(a->fun, b->fun) && term_eq(a->arg, b->arg);
  return a->name == b->name && a->theory == b->theory && type_eq(a->type, b->type);
}

bool term_less(const Term& a, const Term& b) {
  if (a == b) return false;
  if (a->kind != b->kind) return a->kind < b->kind;
  if (a->kind == TermKind::App) {
    if (!term_eq(a->fun, b->fun)) return term_less(a->fun, b->fun);
    return term_less(a->arg, b->arg);
  }
  if (a->name != b->name) return a->name < b->name;
  if (a->theory != b->theory) return a->theory < b->theory;
  return type_str(a->type) < type_str(b->type);
}

Term mk_sym(const std::string& name, Type type, bool theory) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Sym;
  n->name = name;
  n->theory = theory;
  n->type = std::move(type);
  n->hash = mix(std::hash<std::string>{}(name), theory ? 17 : 3);
  return n;
}

Term mk_var(const std::string& name, Type type) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Var;
  n->name = name;
  n->type = std::move(type);
  n->hash = mix(std::hash<std::string>{}(name), 101);
  return n;
}

Term mk_app(const Term& f, const Term& a) {
  if (!f->type->is_arrow())
    throw TermError("cannot apply " + to_string(f) + " of type " + type_str(f->type) + " to an argument");
  if (!type_eq(f->type->from, a->type))
    throw TermError("argument " + to_string(a) + " has type " + type_str(a->type) + " but " + to_string(f) +
                    " expects " + type_str(f->type->from));
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::App;
  n->type = f->type->to;
  n->fun = f;
  n->arg = a;
  n->hash = mix(mix(f->hash, a->hash), 7);
  n->size = f->size + a->size + 1;
  return n;
}

Term mk_apps(Term f, const std::vector<Term>& as) {
  for (const auto& a : as) f = mk_app(f, a);
  return f;
}

std::string int_str(const Int& v) { return v.str(); }

Term mk_int(const Int& v) { return mk_sym(int_str(v), int_type(), true); }

Term mk_bool(bool b) { return mk_sym(b ? "true" : "false", bool_type(), true); }

Term theory_op(const std::string& op, const Type& operand) {
  Type I = int_type(), B = bool_type();
  if (op == "+" || op == "-" || op == "*") return mk_sym(op, arrows({I, I}, I), true);
  if (op == "=" || op == "!=") {
    Type o = operand ? operand : I;
    return mk_sym(op, arrows({o, o}, B), true);
  }
  if (op == "<" || op == "<=" || op == ">" || op == ">=") return mk_sym(op, arrows({I, I}, B), true);
  if (op == "/\\" || op == "\\/") return mk_sym(op, arrows({B, B}, B), true);
  if (op == "not") return mk_sym(op, arrow(B, B), true);
  throw TermError("unknown theory operator " + op);
}

Term mk_bin(const std::string& op, const Term& a, const Term& b) {
  return mk_apps(theory_op(op, a->type), {a, b});
}

Term mk_not(const Term& a) { return mk_app(theory_op("not"), a); }

namespace {
void flatten_and(const Term& c, std::vector<Term>& out) {
  Term h = head(c);
  if (h->kind == TermKind::Sym && h->theory && h->name == "/\\" && args(c).size() == 2) {
    auto as = args(c);
    flatten_and(as[0], out);
    flatten_and(as[1], out);
    return;
  }
  if (is_bool_lit(c) && bool_value(c)) return;
  out.push_back(c);
}
}  // namespace

Term mk_and(const std::vector<Term>& cs) {
  std::vector<Term> flat;
  for (const auto& c : cs) flatten_and(c, flat);
  if (flat.empty()) return mk_bool(true);
  Term r = flat[0];
  for (std::size_t i = 1; i < flat.size(); ++i) r = mk_bin("/\\", r, flat[i]);
  return r;
}

Term mk_or(const Term& a, const Term& b) { return mk_bin("\\/", a, b); }

bool is_var(const Term& t) { return t->kind == TermKind::Var; }
bool is_sym(const Term& t) { return t->kind == TermKind::Sym; }
bool is_app(const Term& t) { return t->kind == TermKind::App; }

Term head(const Term& t) {
  const TermNode* cur = t.get();
  Term h = t;
  while (h->kind == TermKind::App) h = h->fun;
  (void)cur;
  return h;
}

std::vector<Term> args(const Term& t) {
  std::vector<Term> out;
  Term cur = t;
  while (cur->kind == TermKind::App) {
    out.push_back(cur->arg);
    cur = cur->fun;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

bool is_int_lit(const Term& t) { return t->kind == TermKind::Sym && t->theory && is_int_name(t->name); }

bool is_bool_lit(const Term& t) {
  return t->kind == TermKind::Sym && t->theory && (t->name == "true" || t->name == "false");
}

bool is_value(const Term& t) { return is_int_lit(t) || is_bool_lit(t); }

Int int_value(const Term& t) {
  if (!is_int_lit(t)) throw TermError(to_string(t) + " is not an integer literal");
  return Int(t->name);
}

bool bool_value(const Term& t) {
  if (!is_bool_lit(t)) throw TermError(to_string(t) + " is not a boolean literal");
  return t->name == "true";
}

bool is_ground(const Term& t) {
  if (t->kind == TermKind::Var) return false;
  if (t->kind == TermKind::Sym) return true;
  return is_ground(t->fun) && is_ground(t->arg);
}

bool is_theory_term(const Term& t) {
  if (t->kind == TermKind::Var) return true;
  if (t->kind == TermKind::Sym) return t->theory;
  return is_theory_term(t->fun) && is_theory_term(t->arg);
}

bool is_base_type(const Term& t) { return !t->type->is_arrow(); }

bool is_semi_constructor(const Term& t, const Arity& ar) {
  Term h = head(t);
  auto as = args(t);
  if (h->kind == TermKind::Sym) {
    auto a = ar(h->name);
    if (a && static_cast<int>(as.size()) >= *a) return false;
  }
  for (const auto& a : as)
    if (!is_semi_constructor(a, ar)) return false;
  return true;
}

Classification classify(const Term& t, const Arity& ar) {
  return {is_ground(t), is_theory_term(t), is_semi_constructor(t, ar), is_value(t)};
}

namespace {
void collect_vars(const Term& t, std::vector<Term>& out, std::set<std::string>& seen) {
  if (t->kind == TermKind::Var) {
    if (seen.insert(t->name).second) out.push_back(t);
    return;
  }
  if (t->kind == TermKind::App) {
    Term h = head(t);
    collect_vars(h, out, seen);
    for (const auto& a : args(t)) collect_vars(a, out, seen);
  }
}
}  // namespace

std::vector<Term> vars_of(const Term& t) {
  std::vector<Term> out;
  std::set<std::string> seen;
  collect_vars(t, out, seen);
  return out;
}

std::set<std::string> var_names(const Term& t) {
  std::set<std::string> out;
  for (const auto& v : vars_of(t)) out.insert(v->name);
  return out;
}

bool occurs_var(const std::string& name, const Term& t) {
  if (t->kind == TermKind::Var) return t->name == name;
  if (t->kind == TermKind::Sym) return false;
  return occurs_var(name, t->fun) || occurs_var(name, t->arg);
}

bool contains_sym(const Term& t, const std::string& name) {
  if (t->kind == TermKind::Sym) return t->name == name && !t->theory;
  if (t->kind == TermKind::Var) return false;
  return contains_sym(t->fun, name) || contains_sym(t->arg, name);
}

Term apply_subst(const Term& t, const Subst& s) {
  if (s.empty()) return t;
  switch (t->kind) {
    case TermKind::Var: {
      auto it = s.find(t->name);
      return it == s.end() ? t : it->second;
    }
    case TermKind::Sym:
      return t;
    case TermKind::App: {
      Term f = apply_subst(t->fun, s), a = apply_subst(t->arg, s);
      if (f == t->fun && a == t->arg) return t;
      return mk_app(f, a);
    }
  }
  return t;
}

bool match_term(const Term& p, const Term& s, Subst& out) {
  if (!type_eq(p->type, s->type)) return false;
  switch (p->kind) {
    case TermKind::Var: {
      auto it = out.find(p->name);
      if (it != out.end()) return term_eq(it->second, s);
      out.emplace(p->name, s);
      return true;
    }
    case TermKind::Sym:
      return term_eq(p, s);
    case TermKind::App:
      if (s->kind != TermKind::App) return false;
      return match_term(p->fun, s->fun, out) && match_term(p->arg, s->arg, out);
  }
  return false;
}

std::optional<Subst> match_term(const Term& p, const Term& s) {
  Subst out;
  if (!match_term(p, s, out)) return std::nullopt;
  return out;
}

namespace {
void collect_positions(const Term& t, Position& cur, std::vector<Position>& out) {
  out.push_back(cur);
  auto as = args(t);
  for (std::size_t i = 0; i < as.size(); ++i) {
    cur.push_back(static_cast<int>(i));
    collect_positions(as[i], cur, out);
    cur.pop_back();
  }
}
}  // namespace

std::vector<Position> positions(const Term& t) {
  std::vector<Position> out;
  Position cur;
  collect_positions(t, cur, out);
  return out;
}

std::optional<Term> subterm_at(const Term& t, const Position& p) {
  Term cur = t;
  for (int i : p) {
    auto as = args(cur);
    if (i < 0 || i >= static_cast<int>(as.size())) return std::nullopt;
    cur = as[i];
  }
  return cur;
}

namespace {
Term replace_rec(const Term& t, const Position& p, std::size_t k, const Term& s) {
  if (k == p.size()) {
    if (!type_eq(t->type, s->type))
      throw TermError("replacement " + to_string(s) + " has type " + type_str(s->type) + ", expected " +
                      type_str(t->type));
    return s;
  }
  auto as = args(t);
  int i = p[k];
  if (i < 0 || i >= static_cast<int>(as.size()))
    throw TermError("invalid position " + position_str(p) + " in " + to_string(t));
  as[i] = replace_rec(as[i], p, k + 1, s);
  return mk_apps(head(t), as);
}
}  // namespace

Term replace_at(const Term& t, const Position& p, const Term& s) { return replace_rec(t, p, 0, s); }

std::string position_str(const Position& p) {
  std::string r = "[";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) r += ",";
    r += std::to_string(p[i]);
  }
  return r + "]";
}

Term hole(int i, Type type) { return mk_sym("#" + std::to_string(i), std::move(type), false); }

bool is_hole(const Term& t) {
  return t->kind == TermKind::Sym && !t->theory && t->name.size() > 1 && t->name[0] == '#';
}

int hole_index(const Term& t) { return is_hole(t) ? std::stoi(t->name.substr(1)) : 0; }

int hole_count(const Term& cf) {
  if (is_hole(cf)) return hole_index(cf);
  if (cf->kind == TermKind::App) return std::max(hole_count(cf->fun), hole_count(cf->arg));
  return 0;
}

Term fill(const Term& cf, const std::vector<Term>& as) {
  if (static_cast<int>(as.size()) < hole_count(cf))
    throw TermError("context function " + to_string(cf) + " needs " + std::to_string(hole_count(cf)) +
                    " arguments, got " + std::to_string(as.size()));
  std::function<Term(const Term&)> go = [&](const Term& t) -> Term {
    if (is_hole(t)) {
      const Term& a = as[hole_index(t) - 1];
      if (!type_eq(a->type, t->type))
        throw TermError("hole " + t->name + " has type " + type_str(t->type) + " but argument " + to_string(a) +
                        " has type " + type_str(a->type));
      return a;
    }
    if (t->kind != TermKind::App) return t;
    Term f = go(t->fun), a = go(t->arg);
    if (f == t->fun && a == t->arg) return t;
    return mk_app(f, a);
  };
  return go(cf);
}

// ---- printing ----

namespace {

int infix_prec(const std::string& op) {
  if (op == "\\/") return 1;
  if (op == "/\\") return 2;
  if (op == "=" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=") return 4;
  if (op == "+" || op == "-") return 5;
  if (op == "*") return 6;
  return 0;
}

void print(const Term& t, int ctx, std::string& out) {
  if (t->kind == TermKind::Var) {
    out += t->name;
    return;
  }
  if (t->kind == TermKind::Sym) {
    if (t->theory && (infix_prec(t->name) || t->name == "not")) {
      out += "[" + t->name + "]";
    } else if (is_int_lit(t) && t->name[0] == '-' && ctx > 0) {
      out += "(" + t->name + ")";
    } else {
      out += t->name;
    }
    return;
  }
  Term h = head(t);
  auto as = args(t);
  if (h->kind == TermKind::Sym && h->theory) {
    int p = infix_prec(h->name);
    if (p && as.size() == 2) {
      bool cmp = p == 4;
      if (p < ctx) out += "(";
      print(as[0], cmp ? p + 1 : p, out);
      out += " " + h->name + " ";
      print(as[1], p + 1, out);
      if (p < ctx) out += ")";
      return;
    }
    if (h->name == "not" && as.size() == 1) {
      if (3 < ctx) out += "(";
      out += "not ";
      print(as[0], 3, out);
      if (3 < ctx) out += ")";
      return;
    }
  }
  if (7 < ctx) out += "(";
  print(h, 8, out);
  for (const auto& a : as) {
    out += " ";
    print(a, 8, out);
  }
  if (7 < ctx) out += ")";
}

}  // namespace

std::string to_string(const Term& t) {
  std::string out;
  print(t, 0, out);
  return out;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& used) {
  std::string b = base;
  while (!b.empty() && (std::isdigit(static_cast<unsigned char>(b.back())) || b.back() == '\'')) b.pop_back();
  if (b.empty() || b[0] == '#') b = "v";
  for (int k = 1;; ++k) {
    std::string n = b + std::to_string(k);
    if (!used.count(n)) return n;
  }
}

}  // namespace lcstrs
