#include "lcstrs/theory.hpp"

#include <algorithm>

namespace lcstrs {

int theory_arity(const Term& sym) {
  const std::string& n = sym->name;
  if (n == "not") return 1;
  if (n == "+" || n == "-" || n == "*" || n == "=" || n == "!=" || n == "<" || n == "<=" || n == ">" ||
      n == ">=" || n == "/\\" || n == "\\/")
    return 2;
  return 0;
}

namespace {

Value apply_op(const std::string& op, const std::vector<Value>& v) {
  auto need_int = [&](std::size_t k) -> const Int& {
    if (v[k].is_bool) throw TheoryError("operator " + op + " expects an integer");
    return v[k].i;
  };
  auto need_bool = [&](std::size_t k) {
    if (!v[k].is_bool) throw TheoryError("operator " + op + " expects a boolean");
    return v[k].b;
  };
  if (op == "not") return Value::of_bool(!need_bool(0));
  if (op == "+") return Value::of_int(need_int(0) + need_int(1));
  if (op == "-") return Value::of_int(need_int(0) - need_int(1));
  if (op == "*") return Value::of_int(need_int(0) * need_int(1));
  if (op == "=") return Value::of_bool(v[0] == v[1]);
  if (op == "!=") return Value::of_bool(!(v[0] == v[1]));
  if (op == "<") return Value::of_bool(need_int(0) < need_int(1));
  if (op == "<=") return Value::of_bool(need_int(0) <= need_int(1));
  if (op == ">") return Value::of_bool(need_int(0) > need_int(1));
  if (op == ">=") return Value::of_bool(need_int(0) >= need_int(1));
  if (op == "/\\") return Value::of_bool(need_bool(0) && need_bool(1));
  if (op == "\\/") return Value::of_bool(need_bool(0) || need_bool(1));
  throw TheoryError("unknown theory operator " + op);
}

Value eval_rec(const Term& t, const std::map<std::string, Value>* env) {
  if (t->type->is_arrow()) throw TheoryError(to_string(t) + " has arrow type and no value");
  if (t->kind == TermKind::Var) {
    if (env) {
      auto it = env->find(t->name);
      if (it != env->end()) return it->second;
    }
    throw TheoryError("unassigned variable " + t->name);
  }
  if (is_int_lit(t)) return Value::of_int(int_value(t));
  if (is_bool_lit(t)) return Value::of_bool(bool_value(t));
  Term h = head(t);
  if (h->kind != TermKind::Sym || !h->theory) throw TheoryError(to_string(t) + " is not a theory term");
  auto as = args(t);
  if (static_cast<int>(as.size()) != theory_arity(h))
    throw TheoryError("theory symbol " + h->name + " applied to " + std::to_string(as.size()) + " arguments");
  std::vector<Value> vs;
  vs.reserve(as.size());
  for (const auto& a : as) vs.push_back(eval_rec(a, env));
  return apply_op(h->name, vs);
}

}  // namespace

Value eval_ground(const Term& t) { return eval_rec(t, nullptr); }

Value eval_under(const Term& t, const std::map<std::string, Value>& env) { return eval_rec(t, &env); }

// ---- polynomials ----

namespace {

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial r;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      r.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      r.push_back(b[j++]);
    } else {
      r.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  return r;
}

int degree(const Monomial& m) {
  int d = 0;
  for (const auto& [_, e] : m) d += e;
  return d;
}

// Printing order: higher degree first, then the map order.
std::vector<std::pair<Monomial, Int>> ordered(const Polynomial& p) {
  std::vector<std::pair<Monomial, Int>> v(p.terms.begin(), p.terms.end());
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return degree(a.first) > degree(b.first); });
  return v;
}

}  // namespace

bool Polynomial::is_constant() const { return terms.empty() || (terms.size() == 1 && terms.begin()->first.empty()); }

bool Polynomial::is_linear() const {
  for (const auto& [m, _] : terms)
    if (degree(m) > 1) return false;
  return true;
}

Int Polynomial::constant() const {
  auto it = terms.find(Monomial{});
  return it == terms.end() ? Int(0) : it->second;
}

Int Polynomial::eval(const std::map<std::string, Int>& env) const {
  Int total = 0;
  for (const auto& [m, c] : terms) {
    Int v = c;
    for (const auto& [a, e] : m) {
      auto it = env.find(a);
      if (it == env.end()) throw TheoryError("unassigned atom " + a);
      for (int k = 0; k < e; ++k) v *= it->second;
    }
    total += v;
  }
  return total;
}

std::string Polynomial::str() const {
  if (terms.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : ordered(*this)) {
    Int a = c < 0 ? Int(-c) : c;
    if (first) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    first = false;
    std::string mono;
    for (const auto& [x, e] : m) {
      if (!mono.empty()) mono += "*";
      mono += x;
      if (e > 1) mono += "^" + std::to_string(e);
    }
    if (mono.empty()) {
      out += int_str(a);
    } else if (a == 1) {
      out += mono;
    } else {
      out += int_str(a) + "*" + mono;
    }
  }
  return out;
}

Term Polynomial::to_term() const {
  if (terms.empty()) return mk_int(0);
  Term acc;
  for (const auto& [m, c] : ordered(*this)) {
    Term mono;
    for (const auto& [x, e] : m) {
      auto it = atoms.find(x);
      Term at = it != atoms.end() ? it->second : mk_var(x, int_type());
      for (int k = 0; k < e; ++k) mono = mono ? mk_bin("*", mono, at) : at;
    }
    Int a = c < 0 ? Int(-c) : c;
    Term piece;
    if (!mono) {
      piece = mk_int(acc ? a : c);
    } else if (acc || c > 0) {
      piece = a == 1 ? mono : mk_bin("*", mk_int(a), mono);
    } else {
      piece = mk_bin("*", mk_int(c), mono);
    }
    if (!acc) {
      acc = piece;
    } else {
      acc = mk_bin(c < 0 ? "-" : "+", acc, piece);
    }
  }
  return acc;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r = *this;
  for (const auto& [k, v] : o.atoms) r.atoms.emplace(k, v);
  for (const auto& [m, c] : o.terms) {
    Int& slot = r.terms[m];
    slot += c;
    if (slot == 0) r.terms.erase(m);
  }
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * constant_poly(-1); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial r;
  r.atoms = atoms;
  for (const auto& [k, v] : o.atoms) r.atoms.emplace(k, v);
  for (const auto& [m1, c1] : terms)
    for (const auto& [m2, c2] : o.terms) {
      Monomial m = mono_mul(m1, m2);
      Int& slot = r.terms[m];
      slot += c1 * c2;
      if (slot == 0) r.terms.erase(m);
    }
  return r;
}

Polynomial Polynomial::constant_poly(const Int& c) {
  Polynomial r;
  if (c != 0) r.terms[Monomial{}] = c;
  return r;
}

Polynomial Polynomial::atom(const std::string& key, const Term& t) {
  Polynomial r;
  r.terms[Monomial{{key, 1}}] = 1;
  r.atoms[key] = t;
  return r;
}

Polynomial poly_normal_form(const Term& t, bool opaque) {
  if (t->type->is_arrow() || t->type->sort != "Int")
    throw TheoryError(to_string(t) + " is not an integer term");
  if (t->kind == TermKind::Var) return Polynomial::atom(t->name, t);
  if (is_int_lit(t)) return Polynomial::constant_poly(int_value(t));
  Term h = head(t);
  auto as = args(t);
  if (h->kind == TermKind::Sym && h->theory && as.size() == 2) {
    if (h->name == "+") return poly_normal_form(as[0], opaque) + poly_normal_form(as[1], opaque);
    if (h->name == "-") return poly_normal_form(as[0], opaque) - poly_normal_form(as[1], opaque);
    if (h->name == "*") return poly_normal_form(as[0], opaque) * poly_normal_form(as[1], opaque);
  }
  if (opaque) return Polynomial::atom("{" + to_string(t) + "}", t);
  throw TheoryError("non-polynomial symbol in " + to_string(t));
}

// ---- constraint helpers ----

Term negate(const Term& phi) {
  if (is_bool_lit(phi)) return mk_bool(!bool_value(phi));
  Term h = head(phi);
  auto as = args(phi);
  if (h->kind == TermKind::Sym && h->theory) {
    const std::string& n = h->name;
    if (n == "not" && as.size() == 1) return as[0];
    if (as.size() == 2) {
      if (n == "/\\") return mk_or(negate(as[0]), negate(as[1]));
      if (n == "\\/") return mk_and({negate(as[0]), negate(as[1])});
      static const std::map<std::string, std::string> flip = {{"<", ">="}, {">=", "<"}, {"<=", ">"},
                                                              {">", "<="}, {"=", "!="}, {"!=", "="}};
      auto it = flip.find(n);
      if (it != flip.end()) return mk_bin(it->second, as[0], as[1]);
    }
  }
  return mk_not(phi);
}

std::vector<Term> conjuncts(const Term& phi) {
  std::vector<Term> out;
  Term all = mk_and({phi});
  if (is_bool_lit(all) && bool_value(all)) return out;
  std::vector<Term> stack{all};
  while (!stack.empty()) {
    Term c = stack.back();
    stack.pop_back();
    Term h = head(c);
    auto as = args(c);
    if (h->kind == TermKind::Sym && h->theory && h->name == "/\\" && as.size() == 2) {
      stack.push_back(as[1]);
      stack.push_back(as[0]);
    } else {
      out.push_back(c);
    }
  }
  return out;
}

bool is_constraint(const Term& phi) {
  if (phi->type->is_arrow() || phi->type->sort != "Bool") return false;
  if (!is_theory_term(phi)) return false;
  for (const auto& v : vars_of(phi))
    if (v->type->is_arrow() || !is_theory_sort(v->type->sort)) return false;
  return true;
}

}  // namespace lcstrs
