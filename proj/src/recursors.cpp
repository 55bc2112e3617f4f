#include "lcstrs/templates.hpp"

namespace lcstrs {

const std::vector<std::string>& recursor_names() {
  static const std::vector<std::string> names = {"tailup", "taildn", "recup", "recdn"};
  return names;
}

const Rule& add_rule_text(Program& p, const std::string& lhs, const std::string& rhs, const std::string& phi) {
  std::map<std::string, Type> vars;
  Term l = parse_term(lhs, p, vars);
  Term r = parse_term(rhs, p, vars, true, false, l->type);
  Term c = phi.empty() ? mk_bool(true) : parse_term(phi, p, vars, true, false, bool_type());
  return p.add_rule(l, r, c);
}

bool has_recursors(const Program& p) {
  for (const auto& n : recursor_names()) {
    const SymbolInfo* s = p.find_symbol(n);
    if (!s || s->role != SymbolRole::Recursor) return false;
  }
  return true;
}

void install_recursors(Program& p) {
  for (const auto& n : recursor_names())
    if (p.find_symbol(n)) throw TermError("cannot install recursors: " + n + " is already declared");
  Type i = int_type();
  Type f = arrows({i, i}, i);
  Type rt = arrows({f, i, i, i}, i);
  for (const auto& n : recursor_names()) p.declare(n, rt, SymbolRole::Recursor);
  add_rule_text(p, "tailup f i y a", "a", "i > y");
  add_rule_text(p, "tailup f i y a", "tailup f (i + 1) y (f i a)", "i <= y");
  add_rule_text(p, "taildn f x i a", "a", "i < x");
  add_rule_text(p, "taildn f x i a", "taildn f x (i - 1) (f a i)", "i >= x");
  add_rule_text(p, "recup f i y z", "z", "i > y");
  add_rule_text(p, "recup f i y z", "f (recup f (i + 1) y z) i", "i <= y");
  add_rule_text(p, "recdn f x i z", "z", "i < x");
  add_rule_text(p, "recdn f x i z", "f i (recdn f x (i - 1) z)", "i >= x");
}

bool recursor_free(const Equation& e, const Program& p) {
  for (const auto& s : p.symbols) {
    if (s.role != SymbolRole::Recursor) continue;
    if (contains_sym(e.lhs, s.name) || contains_sym(e.rhs, s.name) || contains_sym(e.constraint, s.name))
      return false;
  }
  return true;
}

}  // namespace lcstrs
