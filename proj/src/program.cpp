#include "lcstrs/program.hpp"
#include "lcstrs/solver.hpp"
#include "lcstrs/theory.hpp"

#include <functional>
#include <sstream>

namespace lcstrs {

std::string equation_str(const Equation& e) {
  std::string s = to_string(e.lhs) + " ~ " + to_string(e.rhs);
  if (!(is_bool_lit(e.constraint) && bool_value(e.constraint))) s += " [" + to_string(e.constraint) + "]";
  return s;
}

std::string rule_str(const Rule& r) {
  std::string s = to_string(r.lhs) + " -> " + to_string(r.rhs);
  if (!(is_bool_lit(r.constraint) && bool_value(r.constraint))) s += " [" + to_string(r.constraint) + "]";
  return s;
}

const SymbolInfo* Program::find_symbol(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &symbols[it->second];
}

Term Program::symbol(const std::string& name) const {
  const SymbolInfo* s = find_symbol(name);
  if (!s) throw TermError("unknown symbol " + name);
  return mk_sym(s->name, s->type);
}

void Program::declare(const std::string& name, Type type, SymbolRole role) {
  if (index_.count(name)) throw TermError("symbol " + name + " declared twice");
  index_[name] = symbols.size();
  symbols.push_back(SymbolInfo{name, std::move(type), role});
}

const Rule& Program::add_rule(Term lhs, Term rhs, Term constraint) {
  Term h = head(lhs);
  if (h->kind != TermKind::Sym || h->theory)
    throw TermError("left-hand side " + to_string(lhs) + " must be headed by a declared term symbol");
  if (!type_eq(lhs->type, rhs->type))
    throw TermError("rule sides have different types: " + type_str(lhs->type) + " and " + type_str(rhs->type));
  if (!is_constraint(constraint))
    throw TermError("constraint " + to_string(constraint) + " must be a theory term over Int/Bool variables");
  auto allowed = var_names(lhs);
  for (const auto& v : var_names(constraint)) allowed.insert(v);
  std::string missing;
  for (const auto& v : vars_of(rhs))
    if (!allowed.count(v->name)) missing += (missing.empty() ? "" : ", ") + v->name;
  if (!missing.empty())
    throw TermError("variables " + missing +
                    " of the right-hand side occur neither in the left-hand side nor in the constraint");
  int k = static_cast<int>(args(lhs).size());
  auto it = arities_.find(h->name);
  if (it != arities_.end() && it->second != k)
    throw TermError("rules for " + h->name + " have " + std::to_string(it->second) + " and " + std::to_string(k) +
                    " arguments; arity must be unique");
  arities_[h->name] = k;
  std::size_t idx = rules_for(h->name).size();
  rules.push_back(Rule{std::move(lhs), std::move(rhs), std::move(constraint), h->name + ":" + std::to_string(idx)});
  return rules.back();
}

std::vector<const Rule*> Program::rules_for(const std::string& sym) const {
  std::vector<const Rule*> out;
  for (const auto& r : rules)
    if (head(r.lhs)->name == sym) out.push_back(&r);
  return out;
}

const Rule* Program::rule_by_label(const std::string& label) const {
  for (const auto& r : rules)
    if (r.label == label) return &r;
  return nullptr;
}

std::optional<int> Program::arity(const std::string& sym) const {
  if (index_.count(sym)) {
    auto it = arities_.find(sym);
    if (it == arities_.end()) return std::nullopt;
    return it->second;
  }
  int k = theory_arity(mk_sym(sym, int_type(), true));
  if (k > 0) return k;
  return std::nullopt;
}

std::optional<int> Program::arity(const Term& sym) const {
  if (sym->theory) {
    int k = theory_arity(sym);
    if (k > 0) return k;
    return std::nullopt;
  }
  return arity(sym->name);
}

Arity Program::arity_fn() const {
  return [this](const std::string& s) { return arity(s); };
}

std::map<std::string, Type> equation_vars(const Equation& e) {
  std::map<std::string, Type> out;
  for (const Term& t : {e.lhs, e.rhs, e.constraint})
    for (const auto& v : vars_of(t)) out.emplace(v->name, v->type);
  return out;
}

std::map<std::string, Type> rule_vars(const Rule& r) { return equation_vars(Equation{r.lhs, r.rhs, r.constraint}); }

// ---- printing ----

namespace {

Term annotate_vars(const Term& t) {
  Subst s;
  for (const auto& v : vars_of(t)) {
    std::string ty = type_str(v->type);
    if (v->type->is_arrow()) ty = "(" + ty + ")";
    s[v->name] = mk_var(v->name + "::" + ty, v->type);
  }
  return apply_subst(t, s);
}

std::string statement(const std::string& kw, const std::string& sep, const Term& a, const Term& b, const Term& c,
                      const Program& p) {
  auto render = [&](const Term& x, const Term& y, const Term& z) {
    std::string s = to_string(x) + " " + sep + " " + to_string(y);
    if (!(is_bool_lit(z) && bool_value(z))) s += " [" + to_string(z) + "]";
    return s;
  };
  std::string plain = render(a, b, c);
  // Reparse with ~ to check the unannotated form types the same way.
  std::string probe = to_string(a) + " ~ " + to_string(b);
  if (!(is_bool_lit(c) && bool_value(c))) probe += " [" + to_string(c) + "]";
  bool ok = true;
  try {
    std::map<std::string, Type> vars;
    Equation e = parse_equation(probe, p, vars, true);
    ok = term_eq(e.lhs, a) && term_eq(e.rhs, b) && term_eq(e.constraint, c);
  } catch (const std::exception&) {
    ok = false;
  }
  if (ok) return kw + " " + plain + ";";
  return kw + " " + render(annotate_vars(a), annotate_vars(b), annotate_vars(c)) + ";";
}

}  // namespace

std::string print_program(const Program& p) {
  std::ostringstream out;
  for (const auto& s : p.symbols) out << "fun " << s.name << " :: " << type_str(s.type) << ";\n";
  for (const auto& r : p.rules) out << statement("rule", "->", r.lhs, r.rhs, r.constraint, p) << "\n";
  for (const auto& chain : p.precedences) {
    out << "prec";
    for (std::size_t i = 0; i < chain.size(); ++i) out << (i ? " > " : " ") << chain[i];
    out << ";\n";
  }
  for (const auto& e : p.lemmas) out << statement("lemma", "~", e.lhs, e.rhs, e.constraint, p) << "\n";
  for (const auto& e : p.goals) out << statement("goal", "~", e.lhs, e.rhs, e.constraint, p) << "\n";
  return out.str();
}

std::vector<Rule> synth_calc_rules() {
  std::vector<Rule> out;
  std::vector<std::pair<std::string, Type>> ops;
  for (const char* op : {"+", "-", "*", "<", "<=", ">", ">=", "/\\", "\\/", "not"})
    ops.emplace_back(op, theory_op(op)->type);
  for (const char* op : {"=", "!="}) {
    ops.emplace_back(op, theory_op(op, int_type())->type);
    ops.emplace_back(op, theory_op(op, bool_type())->type);
  }
  for (const auto& [op, ty] : ops) {
    Term f = mk_sym(op, ty, true);
    std::vector<Term> xs;
    auto as = arg_types(ty);
    for (std::size_t i = 0; i < as.size(); ++i) xs.push_back(mk_var("x" + std::to_string(i + 1), as[i]));
    Term lhs = mk_apps(f, xs);
    Term y = mk_var("y", result_type(ty));
    out.push_back(Rule{lhs, y, mk_bin("=", y, lhs), "calc"});
  }
  return out;
}

// ---- quasi-reductivity ----

std::string QuasiReductivityReport::str() const {
  std::ostringstream out;
  static const char* names[] = {"pass", "fail", "unverified"};
  out << "quasi-reductivity: " << names[status] << "\n";
  for (const auto& e : entries) {
    out << "  " << e.symbol << ": " << names[e.status];
    if (!e.message.empty()) out << " (" << e.message << ")";
    if (!e.uncovered.empty()) out << "; uncovered: " << e.uncovered;
    out << "\n";
  }
  return out.str();
}

namespace {

// Eliminates constraint variables outside `keep` defined by a top-level
// equality. Returns nullopt if some such variable remains.
std::optional<Term> eliminate_extra(Term phi, const std::set<std::string>& keep) {
  for (int guard = 0; guard < 64; ++guard) {
    std::string extra;
    for (const auto& v : var_names(phi))
      if (!keep.count(v)) extra = v;
    if (extra.empty()) return phi;
    bool done = false;
    for (const auto& c : conjuncts(phi)) {
      Term h = head(c);
      auto as = args(c);
      if (!(h->kind == TermKind::Sym && h->theory && h->name == "=" && as.size() == 2)) continue;
      for (int side = 0; side < 2 && !done; ++side) {
        const Term& v = as[side];
        const Term& e = as[1 - side];
        if (is_var(v) && !keep.count(v->name) && !occurs_var(v->name, e)) {
          phi = apply_subst(phi, {{v->name, e}});
          done = true;
        }
      }
      if (done) break;
    }
    if (!done) return std::nullopt;
  }
  return std::nullopt;
}

bool all_distinct_vars(const std::vector<Term>& as) {
  std::set<std::string> seen;
  for (const auto& a : as)
    if (!is_var(a) || !seen.insert(a->name).second) return false;
  return true;
}

CoverageEntry constraint_coverage(const Program& p, const std::string& f, const std::vector<const Rule*>& rs) {
  CoverageEntry e;
  e.symbol = f;
  auto first = args(rs[0]->lhs);
  std::set<std::string> canon;
  for (const auto& a : first) canon.insert(a->name);
  Term disj;
  for (const Rule* r : rs) {
    auto as = args(r->lhs);
    // Move non-argument variables out of the way, then rename arguments.
    std::set<std::string> used = canon;
    for (const auto& v : var_names(r->constraint)) used.insert(v);
    std::set<std::string> mine;
    for (const auto& a : as) mine.insert(a->name);
    Subst away;
    for (const auto& v : vars_of(r->constraint))
      if (!mine.count(v->name) && canon.count(v->name)) {
        std::string n = fresh_name(v->name, used);
        used.insert(n);
        away[v->name] = mk_var(n, v->type);
      }
    Subst ren;
    for (std::size_t i = 0; i < as.size(); ++i) ren[as[i]->name] = first[i];
    Term psi = apply_subst(apply_subst(r->constraint, away), ren);
    auto elim = eliminate_extra(psi, canon);
    if (!elim) {
      e.status = CoverageEntry::Unverified;
      e.message = "rule " + r->label + " has constraint variables not bound by its left-hand side";
      return e;
    }
    disj = disj ? mk_or(disj, *elim) : *elim;
  }
  (void)p;
  SolverResult v = is_valid(disj);
  if (v.verdict == Verdict::Yes) return e;
  if (v.verdict == Verdict::Unknown) {
    e.status = CoverageEntry::Unverified;
    e.message = "coverage condition undecided";
    return e;
  }
  e.status = CoverageEntry::Fail;
  e.uncovered = to_string(negate(disj));
  std::string w;
  for (const auto& [n, val] : v.model) w += (w.empty() ? "" : ", ") + n + " = " + to_string(val.to_term());
  e.message = "no rule applies for " + (w.empty() ? std::string("some arguments") : w);
  return e;
}

// Pattern-matrix usefulness with witness construction.
struct Coverage {
  const Program& p;

  std::vector<Term> constructors_of(const Type& t) const {
    std::vector<Term> out;
    if (t->is_arrow() || is_theory_sort(t->sort)) return out;
    for (const auto& s : p.symbols) {
      if (s.role != SymbolRole::User || p.is_defined(s.name)) continue;
      if (type_eq(result_type(s.type), t)) out.push_back(mk_sym(s.name, s.type));
    }
    return out;
  }

  static bool is_con_app(const Term& t) { return head(t)->kind == TermKind::Sym; }

  std::optional<std::vector<Term>> useful(const std::vector<std::vector<Term>>& P, const std::vector<Term>& q) const {
    if (q.empty()) {
      if (P.empty()) return std::vector<Term>{};
      return std::nullopt;
    }
    Type ty = q[0]->type;
    std::set<std::string> sigma;
    for (const auto& row : P)
      if (is_con_app(row[0])) sigma.insert(head(row[0])->name);
    auto cons = constructors_of(ty);
    bool complete = !cons.empty();
    for (const auto& c : cons)
      if (!sigma.count(c->name)) complete = false;
    std::vector<Term> rest(q.begin() + 1, q.end());
    if (complete) {
      for (const auto& c : cons) {
        auto ats = arg_types(c->type);
        std::vector<std::vector<Term>> S;
        for (const auto& row : P) {
          std::vector<Term> nr;
          if (is_con_app(row[0])) {
            if (head(row[0])->name != c->name) continue;
            nr = args(row[0]);
          } else {
            for (const auto& at : ats) nr.push_back(mk_var("_", at));
          }
          nr.insert(nr.end(), row.begin() + 1, row.end());
          S.push_back(std::move(nr));
        }
        std::vector<Term> nq;
        for (const auto& at : ats) nq.push_back(mk_var("_", at));
        nq.insert(nq.end(), rest.begin(), rest.end());
        if (auto w = useful(S, nq)) {
          std::vector<Term> cargs(w->begin(), w->begin() + static_cast<long>(ats.size()));
          std::vector<Term> out{mk_apps(c, cargs)};
          out.insert(out.end(), w->begin() + static_cast<long>(ats.size()), w->end());
          return out;
        }
      }
      return std::nullopt;
    }
    std::vector<std::vector<Term>> D;
    for (const auto& row : P)
      if (!is_con_app(row[0])) D.emplace_back(row.begin() + 1, row.end());
    auto w = useful(D, rest);
    if (!w) return std::nullopt;
    Term first = q[0];
    if (!sigma.empty()) {
      for (const auto& c : cons)
        if (!sigma.count(c->name)) {
          std::vector<Term> wild;
          for (const auto& at : arg_types(c->type)) wild.push_back(mk_var("_", at));
          first = mk_apps(c, wild);
          break;
        }
    }
    std::vector<Term> out{first};
    out.insert(out.end(), w->begin(), w->end());
    return out;
  }
};

bool constructor_pattern(const Program& p, const Term& t) {
  if (is_var(t)) return true;
  Term h = head(t);
  if (h->kind != TermKind::Sym || h->theory || p.is_defined(h->name)) return false;
  if (t->type->is_arrow() || is_theory_sort(t->type->sort)) return false;
  for (const auto& a : args(t))
    if (!constructor_pattern(p, a)) return false;
  return true;
}

}  // namespace

QuasiReductivityReport check_quasi_reductivity(const Program& p) {
  QuasiReductivityReport rep;
  std::vector<std::string> order;
  for (const auto& r : p.rules) {
    std::string f = head(r.lhs)->name;
    if (std::find(order.begin(), order.end(), f) == order.end()) order.push_back(f);
  }
  for (const auto& f : order) {
    auto rs = p.rules_for(f);
    bool vars_only = true, cons_only = true, unconstrained = true;
    for (const Rule* r : rs) {
      auto as = args(r->lhs);
      if (!all_distinct_vars(as)) vars_only = false;
      for (const auto& a : as)
        if (!constructor_pattern(p, a)) cons_only = false;
      if (!(is_bool_lit(r->constraint) && bool_value(r->constraint))) unconstrained = false;
    }
    CoverageEntry e;
    e.symbol = f;
    if (vars_only) {
      e = constraint_coverage(p, f, rs);
    } else if (cons_only && unconstrained) {
      Coverage cov{p};
      std::vector<std::vector<Term>> P;
      for (const Rule* r : rs) P.push_back(args(r->lhs));
      std::vector<Term> q;
      for (const auto& a : args(rs[0]->lhs)) q.push_back(mk_var("_", a->type));
      if (auto w = cov.useful(P, q)) {
        e.status = CoverageEntry::Fail;
        Term h = head(rs[0]->lhs);
        e.uncovered = to_string(mk_apps(h, *w));
        e.message = "missing constructor case";
      }
    } else {
      e.status = CoverageEntry::Unverified;
      e.message = "patterns outside the checked fragment";
    }
    if (e.status == CoverageEntry::Fail) {
      rep.status = CoverageEntry::Fail;
    } else if (e.status == CoverageEntry::Unverified && rep.status == CoverageEntry::Pass) {
      rep.status = CoverageEntry::Unverified;
    }
    rep.entries.push_back(e);
  }
  return rep;
}

}  // namespace lcstrs
