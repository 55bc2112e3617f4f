#include "lcstrs/horpo.hpp"

#include "lcstrs/solver.hpp"
#include "lcstrs/theory.hpp"

#include <functional>

namespace lcstrs {

const char* cmp_str(Cmp c) {
  switch (c) {
    case Cmp::GT:
      return "GT";
    case Cmp::GEQ:
      return "GEQ";
    default:
      return "Unknown";
  }
}

std::string requirement_str(const OrderingRequirement& r) {
  std::string s = to_string(r.left) + (r.strict ? " > " : " >= ") + to_string(r.right);
  if (!(is_bool_lit(r.constraint) && bool_value(r.constraint))) s += " [" + to_string(r.constraint) + "]";
  return s;
}

std::string Measure::str(const std::vector<std::string>& names) const {
  std::string e;
  for (const auto& [pos, c] : coefs) {
    std::string n = pos < static_cast<int>(names.size()) ? names[pos] : "#" + std::to_string(pos);
    if (e.empty())
      e = (c < 0 ? "-" : "") + n;
    else
      e += (c < 0 ? " - " : " + ") + n;
  }
  if (constant > 0) e += " + " + std::to_string(constant);
  if (constant < 0) e += " - " + std::to_string(-constant);
  return "max(" + (e.empty() ? std::string("0") : e) + ", 0)";
}

// ---- precedence ----

namespace {

int recursor_tier(const std::string& n) {
  if (n == "tailup") return 6;
  if (n == "taildn") return 5;
  if (n == "recup") return 4;
  if (n == "recdn") return 3;
  return 3;
}

void called_symbols(const Term& t, std::set<std::string>& out) {
  Term h = head(t);
  if (h->kind == TermKind::Sym && !h->theory) out.insert(h->name);
  for (const auto& a : args(t)) called_symbols(a, out);
}

}  // namespace

Precedence Precedence::for_program(const Program& p) {
  Precedence pr;
  for (const auto& s : p.symbols) {
    switch (s.role) {
      case SymbolRole::Recursor:
        pr.tiers_[s.name] = recursor_tier(s.name);
        break;
      case SymbolRole::Synthesized:
        pr.tiers_[s.name] = 2;
        break;
      default:
        pr.tiers_[s.name] = p.is_defined(s.name) ? 10 : 1;
    }
  }
  // Direct edges among user-defined symbols.
  std::map<std::string, std::set<std::string>> edges;
  for (const auto& r : p.rules) {
    std::string f = head(r.lhs)->name;
    if (pr.tier(f) != 10) continue;
    std::set<std::string> callees;
    called_symbols(r.rhs, callees);
    for (const auto& g : callees)
      if (g != f && pr.tier(g) == 10) edges[f].insert(g);
  }
  auto reach = [&](const std::string& from) {
    std::set<std::string> seen;
    std::vector<std::string> todo{from};
    while (!todo.empty()) {
      std::string x = todo.back();
      todo.pop_back();
      for (const auto& y : edges[x])
        if (seen.insert(y).second) todo.push_back(y);
    }
    return seen;
  };
  // Call-graph edges inside a strongly connected component do not order.
  std::map<std::string, std::set<std::string>> pruned;
  for (const auto& [f, gs] : edges)
    for (const auto& g : gs)
      if (!reach(g).count(f)) pruned[f].insert(g);
  edges = pruned;
  for (const auto& chain : p.precedences)
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
      const auto& f = chain[i];
      const auto& g = chain[i + 1];
      if (pr.tier(f) != 10 || pr.tier(g) != 10)
        throw TermError("prec directive orders " + f + " and " + g + "; only defined symbols can be ordered");
      edges[f].insert(g);
    }
  for (const auto& s : p.symbols) {
    if (pr.tier(s.name) != 10) continue;
    auto r = reach(s.name);
    if (r.count(s.name))
      throw TermError("precedence is cyclic at " + s.name + " (call graph combined with prec directives)");
    pr.above_[s.name] = r;
  }
  return pr;
}

int Precedence::tier(const std::string& name) const {
  auto it = tiers_.find(name);
  return it == tiers_.end() ? 0 : it->second;
}

bool Precedence::greater(const Term& f, const Term& g) const {
  int tf = f->theory || is_hole(f) ? 0 : tier(f->name);
  int tg = g->theory || is_hole(g) ? 0 : tier(g->name);
  if (tf != tg) return tf > tg;
  if (tf == 10) {
    auto it = above_.find(f->name);
    return it != above_.end() && it->second.count(g->name);
  }
  return false;
}

// ---- comparison ----

namespace {

bool value_var(const Term& v) { return is_var(v) && is_base_type(v) && is_theory_sort(v->type->sort); }

// Instances are ground theory terms of exactly the same size.
bool theory_like(const Term& t) {
  if (!is_base_type(t) || !is_theory_term(t)) return false;
  for (const auto& v : vars_of(t))
    if (!value_var(v)) return false;
  return true;
}

// Every instance keeps a non-theory symbol (no symbol is ever erased by
// substitution). Holes may be filled by theory symbols, so they do not count.
bool has_term_symbol(const Term& t) {
  if (t->kind == TermKind::Sym) return !t->theory && !is_hole(t);
  if (t->kind == TermKind::App) return has_term_symbol(t->fun) || has_term_symbol(t->arg);
  return false;
}

bool same_head(const Term& a, const Term& b) {
  return a->kind == b->kind && a->name == b->name && (a->kind != TermKind::Sym || a->theory == b->theory);
}

struct Comparer {
  const Ordering& ord;
  const Term& phi;

  bool entailed(const Term& psi) const { return entails(phi, psi).verdict == Verdict::Yes; }

  std::optional<Term> measure_expr(const Measure& m, const std::vector<Term>& as) const {
    Term e = mk_int(m.constant);
    for (const auto& [pos, c] : m.coefs) {
      if (pos >= static_cast<int>(as.size()) || !theory_like(as[pos]) || as[pos]->type->sort != "Int")
        return std::nullopt;
      e = mk_bin("+", e, mk_bin("*", mk_int(c), as[pos]));
    }
    return e;
  }

  Cmp run(const Term& s, const Term& t) const {
    if (term_eq(s, t)) return Cmp::GEQ;
    bool ts = theory_like(s), tt = theory_like(t);
    if (ts && tt) return s->size > t->size ? Cmp::GT : Cmp::Unknown;
    if (ts) return Cmp::Unknown;
    if (tt) return has_term_symbol(s) ? Cmp::GT : Cmp::Unknown;

    auto sa = args(s), ta = args(t);
    // Subterm: some argument already dominates t.
    for (const auto& si : sa)
      if (run(si, t) != Cmp::Unknown) return Cmp::GT;

    // A variable is only reachable as a subterm.
    if (is_var(t)) return Cmp::Unknown;
    Term hs = head(s), ht = head(t);
    auto dominates_all = [&](const std::vector<Term>& ts_, std::size_t from) {
      for (std::size_t j = from; j < ts_.size(); ++j)
        if (run(s, ts_[j]) != Cmp::GT) return false;
      return true;
    };
    if (hs->kind == TermKind::Sym) {
      if (ht->kind == TermKind::Var) {
        // s > x t1 .. tm if s dominates the variable and every argument.
        if (run(s, ht) == Cmp::GT && dominates_all(ta, 0)) return Cmp::GT;
        return Cmp::Unknown;
      }
      if (ord.precedence().greater(hs, ht)) return dominates_all(ta, 0) ? Cmp::GT : Cmp::Unknown;
    }
    if (!same_head(hs, ht) || sa.size() != ta.size()) return Cmp::Unknown;

    if (hs->kind == TermKind::Var) {
      // Monotonicity under a common variable head.
      bool strict = false;
      for (std::size_t i = 0; i < sa.size(); ++i) {
        Cmp c = run(sa[i], ta[i]);
        if (c == Cmp::Unknown) return Cmp::Unknown;
        strict = strict || c == Cmp::GT;
      }
      return strict ? Cmp::GT : Cmp::Unknown;
    }

    auto mit = ord.measures().find(hs->name);
    if (!hs->theory && mit != ord.measures().end()) {
      auto es = measure_expr(mit->second, sa), et = measure_expr(mit->second, ta);
      if (es && et) {
        Term decrease = mk_and({mk_bin(">=", *es, mk_int(1)), mk_bin(">", *es, *et)});
        if (entailed(decrease)) return dominates_all(ta, 0) ? Cmp::GT : Cmp::Unknown;
        Term nonincrease = mk_or(mk_bin("<=", *et, mk_int(0)), mk_bin(">=", *es, *et));
        if (!entailed(nonincrease)) return Cmp::Unknown;
      }
    }
    // Lexicographic over the arguments.
    for (std::size_t i = 0; i < sa.size(); ++i) {
      Cmp c = run(sa[i], ta[i]);
      if (c == Cmp::GEQ) continue;
      if (c == Cmp::GT && dominates_all(ta, i + 1)) return Cmp::GT;
      return Cmp::Unknown;
    }
    return Cmp::Unknown;
  }
};

}  // namespace

Cmp Ordering::compare(const Term& s, const Term& t, const Term& phi) const {
  if (!type_eq(s->type, t->type)) return Cmp::Unknown;
  return Comparer{*this, phi}.run(s, t);
}

bool Ordering::satisfied(const OrderingRequirement& r) const {
  Cmp c = compare(r.left, r.right, r.constraint);
  return c == Cmp::GT || (!r.strict && c == Cmp::GEQ);
}

std::vector<Measure> measure_candidates(const Type& sym_type) {
  std::vector<int> ints;
  auto ats = arg_types(sym_type);
  for (std::size_t j = 0; j < ats.size(); ++j)
    if (!ats[j]->is_arrow() && ats[j]->sort == "Int") ints.push_back(static_cast<int>(j));
  std::vector<Measure> out;
  for (int j : ints)
    for (int sign : {1, -1})
      for (int c : {0, 1}) out.push_back(Measure{{{j, sign}}, c});
  for (std::size_t a = 0; a < ints.size(); ++a)
    for (std::size_t b = a + 1; b < ints.size(); ++b)
      for (auto [sa, sb] : {std::pair{1, -1}, std::pair{-1, 1}, std::pair{1, 1}, std::pair{-1, -1}})
        for (int c : {0, 1}) out.push_back(Measure{{{ints[a], sa}, {ints[b], sb}}, c});
  return out;
}

namespace {

std::vector<std::string> param_names(const Program& p, const std::string& f) {
  std::vector<std::string> names;
  auto rs = p.rules_for(f);
  if (rs.empty()) return names;
  for (const auto& a : args(rs[0]->lhs)) names.push_back(is_var(a) ? a->name : "#" + std::to_string(names.size()));
  return names;
}

}  // namespace

Ordering Ordering::for_program(const Program& p) {
  Ordering ord;
  ord.prec_ = Precedence::for_program(p);
  for (const auto& s : p.symbols) {
    auto rs = p.rules_for(s.name);
    bool recursive = false;
    for (const Rule* r : rs)
      if (contains_sym(r->rhs, s.name)) recursive = true;
    if (!recursive) continue;
    auto orients = [&]() {
      for (const Rule* r : rs)
        if (ord.compare(r->lhs, r->rhs, r->constraint) != Cmp::GT) return false;
      return true;
    };
    if (orients()) continue;
    for (const auto& m : measure_candidates(s.type)) {
      ord.measures_[s.name] = m;
      if (orients()) break;
      ord.measures_.erase(s.name);
    }
  }
  return ord;
}

OrientationReport orient_rules(const std::vector<Rule>& rules, const Ordering& ord) {
  OrientationReport rep;
  for (const auto& r : rules)
    if (ord.compare(r.lhs, r.rhs, r.constraint) != Cmp::GT) {
      rep.ok = false;
      rep.failed.push_back(r.label);
    }
  return rep;
}

OrientationReport orient_rules(const Program& p, const Ordering& ord) {
  OrientationReport rep = orient_rules(p.rules, ord);
  for (const auto& [f, m] : ord.measures()) rep.measures[f] = m.str(param_names(p, f));
  return rep;
}

std::vector<OrderingRequirement> discharge(const std::vector<OrderingRequirement>& reqs, const Ordering& ord) {
  std::vector<OrderingRequirement> bad;
  for (const auto& r : reqs)
    if (!ord.satisfied(r)) bad.push_back(r);
  return bad;
}

}  // namespace lcstrs
