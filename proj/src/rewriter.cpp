#include "lcstrs/rewriter.hpp"

#include "lcstrs/solver.hpp"
#include "lcstrs/theory.hpp"

namespace lcstrs {

namespace {

std::vector<Term> take(const std::vector<Term>& as, std::size_t k) { return {as.begin(), as.begin() + k}; }
std::vector<Term> drop(const std::vector<Term>& as, std::size_t k) { return {as.begin() + k, as.end()}; }

// Matches the rule's left-hand side against the first k arguments of t.
std::optional<Subst> match_prefix(const Rule& r, const Term& t, std::size_t& used) {
  Term lh = head(r.lhs), th = head(t);
  if (th->kind != TermKind::Sym || th->name != lh->name || th->theory != lh->theory) return std::nullopt;
  auto la = args(r.lhs), ta = args(t);
  if (ta.size() < la.size()) return std::nullopt;
  Term prefix = mk_apps(th, take(ta, la.size()));
  auto g = match_term(r.lhs, prefix);
  if (g) used = la.size();
  return g;
}

// Ground instantiation of a rule constraint: variables outside the matcher
// are defined by equations where possible, otherwise by a solver model.
std::optional<Subst> respect(const Rule& r, Subst g) {
  for (const auto& v : vars_of(r.constraint)) {
    auto it = g.find(v->name);
    if (it != g.end() && !is_value(it->second)) return std::nullopt;
  }
  Term psi = apply_subst(r.constraint, g);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& c : conjuncts(psi)) {
      Term h = head(c);
      auto as = args(c);
      if (!(h->theory && h->name == "=" && as.size() == 2)) continue;
      for (int side = 0; side < 2; ++side) {
        if (is_var(as[side]) && is_ground(as[1 - side])) {
          Term val = eval_ground(as[1 - side]).to_term();
          g[as[side]->name] = val;
          psi = apply_subst(psi, {{as[side]->name, val}});
          changed = true;
          break;
        }
      }
      if (changed) break;
    }
  }
  if (!is_ground(psi)) {
    SolverResult m = is_satisfiable(psi);
    if (m.verdict != Verdict::Yes) return std::nullopt;
    Subst ms;
    for (const auto& [n, v] : m.model) ms[n] = v.to_term();
    for (const auto& [n, t] : ms) g[n] = t;
    psi = apply_subst(psi, ms);
  }
  if (!eval_ground(psi).b) return std::nullopt;
  return g;
}

std::optional<Term> reduce_node(const Term& t, const Program& p, std::string& label) {
  Term h = head(t);
  if (h->kind != TermKind::Sym) return std::nullopt;
  auto as = args(t);
  if (h->theory) {
    auto k = static_cast<std::size_t>(theory_arity(h));
    if (k == 0 || as.size() < k) return std::nullopt;
    for (std::size_t i = 0; i < k; ++i)
      if (!is_value(as[i])) return std::nullopt;
    label = "calc";
    return mk_apps(eval_ground(mk_apps(h, take(as, k))).to_term(), drop(as, k));
  }
  for (const Rule* r : p.rules_for(h->name)) {
    std::size_t used = 0;
    auto g = match_prefix(*r, t, used);
    if (!g) continue;
    auto full = respect(*r, *g);
    if (!full) continue;
    label = r->label;
    return mk_apps(apply_subst(r->rhs, *full), drop(as, used));
  }
  return std::nullopt;
}

std::optional<GroundStep> innermost(const Term& t, const Program& p, Position& pos) {
  auto as = args(t);
  for (std::size_t i = 0; i < as.size(); ++i) {
    pos.push_back(static_cast<int>(i));
    if (auto s = innermost(as[i], p, pos)) {
      as[i] = s->result;
      s->result = mk_apps(head(t), as);
      return s;
    }
    pos.pop_back();
  }
  std::string label;
  if (auto r = reduce_node(t, p, label)) return GroundStep{*r, label, pos};
  return std::nullopt;
}

std::set<std::string> all_names(const Term& s, const Term& phi, const std::set<std::string>& avoid) {
  std::set<std::string> used = avoid;
  for (const auto& v : var_names(s)) used.insert(v);
  for (const auto& v : var_names(phi)) used.insert(v);
  return used;
}

bool theory_base_var(const Term& t) { return is_var(t) && is_base_type(t) && is_theory_sort(t->type->sort); }

void refuse(RewriteRefusal* why, const std::string& msg) {
  if (why) why->reason = msg;
}

// z' for a term over the single variable z, otherwise a fresh w.
std::string def_name(const Term& e, const std::set<std::string>& used) {
  auto vs = vars_of(e);
  if (vs.size() == 1) {
    std::string n = vs[0]->name + "'";
    for (int k = 0; k < 2; ++k, n += "'")
      if (!used.count(n)) return n;
  }
  return fresh_name(vs.size() == 1 ? vs[0]->name : "w", used);
}

}  // namespace

std::optional<GroundStep> reduce_ground_once(const Term& t, const Program& p) {
  Position pos;
  return innermost(t, p, pos);
}

NormalizeResult normalize(const Term& t, const Program& p, long fuel) {
  NormalizeResult res{t, 0, false};
  while (true) {
    auto s = reduce_ground_once(res.term, p);
    if (!s) return res;
    if (res.steps >= fuel) {
      res.exhausted = true;
      return res;
    }
    res.term = s->result;
    ++res.steps;
  }
}

Joinable joinable(const Term& s, const Term& t, const Program& p, long fuel) {
  auto a = normalize(s, p, fuel);
  auto b = normalize(t, p, fuel);
  if (a.exhausted || b.exhausted) return Joinable::FuelExhausted;
  return term_eq(a.term, b.term) ? Joinable::Yes : Joinable::No;
}

bool computable_under(const Term& e, const Term& phi) {
  (void)phi;
  // Base-sorted theory variables range over values (see the decisions
  // ledger), so every theory term over them is computable.
  if (!is_theory_term(e) || !is_base_type(e)) return false;
  for (const auto& v : vars_of(e))
    if (!theory_base_var(v)) return false;
  return true;
}

std::optional<RewriteResult> constrained_rewrite(const Term& s, const Term& phi, const Rule& rule,
                                                 const Position& pos, const std::set<std::string>& avoid,
                                                 RewriteRefusal* why) {
  auto sub = subterm_at(s, pos);
  if (!sub) {
    refuse(why, "no subterm at position " + position_str(pos));
    return std::nullopt;
  }
  std::set<std::string> used = all_names(s, phi, avoid);
  // Rename the rule apart.
  Subst ren;
  std::set<std::string> rule_vars_seen;
  for (const Term& part : {rule.lhs, rule.rhs, rule.constraint})
    for (const auto& v : vars_of(part)) {
      if (!rule_vars_seen.insert(v->name).second) continue;
      std::string n = used.count(v->name) ? fresh_name(v->name, used) : v->name;
      used.insert(n);
      ren[v->name] = mk_var(n, v->type);
    }
  Rule r{apply_subst(rule.lhs, ren), apply_subst(rule.rhs, ren), apply_subst(rule.constraint, ren), rule.label};
  std::size_t consumed = 0;
  auto g = match_prefix(r, *sub, consumed);
  if (!g) {
    refuse(why, "rule " + rule.label + " does not match " + to_string(*sub));
    return std::nullopt;
  }
  Term ext = phi;
  std::vector<std::pair<std::string, Term>> defs;
  auto define = [&](const Term& e) {
    std::string n = def_name(e, used);
    used.insert(n);
    Term w = mk_var(n, e->type);
    defs.emplace_back(n, e);
    ext = mk_and({ext, mk_bin("=", w, e)});
    return w;
  };
  // Constraint variables bound by the match must denote values.
  for (const auto& v : vars_of(r.constraint)) {
    auto it = g->find(v->name);
    if (it == g->end()) continue;
    const Term& e = it->second;
    if (is_value(e) || theory_base_var(e)) continue;
    if (!computable_under(e, phi)) {
      refuse(why, "constraint variable " + v->name + " of " + rule.label + " bound to non-theory term " +
                      to_string(e));
      return std::nullopt;
    }
    it->second = define(e);
  }
  Term psi = apply_subst(r.constraint, *g);
  // Variables of the rule outside its left-hand side must be defined by an
  // equation of the constraint.
  std::set<std::string> open;
  for (const auto& name : var_names(r.constraint))
    if (!g->count(name)) open.insert(name);
  Term residual = psi;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& c : conjuncts(residual)) {
      Term h = head(c);
      auto as = args(c);
      if (!(h->theory && h->name == "=" && as.size() == 2)) continue;
      for (int side = 0; side < 2; ++side) {
        if (is_var(as[side]) && open.count(as[side]->name) && !occurs_var(as[side]->name, as[1 - side])) {
          bool closed = true;
          for (const auto& v : var_names(as[1 - side]))
            if (open.count(v)) closed = false;
          if (!closed) continue;
          const Term& e = as[1 - side];
          Term w = mk_var(as[side]->name, e->type);
          defs.emplace_back(w->name, e);
          ext = mk_and({ext, mk_bin("=", w, e)});
          (*g)[w->name] = w;
          open.erase(w->name);
          changed = true;
          break;
        }
      }
      if (changed) break;
    }
  }
  if (!open.empty()) {
    refuse(why, "rule " + rule.label + " has constraint variables without a definition");
    return std::nullopt;
  }
  SolverResult ent = entails(ext, psi);
  if (ent.verdict != Verdict::Yes) {
    refuse(why, std::string("entailment failed: ") + to_string(ext) + " does not entail " + to_string(psi) + " (" +
                    verdict_str(ent.verdict) + ")");
    return std::nullopt;
  }
  Term rhs = mk_apps(apply_subst(r.rhs, *g), drop(args(*sub), consumed));
  RewriteResult res;
  res.term = replace_at(s, pos, rhs);
  res.constraint = ext;
  res.label = rule.label;
  res.pos = pos;
  res.defs = std::move(defs);
  return res;
}

std::optional<RewriteResult> abstract_calc(const Term& s, const Term& phi, const Position& pos,
                                           const std::set<std::string>& avoid, RewriteRefusal* why) {
  auto sub = subterm_at(s, pos);
  if (!sub) {
    refuse(why, "no subterm at position " + position_str(pos));
    return std::nullopt;
  }
  const Term& e = *sub;
  if (is_var(e) || is_value(e) || !computable_under(e, phi)) {
    refuse(why, to_string(e) + " is not a calculation");
    return std::nullopt;
  }
  RewriteResult res;
  res.label = "calc";
  res.pos = pos;
  if (is_ground(e)) {
    res.term = replace_at(s, pos, eval_ground(e).to_term());
    res.constraint = phi;
    return res;
  }
  std::set<std::string> used = all_names(s, phi, avoid);
  std::string n = def_name(e, used);
  Term w = mk_var(n, e->type);
  res.term = replace_at(s, pos, w);
  res.constraint = mk_and({phi, mk_bin("=", w, e)});
  res.defs.emplace_back(n, e);
  return res;
}

std::vector<RewriteResult> enumerate_rewrites(const Term& s, const Term& phi, const Program& p,
                                              const std::set<std::string>& avoid) {
  std::vector<RewriteResult> out;
  auto ps = positions(s);
  for (const auto& pos : ps) {
    Term sub = *subterm_at(s, pos);
    Term h = head(sub);
    if (h->kind != TermKind::Sym || h->theory) continue;
    for (const Rule* r : p.rules_for(h->name))
      if (auto res = constrained_rewrite(s, phi, *r, pos, avoid)) out.push_back(*res);
  }
  for (const auto& pos : ps) {
    Term sub = *subterm_at(s, pos);
    if (is_var(sub) || is_value(sub) || !computable_under(sub, phi)) continue;
    // Only maximal theory subterms; their parents are not calculations.
    if (!pos.empty()) {
      Position up(pos.begin(), pos.end() - 1);
      Term parent = *subterm_at(s, up);
      if (computable_under(parent, phi)) continue;
    }
    if (auto res = abstract_calc(s, phi, pos, avoid)) out.push_back(*res);
  }
  return out;
}

}  // namespace lcstrs
