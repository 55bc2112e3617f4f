#include "lcstrs/kernel.hpp"

#include "lcstrs/solver.hpp"
#include "lcstrs/templates.hpp"
#include "lcstrs/theory.hpp"

#include <cstdio>

namespace lcstrs {

using nlohmann::json;

namespace {

const std::pair<StepKind, const char*> kKindNames[] = {
    {StepKind::Simplify, "simplify"},     {StepKind::Case, "case"},
    {StepKind::Delete, "delete"},         {StepKind::Induct, "induct"},
    {StepKind::HDelete, "hdelete"},       {StepKind::Hypothesis, "hypothesis"},
    {StepKind::AddLemma, "add-lemma"},    {StepKind::AssumeAxiom, "assume-axiom"},
    {StepKind::InstallRecursors, "install-recursors"}, {StepKind::DefineSymbol, "define-symbol"},
};

[[noreturn]] void reject(const char* code, const std::string& msg) { throw StepRejected(code, msg); }

std::set<std::string> context_names(const EquationContext& c) {
  std::set<std::string> out;
  for (const Term& t : {c.bound_left, c.bound_right, c.eq.lhs, c.eq.rhs, c.eq.constraint})
    for (const auto& n : var_names(t)) out.insert(n);
  return out;
}

// Renames the variables of e away from `used`.
Equation rename_apart(const Equation& e, std::set<std::string> used) {
  Subst ren;
  for (const auto& [n, ty] : equation_vars(e)) {
    std::string m = used.count(n) ? fresh_name(n, used) : n;
    used.insert(m);
    ren[n] = mk_var(m, ty);
  }
  return {apply_subst(e.lhs, ren), apply_subst(e.rhs, ren), apply_subst(e.constraint, ren)};
}

bool theory_like(const Term& t) {
  if (!is_base_type(t) || !is_theory_term(t)) return false;
  for (const auto& v : vars_of(t))
    if (!is_theory_sort(v->type->sort) || !is_base_type(v)) return false;
  return true;
}

const char* refusal_code(const RewriteRefusal& why) {
  return why.reason.rfind("entailment failed", 0) == 0 ? reason::kEntailment : reason::kNoMatch;
}

Term side_of(const EquationContext& c, const std::string& side) {
  if (side == "left") return c.eq.lhs;
  if (side == "right") return c.eq.rhs;
  reject(reason::kBadStep, "side must be left or right, got '" + side + "'");
}

}  // namespace

const char* step_kind_str(StepKind k) {
  for (const auto& [kind, name] : kKindNames)
    if (kind == k) return name;
  return "?";
}

const char* proof_verdict_str(ProofVerdict v) {
  switch (v) {
    case ProofVerdict::Open: return "open";
    case ProofVerdict::Proved: return "proved";
    case ProofVerdict::Conditional: return "conditional";
  }
  return "?";
}

json ProofStep::to_json() const {
  json j;
  j["rule"] = step_kind_str(kind);
  if (target >= 0) j["target"] = target;
  if (!side.empty()) j["side"] = side;
  if (kind == StepKind::Simplify || kind == StepKind::Hypothesis) j["pos"] = pos;
  if (!rule.empty()) j["using"] = rule;
  if (!split.empty()) j["split"] = split;
  if (!hyp.empty()) j["hypothesis"] = hyp;
  if (!direction.empty()) j["direction"] = direction;
  if (!equation.empty()) j["equation"] = equation;
  if (!justification.empty()) j["justification"] = justification;
  if (!symbol.empty()) j["symbol"] = symbol;
  if (!type.empty()) j["type"] = type;
  if (!rules.empty()) {
    j["rules"] = json::array();
    for (const auto& r : rules) j["rules"].push_back({{"lhs", r.lhs}, {"rhs", r.rhs}, {"constraint", r.constraint}});
  }
  return j;
}

ProofStep ProofStep::from_json(const json& j) {
  ProofStep s;
  if (!j.is_object() || !j.contains("rule") || !j["rule"].is_string()) reject(reason::kBadStep, "step without rule");
  std::string name = j["rule"];
  bool known = false;
  for (const auto& [kind, n] : kKindNames)
    if (name == n) {
      s.kind = kind;
      known = true;
    }
  if (!known) reject(reason::kBadStep, "unknown step rule '" + name + "'");
  try {
    s.target = j.value("target", -1);
    s.side = j.value("side", "");
    s.pos = j.value("pos", Position{});
    s.rule = j.value("using", "");
    s.split = j.value("split", "");
    s.hyp = j.value("hypothesis", "");
    s.direction = j.value("direction", "");
    s.equation = j.value("equation", "");
    s.justification = j.value("justification", "");
    s.symbol = j.value("symbol", "");
    s.type = j.value("type", "");
    if (j.contains("rules"))
      for (const auto& r : j["rules"])
        s.rules.push_back({r.value("lhs", ""), r.value("rhs", ""), r.value("constraint", "")});
  } catch (const json::exception& e) {
    reject(reason::kBadStep, std::string("malformed step: ") + e.what());
  }
  return s;
}

namespace {

Term canon(const Term& t) {
  Term h = head(t);
  auto as = args(t);
  for (auto& a : as) a = canon(a);
  Term u = mk_apps(h, as);
  if (is_base_type(u) && u->type->sort == "Int") return poly_normal_form(u, true).to_term();
  return u;
}

bool match_structural(const Term& p, const Term& s, const Term& phi, Subst& out,
                      std::vector<std::pair<Term, Term>>& deferred) {
  if (!type_eq(p->type, s->type)) return false;
  switch (p->kind) {
    case TermKind::Var: {
      auto it = out.find(p->name);
      if (it != out.end()) return equal_modulo_theory(it->second, s, phi);
      out.emplace(p->name, s);
      return true;
    }
    case TermKind::Sym:
      return term_eq(p, s) || (theory_like(p) && theory_like(s) && equal_modulo_theory(p, s, phi));
    case TermKind::App: {
      if (theory_like(p) && theory_like(s)) {
        Subst trial = out;
        std::vector<std::pair<Term, Term>> inner;
        if (s->kind == TermKind::App && match_structural(p->fun, s->fun, phi, trial, inner) &&
            match_structural(p->arg, s->arg, phi, trial, inner)) {
          out = std::move(trial);
          deferred.insert(deferred.end(), inner.begin(), inner.end());
          return true;
        }
        deferred.emplace_back(p, s);
        return true;
      }
      if (s->kind != TermKind::App) return false;
      return match_structural(p->fun, s->fun, phi, out, deferred) &&
             match_structural(p->arg, s->arg, phi, out, deferred);
    }
  }
  return false;
}

// The multiset {lhs, rhs} lies strictly below {bound_left, bound_right}:
// either both sides are strictly dominated, or one side still equals its
// own bound and the other is strictly below the other bound.
bool occurs_any(const Term& phi, const std::vector<Term>& vs) {
  for (const auto& v : vs)
    if (occurs_var(v->name, phi)) return true;
  return false;
}

// Maps each Int variable of s and t to the first variable the constraint
// proves equal to it.
Subst entailed_var_classes(const Term& s, const Term& t, const Term& phi) {
  std::vector<Term> vs;
  for (const Term& u : {s, t})
    for (const Term& v : vars_of(u))
      if (is_base_type(v) && v->type->sort == "Int" &&
          std::none_of(vs.begin(), vs.end(), [&](const Term& w) { return w->name == v->name; }))
        vs.push_back(v);
  Subst out;
  if (vs.size() < 2 || vs.size() > 8 || !occurs_any(phi, vs)) return out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (out.count(vs[i]->name)) continue;
    for (std::size_t j = i + 1; j < vs.size(); ++j)
      if (!out.count(vs[j]->name) && entails(phi, mk_bin("=", vs[i], vs[j])).verdict == Verdict::Yes)
        out[vs[j]->name] = vs[i];
  }
  return out;
}

bool bounds_decreased(const EquationContext& c) {
  const Dominance& l = c.left_dom;
  const Dominance& r = c.right_dom;
  if (l.strict && r.strict) return true;
  if (!l.strict && !r.strict) return false;
  const Dominance& eq_side = l.strict ? r : l;
  const Dominance& strict_side = l.strict ? l : r;
  return eq_side.by_right != strict_side.by_right;
}

}  // namespace

std::string text_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool equal_modulo_theory(const Term& s, const Term& t, const Term& phi) {
  if (term_eq(s, t)) return true;
  if (!type_eq(s->type, t->type)) return false;
  Term hs = head(s), ht = head(t);
  auto as = args(s), at = args(t);
  if (as.size() == at.size() && term_eq(hs, ht)) {
    bool all = true;
    for (std::size_t i = 0; i < as.size() && all; ++i) all = equal_modulo_theory(as[i], at[i], phi);
    if (all) return true;
  }
  bool arith = is_base_type(s) && s->type->sort == "Int";
  // Ground instances of Int-sorted terms reduce to values, so ring
  // identities over opaque subterms hold for them.
  if (arith && term_eq(canon(s), canon(t))) return true;
  if (arith) {
    // Variables the constraint makes equal, merged before comparing. This
    // settles nonlinear cases such as x * a ~ a * y under x = y cheaply.
    Subst merge = entailed_var_classes(s, t, phi);
    if (!merge.empty() && term_eq(canon(apply_subst(s, merge)), canon(apply_subst(t, merge)))) return true;
  }
  if (theory_like(s) && theory_like(t)) return entails(phi, mk_bin("=", s, t)).verdict == Verdict::Yes;
  return false;
}

bool match_modulo(const Term& pattern, const Term& subject, const Term& phi, Subst& out) {
  std::vector<std::pair<Term, Term>> deferred;
  Subst sg = out;
  if (!match_structural(pattern, subject, phi, sg, deferred)) return false;
  while (!deferred.empty()) {
    bool progress = false;
    for (auto it = deferred.begin(); it != deferred.end();) {
      std::vector<std::string> unbound;
      for (const auto& v : var_names(it->first))
        if (!sg.count(v)) unbound.push_back(v);
      if (unbound.empty()) {
        if (entails(phi, mk_bin("=", apply_subst(it->first, sg), it->second)).verdict != Verdict::Yes) return false;
      } else if (unbound.size() == 1) {
        // p = v + r or p = -v + r for the unknown v; check both candidates.
        const std::string& v = unbound[0];
        Subst zero = sg;
        zero[v] = mk_int(0);
        Term r = apply_subst(it->first, zero);
        bool solved = false;
        for (Term cand : {mk_bin("-", it->second, r), mk_bin("-", r, it->second)}) {
          Subst trial = sg;
          trial[v] = poly_normal_form(cand).to_term();
          if (entails(phi, mk_bin("=", apply_subst(it->first, trial), it->second)).verdict == Verdict::Yes) {
            sg = std::move(trial);
            solved = true;
            break;
          }
        }
        if (!solved) return false;
      } else {
        ++it;
        continue;
      }
      it = deferred.erase(it);
      progress = true;
    }
    if (!progress) return false;
  }
  out = std::move(sg);
  return true;
}

namespace {

// One unfolding step of an unconstrained rule of a synthesized symbol,
// anywhere in t.
std::optional<Term> unfold_once(const Term& t, const Program& p) {
  for (const auto& pos : positions(t)) {
    Term sub = *subterm_at(t, pos);
    Term h = head(sub);
    if (!is_sym(h) || h->theory) continue;
    const SymbolInfo* info = p.find_symbol(h->name);
    if (!info || info->role != SymbolRole::Synthesized) continue;
    auto as = args(sub);
    for (const Rule* r : p.rules_for(h->name)) {
      if (!conjuncts(r->constraint).empty()) continue;
      std::size_t k = args(r->lhs).size();
      if (as.size() < k) continue;
      auto g = match_term(r->lhs, mk_apps(h, {as.begin(), as.begin() + k}));
      if (!g) continue;
      return replace_at(t, pos, mk_apps(apply_subst(r->rhs, *g), {as.begin() + k, as.end()}));
    }
  }
  return std::nullopt;
}

}  // namespace

bool ring_equal(const Equation& e, const Program& p) {
  Term l = e.lhs, r = e.rhs;
  for (int i = 0; i < 1000; ++i) {
    auto u = unfold_once(l, p);
    if (!u) break;
    l = *u;
  }
  for (int i = 0; i < 1000; ++i) {
    auto u = unfold_once(r, p);
    if (!u) break;
    r = *u;
  }
  return term_eq(canon(l), canon(r));
}

// --- Kernel -------------------------------------------------------------

Kernel::Kernel(Program p, const Equation& goal)
    : initial_prog_(p), prog_(std::move(p)), goal_(goal), ord_(Ordering::for_program(prog_)) {
  st_.E.push_back(EquationContext{0, goal.lhs, goal, goal.rhs});
  st_.next_id = 1;
}

void Kernel::rebuild_ordering() {
  ord_ = Ordering::for_program(prog_);
  for (const auto& [s, m] : measure_overrides_) ord_.set_measure(s, m);
}

void Kernel::set_measure(const std::string& sym, Measure m) {
  measure_overrides_[sym] = m;
  ord_.set_measure(sym, std::move(m));
}

const EquationContext* Kernel::find(int id) const {
  for (const auto& c : st_.E)
    if (c.id == id) return &c;
  return nullptr;
}

EquationContext& Kernel::get(int id) {
  for (auto& c : st_.E)
    if (c.id == id) return c;
  reject(reason::kUnknownTarget, "no equation with id " + std::to_string(id));
}

const Equation* Kernel::lookup_hyp(const std::string& id, bool& in_h) const {
  for (const auto& h : st_.H)
    if (h.id == id) {
      in_h = true;
      return &h.eq;
    }
  for (const auto& a : st_.A)
    if (a.id == id) {
      in_h = false;
      return &a.eq;
    }
  return nullptr;
}

ProofVerdict Kernel::verdict() const {
  if (!st_.E.empty()) return ProofVerdict::Open;
  for (const auto& a : st_.A)
    if (a.justification.empty()) return ProofVerdict::Conditional;
  return ProofVerdict::Proved;
}

std::vector<int> Kernel::apply(const ProofStep& step) {
  // Apply on a scratch copy so a rejection leaves this state untouched.
  Kernel scratch = *this;
  auto ids = scratch.apply_unchecked(step);
  scratch.trace_.push_back(step);
  *this = std::move(scratch);
  return ids;
}

bool Kernel::can_apply(const ProofStep& step, std::string* why) const {
  Kernel scratch = *this;
  try {
    scratch.apply_unchecked(step);
    return true;
  } catch (const StepRejected& e) {
    if (why) *why = e.what();
  } catch (const std::exception& e) {
    if (why) *why = e.what();
  }
  return false;
}

std::vector<int> Kernel::apply_unchecked(const ProofStep& step) {
  try {
    switch (step.kind) {
      case StepKind::Simplify: return simplify(step);
      case StepKind::Case: return case_split(step);
      case StepKind::HDelete: return hdelete(step);
      case StepKind::Hypothesis: return hypothesis(step);
      case StepKind::Delete: {
        EquationContext& c = get(step.target);
        bool ok = term_eq(c.eq.lhs, c.eq.rhs);
        if (!ok) ok = is_satisfiable(c.eq.constraint).verdict == Verdict::No;
        if (!ok) ok = equal_modulo_theory(c.eq.lhs, c.eq.rhs, c.eq.constraint);
        if (!ok)
          reject(reason::kNotDeletable, "neither s = t nor φ unsatisfiable: " + equation_str(c.eq));
        std::erase_if(st_.E, [&](const EquationContext& x) { return x.id == step.target; });
        return {};
      }
      case StepKind::Induct: {
        EquationContext& c = get(step.target);
        c.bound_left = c.eq.lhs;
        c.bound_right = c.eq.rhs;
        c.left_dom = Dominance{false, false};
        c.right_dom = Dominance{true, false};
        st_.H.push_back(Hypothesis{"H" + std::to_string(st_.H.size()), c.eq});
        c.inducts.push_back(st_.H.back().id);
        return {c.id};
      }
      case StepKind::AddLemma: {
        std::map<std::string, Type> vars;
        Equation e = parse_equation(step.equation, prog_, vars);
        int id = st_.next_id++;
        st_.E.push_back(EquationContext{id, e.lhs, e, e.rhs});
        return {id};
      }
      case StepKind::AssumeAxiom: {
        std::map<std::string, Type> vars;
        Equation e = parse_equation(step.equation, prog_, vars);
        if (step.justification == "ring" && !ring_equal(e, prog_))
          reject(reason::kBadAxiom, "not an identity after unfolding: " + equation_str(e));
        if (!step.justification.empty() && step.justification != "ring" &&
            step.justification.rfind("proved:", 0) != 0)
          reject(reason::kBadStep, "unknown justification '" + step.justification + "'");
        st_.A.push_back(Axiom{"A" + std::to_string(st_.A.size()), e, step.justification});
        return {};
      }
      case StepKind::InstallRecursors:
        install_recursors(prog_);
        rebuild_ordering();
        return {};
      case StepKind::DefineSymbol: {
        prog_.declare(step.symbol, parse_type(step.type), SymbolRole::Synthesized);
        for (const auto& r : step.rules) add_rule_text(prog_, r.lhs, r.rhs, r.constraint);
        rebuild_ordering();
        return {};
      }
    }
  } catch (const StepRejected&) {
    throw;
  } catch (const ParseError& e) {
    reject(reason::kBadStep, std::string("parse error: ") + e.what());
  } catch (const TermError& e) {
    reject(reason::kBadStep, e.what());
  }
  reject(reason::kBadStep, "unhandled step");
}

std::vector<int> Kernel::simplify(const ProofStep& step) {
  EquationContext& c = get(step.target);
  Term s = side_of(c, step.side);
  std::set<std::string> avoid = context_names(c);
  RewriteRefusal why;
  std::optional<RewriteResult> res;
  if (step.rule == "calc") {
    res = abstract_calc(s, c.eq.constraint, step.pos, avoid, &why);
  } else {
    const Rule* r = prog_.rule_by_label(step.rule);
    if (!r) reject(reason::kBadStep, "no rule labelled '" + step.rule + "'");
    res = constrained_rewrite(s, c.eq.constraint, *r, step.pos, avoid, &why);
  }
  if (!res) reject(refusal_code(why), why.reason);
  (step.side == "left" ? c.eq.lhs : c.eq.rhs) = res->term;
  (step.side == "left" ? c.left_dom : c.right_dom).strict = true;
  c.eq.constraint = res->constraint;
  return {c.id};
}

std::vector<int> Kernel::case_split(const ProofStep& step) {
  EquationContext c = get(step.target);
  std::vector<EquationContext> parts;
  if (step.split.rfind("var ", 0) == 0) {
    // Constructor split on a variable of an inductive sort.
    std::string x = step.split.substr(4);
    auto vars = equation_vars(c.eq);
    auto it = vars.find(x);
    if (it == vars.end()) reject(reason::kBadStep, "no variable " + x + " in the equation");
    const Type& ty = it->second;
    if (ty->is_arrow() || is_theory_sort(ty->sort))
      reject(reason::kBadStep, "constructor split needs a variable of an inductive sort");
    std::set<std::string> used = context_names(c);
    for (const auto& sym : prog_.symbols) {
      if (prog_.is_defined(sym.name) || !type_eq(result_type(sym.type), ty)) continue;
      std::vector<Term> as;
      for (const auto& at : arg_types(sym.type)) {
        std::string n = fresh_name(at->is_arrow() ? "f" : (at->sort == "Int" ? "n" : x), used);
        used.insert(n);
        as.push_back(mk_var(n, at));
      }
      Subst sg{{x, mk_apps(prog_.symbol(sym.name), as)}};
      parts.push_back(EquationContext{0, apply_subst(c.bound_left, sg),
                                      {apply_subst(c.eq.lhs, sg), apply_subst(c.eq.rhs, sg),
                                       apply_subst(c.eq.constraint, sg)},
                                      apply_subst(c.bound_right, sg), c.left_dom, c.right_dom, c.inducts});
    }
    if (parts.empty()) reject(reason::kBadStep, "sort " + ty->sort + " has no constructors");
  } else {
    auto vars = equation_vars(c.eq);
    Term psi = parse_term(step.split, prog_, vars, false, false, bool_type());
    for (const Term& k : {mk_and({c.eq.constraint, psi}), mk_and({c.eq.constraint, negate(psi)})})
      parts.push_back(EquationContext{0, c.bound_left, {c.eq.lhs, c.eq.rhs, k}, c.bound_right, c.left_dom, c.right_dom,
                                      c.inducts});
  }
  std::vector<int> ids;
  auto at = std::find_if(st_.E.begin(), st_.E.end(), [&](const EquationContext& x) { return x.id == c.id; });
  at = st_.E.erase(at);
  for (auto& p : parts) {
    p.id = st_.next_id++;
    ids.push_back(p.id);
  }
  st_.E.insert(at, parts.begin(), parts.end());
  return ids;
}

std::vector<int> Kernel::hdelete(const ProofStep& step) {
  EquationContext& c = get(step.target);
  bool in_h = false;
  const Equation* hp = lookup_hyp(step.hyp, in_h);
  if (!hp) reject(reason::kBadStep, "no hypothesis or axiom " + step.hyp);
  Equation h = rename_apart(*hp, context_names(c));
  const Term& phi = c.eq.constraint;
  std::vector<std::string> dirs = step.direction.empty() ? std::vector<std::string>{"lr", "rl"}
                                                         : std::vector<std::string>{step.direction};
  std::string last = "no instance of " + step.hyp + " at a common position of " + equation_str(c.eq);
  const char* last_code = reason::kNoMatch;
  for (const auto& pos : positions(c.eq.lhs)) {
    auto ss = subterm_at(c.eq.lhs, pos);
    auto ts = subterm_at(c.eq.rhs, pos);
    if (!ts || !type_eq((*ss)->type, (*ts)->type)) continue;
    // The surrounding contexts must agree.
    Term marker = mk_var("\x01hole", (*ss)->type);
    if (!pos.empty() && !equal_modulo_theory(replace_at(c.eq.lhs, pos, marker), replace_at(c.eq.rhs, pos, marker), phi))
      continue;
    for (const auto& d : dirs) {
      const Term& a = d == "lr" ? h.lhs : h.rhs;
      const Term& b = d == "lr" ? h.rhs : h.lhs;
      Subst ext;
      if (!match_modulo(a, *ss, phi, ext) || !match_modulo(b, *ts, phi, ext)) continue;
      bool bound_ok = true;
      for (const auto& v : var_names(h.constraint)) {
        auto it = ext.find(v);
        if (it == ext.end() || !(is_value(it->second) || computable_under(it->second, phi))) bound_ok = false;
      }
      if (!bound_ok) {
        last = "constraint variables of " + step.hyp + " not bound to theory terms";
        continue;
      }
      Term psi = apply_subst(h.constraint, ext);
      if (entails(phi, psi).verdict != Verdict::Yes) {
        last = "entailment failed: " + to_string(phi) + " does not entail " + to_string(psi);
        last_code = reason::kEntailment;
        continue;
      }
      if (in_h && pos.empty() && !bounds_decreased(c)) {
        last = "bound unchanged in HDelete: the sides are not below the bounds";
        last_code = reason::kBoundUnchanged;
        continue;
      }
      std::erase_if(st_.E, [&](const EquationContext& x) { return x.id == step.target; });
      return {};
    }
  }
  reject(last_code, last);
}

std::vector<int> Kernel::hypothesis(const ProofStep& step) {
  EquationContext& c = get(step.target);
  Term s = side_of(c, step.side);
  bool in_h = false;
  const Equation* hp = lookup_hyp(step.hyp, in_h);
  if (!hp) reject(reason::kBadStep, "no hypothesis or axiom " + step.hyp);
  if (step.direction != "lr" && step.direction != "rl") reject(reason::kBadStep, "direction must be lr or rl");
  Rule r = step.direction == "lr" ? Rule{hp->lhs, hp->rhs, hp->constraint, step.hyp}
                                  : Rule{hp->rhs, hp->lhs, hp->constraint, step.hyp};
  if (!is_sym(head(r.lhs)))
    reject(reason::kBadStep, "hypothesis side " + to_string(r.lhs) + " has a variable head");
  RewriteRefusal why;
  auto res = constrained_rewrite(s, c.eq.constraint, r, step.pos, context_names(c), &why);
  if (!res) reject(refusal_code(why), why.reason);
  // Some bound must dominate the result, for hypotheses and
  // (conservatively) for axioms alike. The side's own bound is tried first.
  // A hypothesis whose proof is still open may only rewrite a side that is
  // strictly below the bound: otherwise the goal could prove itself.
  bool left = step.side == "left";
  bool cyclic = in_h && std::any_of(st_.E.begin(), st_.E.end(), [&](const EquationContext& x) {
    return std::find(x.inducts.begin(), x.inducts.end(), step.hyp) != x.inducts.end();
  });
  const Dominance& dom = left ? c.left_dom : c.right_dom;
  std::string what = step.hyp + " " + step.direction + " on the " + step.side + " at " + position_str(step.pos);
  std::string failures;
  std::optional<OrderingRequirement> req;
  bool by_right = false;
  for (bool use_right : {!left, left}) {
    const Term& bound = use_right ? c.bound_right : c.bound_left;
    if (cyclic && !(dom.strict && dom.by_right == use_right) &&
        ord_.compare(bound, s, c.eq.constraint) != Cmp::GT) {
      failures += std::string(failures.empty() ? "" : "; ") + "side not below the bound: " + to_string(bound) +
                  " > " + to_string(s);
      continue;
    }
    OrderingRequirement cand{bound, res->term, res->constraint, true, what};
    Cmp cmp = ord_.compare(bound, res->term, res->constraint);
    if (cmp == Cmp::GT) {
      req = cand;
      by_right = use_right;
      break;
    }
    failures += std::string(failures.empty() ? "" : "; ") + cmp_str(cmp) + ": " + requirement_str(cand);
  }
  if (!req) reject(reason::kOrdering, "ordering requirement " + failures);
  st_.requirements.emplace_back(trace_.size(), *req);
  (left ? c.left_dom : c.right_dom) = Dominance{by_right, true};
  (left ? c.eq.lhs : c.eq.rhs) = res->term;
  c.eq.constraint = res->constraint;
  return {c.id};
}

void Kernel::undo_to(std::size_t n) {
  if (n > trace_.size()) n = trace_.size();
  Kernel fresh(initial_prog_, goal_);
  for (const auto& [s, m] : measure_overrides_) fresh.set_measure(s, m);
  for (std::size_t i = 0; i < n; ++i) fresh.apply(trace_[i]);
  *this = std::move(fresh);
}

std::vector<int> Kernel::bound_violations() const {
  std::vector<int> out;
  for (const auto& c : st_.E) {
    auto dominated = [&](const Term& b, const Term& s) {
      return term_eq(b, s) || ord_.compare(b, s, c.eq.constraint) != Cmp::Unknown;
    };
    const Term& bl = c.left_dom.by_right ? c.bound_right : c.bound_left;
    const Term& br = c.right_dom.by_right ? c.bound_right : c.bound_left;
    if (!dominated(bl, c.eq.lhs) || !dominated(br, c.eq.rhs)) out.push_back(c.id);
  }
  return out;
}

json Kernel::trace_json(const std::string& program_text) const {
  json j;
  j["format"] = "lcstrs-trace/1";
  j["program_hash"] = text_hash(program_text);
  j["goal"] = equation_str(goal_);
  j["measures"] = json::object();
  for (const auto& [s, m] : measure_overrides_) {
    json cs = json::array();
    for (const auto& [p, k] : m.coefs) cs.push_back({p, k});
    j["measures"][s] = {{"coefs", cs}, {"constant", m.constant}};
  }
  j["steps"] = json::array();
  for (const auto& s : trace_) j["steps"].push_back(s.to_json());
  j["requirements"] = json::array();
  for (const auto& [i, r] : st_.requirements) j["requirements"].push_back({{"step", i}, {"requirement", requirement_str(r)}});
  json as = json::array();
  for (const auto& a : st_.A)
    as.push_back({{"id", a.id}, {"equation", equation_str(a.eq)}, {"justification", a.justification}});
  j["axioms"] = as;
  j["verdict"] = proof_verdict_str(verdict());
  return j;
}

ReplayResult replay_trace(const json& trace, const std::string& program_text) {
  if (trace.value("format", "") != "lcstrs-trace/1") reject(reason::kBadStep, "unsupported trace format");
  if (trace.value("program_hash", "") != text_hash(program_text))
    reject(reason::kBadStep, "program hash mismatch");
  Program p = parse_program(program_text);
  std::map<std::string, Type> vars;
  Equation goal = parse_equation(trace.at("goal").get<std::string>(), p, vars);
  ReplayResult out;
  out.kernel = std::make_unique<Kernel>(std::move(p), goal);
  if (trace.contains("measures"))
    for (const auto& [s, m] : trace["measures"].items()) {
      Measure ms;
      for (const auto& c : m["coefs"]) ms.coefs.emplace_back(c[0].get<int>(), c[1].get<int>());
      ms.constant = m.value("constant", 0);
      out.kernel->set_measure(s, ms);
    }
  for (const auto& js : trace.at("steps")) {
    ProofStep s = ProofStep::from_json(js);
    try {
      out.kernel->apply(s);
    } catch (const StepRejected& e) {
      throw StepRejected(e.code, "step " + std::to_string(out.steps) + ": " + e.what());
    }
    ++out.steps;
  }
  if (trace.contains("verdict") && trace["verdict"] != proof_verdict_str(out.kernel->verdict()))
    reject(reason::kBadStep, "replayed verdict differs from the recorded one");
  return out;
}

// --- Soundness sampling -------------------------------------------------

namespace {

Term random_constructor_term(const Program& p, const Type& ty, std::mt19937& rng, int depth) {
  std::vector<const SymbolInfo*> cons;
  for (const auto& s : p.symbols)
    if (!p.is_defined(s.name) && type_eq(result_type(s.type), ty)) cons.push_back(&s);
  if (cons.empty()) throw TermError("no constructors for sort " + type_str(ty));
  std::vector<const SymbolInfo*> leaves;
  for (const auto* s : cons)
    if (arg_types(s->type).empty()) leaves.push_back(s);
  const auto& pool = depth <= 0 && !leaves.empty() ? leaves : cons;
  const SymbolInfo* s = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
  std::vector<Term> as;
  for (const auto& at : arg_types(s->type)) {
    if (!at->is_arrow() && at->sort == "Int")
      as.push_back(mk_int(std::uniform_int_distribution<int>(-5, 5)(rng)));
    else if (!at->is_arrow() && at->sort == "Bool")
      as.push_back(mk_bool(rng() % 2));
    else
      as.push_back(random_constructor_term(p, at, rng, depth - 1));
  }
  return mk_apps(p.symbol(s->name), as);
}

}  // namespace

SoundnessReport sample_soundness(const Equation& e, const Program& base, int n, int lo, int hi, unsigned seed,
                                 long fuel) {
  SoundnessReport rep;
  std::mt19937 rng(seed);
  Program p = base;
  auto vars = equation_vars(e);
  std::uniform_int_distribution<int> val(lo, hi), coef(-3, 3);
  int attempts = 0;
  int fn_count = 0;
  while (rep.samples < n && attempts < n * 200) {
    ++attempts;
    Subst g;
    std::map<std::string, Value> env;
    std::string shown;
    for (const auto& [name, ty] : vars) {
      Term v;
      if (!ty->is_arrow() && ty->sort == "Int") {
        v = mk_int(val(rng));
        env[name] = Value::of_int(int_value(v));
      } else if (!ty->is_arrow() && ty->sort == "Bool") {
        v = mk_bool(rng() % 2);
        env[name] = Value::of_bool(bool_value(v));
      } else if (ty->is_arrow() && is_theory_type(ty) && result_type(ty)->sort == "Int") {
        // A sampled affine function as a fresh symbol with one rule.
        std::string f = "sample_fn" + std::to_string(fn_count++);
        p.declare(f, ty, SymbolRole::Synthesized);
        std::string lhs = f, rhs = std::to_string(coef(rng));
        auto ats = arg_types(ty);
        for (std::size_t i = 0; i < ats.size(); ++i) {
          lhs += " a" + std::to_string(i);
          if (ats[i]->sort == "Int") rhs += " + " + std::to_string(coef(rng)) + " * a" + std::to_string(i);
        }
        add_rule_text(p, lhs, "(" + rhs + ")");
        v = p.symbol(f);
        shown += name + " := " + rule_str(p.rules.back()) + "; ";
      } else {
        v = random_constructor_term(p, ty, rng, 3);
      }
      g[name] = v;
    }
    if (!conjuncts(e.constraint).empty() && !eval_under(e.constraint, env).b) continue;
    ++rep.samples;
    Term l = apply_subst(e.lhs, g), r = apply_subst(e.rhs, g);
    auto a = normalize(l, p, fuel);
    auto b = normalize(r, p, fuel);
    if (a.exhausted || b.exhausted) {
      ++rep.fuel_exhausted;
      continue;
    }
    if (term_eq(a.term, b.term)) {
      ++rep.joinable;
      continue;
    }
    std::string w;
    for (const auto& [name, t] : g) w += name + " = " + to_string(t) + ", ";
    rep.violations.push_back(shown + w + to_string(l) + " ->* " + to_string(a.term) + " but " + to_string(r) +
                             " ->* " + to_string(b.term));
  }
  return rep;
}

// --- Step suggestions ---------------------------------------------------

std::vector<ProofStep> enumerate_steps(const Kernel& k, int target) {
  std::vector<ProofStep> out;
  const EquationContext* c = k.find(target);
  if (!c) return out;
  auto keep = [&](ProofStep s) {
    s.target = target;
    if (k.can_apply(s)) out.push_back(std::move(s));
  };
  keep(ProofStep{.kind = StepKind::Delete});
  const ProofState& st = k.state();
  for (const auto& a : st.A) keep(ProofStep{.kind = StepKind::HDelete, .hyp = a.id});
  for (const auto& h : st.H) keep(ProofStep{.kind = StepKind::HDelete, .hyp = h.id});
  // Simplify: rule steps outermost-leftmost, then calculations.
  std::set<std::string> avoid;
  for (const char* side : {"left", "right"}) {
    Term s = std::string(side) == "left" ? c->eq.lhs : c->eq.rhs;
    for (const auto& r : enumerate_rewrites(s, c->eq.constraint, k.program(), avoid))
      out.push_back(ProofStep{.kind = StepKind::Simplify, .target = target, .side = side, .pos = r.pos, .rule = r.label});
  }
  for (const char* side : {"left", "right"}) {
    Term s = std::string(side) == "left" ? c->eq.lhs : c->eq.rhs;
    std::vector<std::string> ids;
    for (const auto& h : st.H) ids.push_back(h.id);
    for (const auto& a : st.A) ids.push_back(a.id);
    for (const auto& pos : positions(s))
      for (const auto& id : ids)
        for (const char* d : {"lr", "rl"})
          keep(ProofStep{.kind = StepKind::Hypothesis, .side = side, .pos = pos, .hyp = id, .direction = d});
  }
  // Case: undecided guards of rules whose left-hand side matches.
  std::set<std::string> seen;
  for (const Term& s : {c->eq.lhs, c->eq.rhs})
    for (const auto& pos : positions(s)) {
      Term sub = *subterm_at(s, pos);
      Term h = head(sub);
      if (!is_sym(h) || h->theory) continue;
      auto as = args(sub);
      for (const Rule* r : k.program().rules_for(h->name)) {
        std::size_t n = args(r->lhs).size();
        if (as.size() < n || conjuncts(r->constraint).empty()) continue;
        auto g = match_term(r->lhs, mk_apps(h, {as.begin(), as.begin() + n}));
        if (!g) continue;
        bool closed = true;
        for (const auto& v : var_names(r->constraint))
          if (!g->count(v)) closed = false;
        if (!closed) continue;
        Term psi = apply_subst(r->constraint, *g);
        if (!is_theory_term(psi)) continue;
        if (entails(c->eq.constraint, psi).verdict == Verdict::Yes) continue;
        if (entails(c->eq.constraint, negate(psi)).verdict == Verdict::Yes) continue;
        std::string text = to_string(psi);
        if (seen.insert(text).second) keep(ProofStep{.kind = StepKind::Case, .split = text});
      }
    }
  for (const auto& [name, ty] : equation_vars(c->eq))
    if (!ty->is_arrow() && !is_theory_sort(ty->sort)) keep(ProofStep{.kind = StepKind::Case, .split = "var " + name});
  keep(ProofStep{.kind = StepKind::Induct});
  return out;
}

}  // namespace lcstrs
