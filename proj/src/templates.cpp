#include "lcstrs/templates.hpp"

#include "lcstrs/solver.hpp"
#include "lcstrs/theory.hpp"

namespace lcstrs {

namespace {

struct Cmp2 {
  std::string op;
  Term lhs, rhs;
};

std::optional<Cmp2> comparison(const Term& phi) {
  Term h = head(phi);
  auto as = args(phi);
  if (!is_sym(h) || !h->theory || as.size() != 2) return std::nullopt;
  if (h->name != "<" && h->name != "<=" && h->name != ">" && h->name != ">=") return std::nullopt;
  return Cmp2{h->name, as[0], as[1]};
}

const char* flip(const std::string& op) {
  if (op == "<") return ">";
  if (op == "<=") return ">=";
  if (op == ">") return "<";
  return "<=";
}

// e + k with literal folding: (x - 1) + 1 is x, 0 + 1 is 1.
Term add_const(const Term& e, int k) {
  if (k == 0) return e;
  if (is_int_lit(e)) return mk_int(int_value(e) + k);
  Term h = head(e);
  auto as = args(e);
  if (is_sym(h) && h->theory && as.size() == 2 && is_int_lit(as[1]) && (h->name == "+" || h->name == "-")) {
    Int c = h->name == "+" ? int_value(as[1]) : Int(-int_value(as[1]));
    c += k;
    if (c == 0) return as[0];
    return c > 0 ? mk_bin("+", as[0], mk_int(c)) : mk_bin("-", as[0], mk_int(Int(-c)));
  }
  return k > 0 ? mk_bin("+", e, mk_int(k)) : mk_bin("-", e, mk_int(-k));
}

bool poly_equal(const Term& a, const Term& b) {
  if (term_eq(a, b)) return true;
  if (!is_base_type(a) || !is_theory_term(a) || !is_theory_term(b)) return false;
  try {
    return poly_normal_form(a) == poly_normal_form(b);
  } catch (const std::exception&) {
    return false;
  }
}

Term replace_all(const Term& t, const Term& from, const Term& to) {
  if (term_eq(t, from)) return to;
  if (t->kind != TermKind::App) return t;
  Term f = replace_all(t->fun, from, to), a = replace_all(t->arg, from, to);
  if (f == t->fun && a == t->arg) return t;
  return mk_app(f, a);
}

int count_occurrences(const Term& t, const Term& s) {
  if (term_eq(t, s)) return 1;
  if (t->kind != TermKind::App) return 0;
  return count_occurrences(t->fun, s) + count_occurrences(t->arg, s);
}

bool is_up(TemplateKind k) { return k == TemplateKind::TailUp || k == TemplateKind::RecUp; }
bool is_tail(TemplateKind k) { return k == TemplateKind::TailUp || k == TemplateKind::TailDown; }

// Rule lhs of the form g x1 .. xn with distinct variables.
bool flat_lhs(const Rule& r) {
  std::set<std::string> seen;
  for (const auto& a : args(r.lhs))
    if (!is_var(a) || !seen.insert(a->name).second) return false;
  return true;
}

SynthSymbol synthesize(const Term& F) {
  SynthSymbol s;
  std::string text = to_string(F);
  s.name = "F_" + text_hash(text).substr(0, 8);
  std::set<std::string> used;
  std::vector<Term> params;
  for (const auto& v : vars_of(F)) {
    params.push_back(v);
    s.params.push_back(v->name);
    used.insert(v->name);
  }
  std::string y1 = fresh_name("x", used);
  used.insert(y1);
  std::string y2 = fresh_name("x", used);
  Term a1 = mk_var(y1, int_type()), a2 = mk_var(y2, int_type());
  std::vector<Type> tys;
  for (const auto& v : params) tys.push_back(v->type);
  tys.push_back(int_type());
  tys.push_back(int_type());
  s.type = type_str(arrows(tys, int_type()));
  Term lhs = mk_apps(mk_sym(s.name, arrows(tys, int_type())), params);
  s.lhs = to_string(mk_apps(lhs, {a1, a2}));
  s.rhs = to_string(fill(F, {a1, a2}));
  return s;
}

}  // namespace

const char* template_kind_str(TemplateKind k) {
  switch (k) {
    case TemplateKind::TailUp: return "TailUp";
    case TemplateKind::TailDown: return "TailDown";
    case TemplateKind::RecUp: return "RecUp";
    case TemplateKind::RecDown: return "RecDown";
  }
  return "?";
}

const char* template_recursor(TemplateKind k) {
  switch (k) {
    case TemplateKind::TailUp: return "tailup";
    case TemplateKind::TailDown: return "taildn";
    case TemplateKind::RecUp: return "recup";
    case TemplateKind::RecDown: return "recdn";
  }
  return "?";
}

ProofStep SynthSymbol::define_step() const {
  ProofStep st;
  st.kind = StepKind::DefineSymbol;
  st.symbol = name;
  st.type = type;
  st.rules.push_back({lhs, rhs, ""});
  return st;
}

std::vector<Rule> normalize_inequalities(const std::vector<Rule>& rules) {
  // The base rule (no recursive call) fixes the direction.
  std::optional<bool> down;
  for (const auto& r : rules) {
    auto c = comparison(r.constraint);
    if (!c || contains_sym(r.rhs, head(r.lhs)->name)) continue;
    std::string op = c->op;
    if (!is_var(c->lhs) && is_var(c->rhs)) op = flip(op);
    down = op == "<" || op == "<=";
  }
  if (!down) return rules;
  std::vector<Rule> out;
  for (Rule r : rules) {
    auto c = comparison(r.constraint);
    if (!c) {
      out.push_back(r);
      continue;
    }
    if (!is_var(c->lhs) && is_var(c->rhs)) c = Cmp2{flip(c->op), c->rhs, c->lhs};
    if (*down) {
      if (c->op == "<=") c = Cmp2{"<", c->lhs, add_const(c->rhs, 1)};
      if (c->op == ">") c = Cmp2{">=", c->lhs, add_const(c->rhs, 1)};
    } else {
      if (c->op == ">=") c = Cmp2{">", c->lhs, add_const(c->rhs, -1)};
      if (c->op == "<") c = Cmp2{"<=", c->lhs, add_const(c->rhs, -1)};
    }
    r.constraint = mk_bin(c->op, c->lhs, c->rhs);
    out.push_back(r);
  }
  return out;
}

std::vector<TemplateMatch> match_template(const Program& p, const std::string& sym, TemplateKind kind) {
  std::vector<TemplateMatch> out;
  for (const auto& m : match_template(p, sym))
    if (m.kind == kind) out.push_back(m);
  return out;
}

std::vector<TemplateMatch> match_template(const Program& p, const std::string& sym) {
  std::vector<TemplateMatch> out;
  std::vector<Rule> src;
  for (const Rule* r : p.rules_for(sym)) src.push_back(*r);
  if (src.size() != 2) return out;
  src = normalize_inequalities(src);
  int bi = contains_sym(src[0].rhs, sym) ? 1 : 0;
  Rule base = src[bi], rec = src[1 - bi];
  if (contains_sym(base.rhs, sym) || !contains_sym(rec.rhs, sym)) return out;
  if (!flat_lhs(base) || !flat_lhs(rec)) return out;
  auto ps = args(base.lhs), qs = args(rec.lhs);
  if (ps.size() != qs.size()) return out;
  // Rename the recursive rule onto the base rule's variables.
  Subst ren;
  for (std::size_t k = 0; k < ps.size(); ++k) ren[qs[k]->name] = ps[k];
  for (const auto& v : var_names(rec.rhs))
    if (!ren.count(v)) return out;  // fresh variables in the recursive rule
  rec = Rule{base.lhs, apply_subst(rec.rhs, ren), apply_subst(rec.constraint, ren), rec.label};
  auto bc = comparison(base.constraint), rc = comparison(rec.constraint);
  if (!bc || !rc || !is_var(bc->lhs) || !term_eq(bc->lhs, rc->lhs) || !poly_equal(bc->rhs, rc->rhs)) return out;
  bool up = bc->op == ">" && rc->op == "<=";
  bool down = bc->op == "<" && rc->op == ">=";
  if (!up && !down) return out;
  Term i = bc->lhs, e = bc->rhs;
  if (occurs_var(i->name, e)) return out;
  std::size_t k = 0;
  while (k < ps.size() && !term_eq(ps[k], i)) ++k;
  if (k == ps.size() || i->type->sort != "Int" || i->type->is_arrow()) return out;
  Term head_sym = head(base.lhs);
  Term h1 = hole(1, int_type()), h2 = hole(2, int_type());
  Term stepped = add_const(i, up ? 1 : -1);

  auto finish = [&](TemplateMatch m) {
    m.symbol = sym;
    m.bound = e;
    m.index = i->name;
    m.rules = {base, rec};
    Term fh = head(m.F);
    auto fa = args(m.F);
    if (fa.size() == 2 && is_hole(fa[0]) && hole_index(fa[0]) == 1 && is_hole(fa[1]) && hole_index(fa[1]) == 2 &&
        is_sym(fh) && !is_hole(fh)) {
      m.fn = fh;
    } else {
      m.synth = synthesize(m.F);
      std::vector<Type> tys;
      std::vector<Term> params;
      for (const auto& v : vars_of(m.F)) {
        params.push_back(v);
        tys.push_back(v->type);
      }
      tys.push_back(int_type());
      tys.push_back(int_type());
      m.fn = mk_apps(mk_sym(m.synth->name, arrows(tys, int_type())), params);
    }
    out.push_back(std::move(m));
  };

  if (is_var(base.rhs) && !term_eq(base.rhs, i)) {
    // Tail kinds: the base rule returns the accumulator.
    Term a = base.rhs;
    std::size_t j = 0;
    while (j < ps.size() && !term_eq(ps[j], a)) ++j;
    auto rs = args(rec.rhs);
    if (j < ps.size() && term_eq(head(rec.rhs), head_sym) && rs.size() == ps.size() && !occurs_var(a->name, e)) {
      bool ok = poly_equal(rs[k], stepped);
      for (std::size_t m = 0; m < ps.size() && ok; ++m)
        if (m != k && m != j && !term_eq(rs[m], ps[m])) ok = false;
      if (ok) {
        TemplateMatch m;
        m.kind = up ? TemplateKind::TailUp : TemplateKind::TailDown;
        m.acc = a->name;
        Subst sg = up ? Subst{{i->name, h1}, {a->name, h2}} : Subst{{a->name, h1}, {i->name, h2}};
        m.F = apply_subst(rs[j], sg);
        std::vector<Term> cargs = ps;
        cargs[k] = h1;
        cargs[j] = h2;
        m.context = mk_apps(head_sym, cargs);
        finish(m);
      }
    }
  }
  if (!occurs_var(i->name, base.rhs)) {
    // Rec kinds: one recursive call with the index stepped.
    std::vector<Term> cargs = ps;
    cargs[k] = stepped;
    Term call = mk_apps(head_sym, cargs);
    // The rule may spell the stepped index differently (i + 1 vs 1 + i).
    Term found;
    for (const auto& pos : positions(rec.rhs)) {
      Term sub = *subterm_at(rec.rhs, pos);
      if (!term_eq(head(sub), head_sym) || args(sub).size() != ps.size()) continue;
      auto sa = args(sub);
      bool ok = poly_equal(sa[k], stepped);
      for (std::size_t m = 0; m < ps.size() && ok; ++m)
        if (m != k && !term_eq(sa[m], ps[m])) ok = false;
      if (ok) found = sub;
    }
    if (found && count_occurrences(rec.rhs, found) == 1) {
      Term marker = up ? h1 : h2;
      Term F = replace_all(rec.rhs, found, marker);
      F = apply_subst(F, Subst{{i->name, up ? h2 : h1}});
      if (!contains_sym(F, sym)) {
        TemplateMatch m;
        m.kind = up ? TemplateKind::RecUp : TemplateKind::RecDown;
        m.F = F;
        m.base = base.rhs;
        std::vector<Term> rargs = ps;
        rargs[k] = h1;
        m.context = mk_apps(head_sym, rargs);
        finish(m);
      }
    }
  }
  return out;
}

std::vector<Rule> reconstruct_rules(const TemplateMatch& m) {
  Term i = mk_var(m.index, int_type());
  Term up1 = add_const(i, is_up(m.kind) ? 1 : -1);
  const char* base_op = is_up(m.kind) ? ">" : "<";
  const char* rec_op = is_up(m.kind) ? "<=" : ">=";
  Term lhs, base_rhs, rec_rhs;
  if (is_tail(m.kind)) {
    // The accumulator keeps its type from the source rules.
    Term a = mk_var(m.acc, int_type());
    for (const auto& v : vars_of(m.rules[0].lhs))
      if (v->name == m.acc) a = v;
    lhs = fill(m.context, {i, a});
    base_rhs = a;
    Term fa = is_up(m.kind) ? fill(m.F, {i, a}) : fill(m.F, {a, i});
    rec_rhs = fill(m.context, {up1, fa});
  } else {
    lhs = fill(m.context, {i});
    base_rhs = m.base;
    Term call = fill(m.context, {up1});
    rec_rhs = is_up(m.kind) ? fill(m.F, {call, i}) : fill(m.F, {i, call});
  }
  return {Rule{lhs, base_rhs, mk_bin(base_op, i, m.bound), m.symbol + ":base"},
          Rule{lhs, rec_rhs, mk_bin(rec_op, i, m.bound), m.symbol + ":rec"}};
}

// --- Template-recursor lemma -------------------------------------------------

TemplateLemma emit_template_recursor_lemma(const TemplateMatch& m, const Program& p) {
  TemplateLemma out;
  if (!has_recursors(p)) {
    ProofStep st;
    st.kind = StepKind::InstallRecursors;
    out.setup.push_back(st);
  }
  if (m.synth && !p.find_symbol(m.synth->name)) out.setup.push_back(m.synth->define_step());
  Term i = mk_var(m.index, int_type());
  const std::string rec = template_recursor(m.kind);
  Type it = int_type();
  Term rsym = mk_sym(rec, arrows({arrows({it, it}, it), it, it, it}, it));
  Term lhs, rhs;
  if (is_tail(m.kind)) {
    Term a;
    for (const auto& v : vars_of(m.rules[0].lhs))
      if (v->name == m.acc) a = v;
    lhs = fill(m.context, {i, a});
    rhs = is_up(m.kind) ? mk_apps(rsym, {m.fn, i, m.bound, a}) : mk_apps(rsym, {m.fn, m.bound, i, a});
  } else {
    lhs = fill(m.context, {i});
    rhs = is_up(m.kind) ? mk_apps(rsym, {m.fn, i, m.bound, m.base}) : mk_apps(rsym, {m.fn, m.bound, i, m.base});
  }
  out.equation = to_string(lhs) + " ~ " + to_string(rhs);

  const Rule& base = m.rules[0];
  const Rule& recr = m.rules[1];
  // The source rules carry their original labels; normalization keeps them.
  ScriptOp induct{ScriptOp::Induct};
  ScriptOp cs{ScriptOp::CaseGuard};
  cs.side = "left";
  cs.rule = base.label;
  cs.then_ops = {ScriptOp{ScriptOp::Simp, "left", base.label}, ScriptOp{ScriptOp::Simp, "right", rec + ":0"},
                 ScriptOp{ScriptOp::Close}};
  cs.else_ops = {ScriptOp{ScriptOp::Simp, "left", recr.label}, ScriptOp{ScriptOp::Simp, "right", rec + ":1"},
                 ScriptOp{ScriptOp::Unfold}, ScriptOp{ScriptOp::HDel, "", "", "H@0"}};
  out.script = {induct, cs};
  return out;
}

}  // namespace lcstrs
