#include "lcstrs/solver.hpp"
#include "lcstrs/templates.hpp"

namespace lcstrs {

namespace {

ProofStep mk(StepKind kind, int target = -1) {
  ProofStep st;
  st.kind = kind;
  st.target = target;
  return st;
}

Term side_of(const Kernel& k, int target, const std::string& side) {
  const EquationContext* c = k.find(target);
  if (!c) throw ScriptError("no context " + std::to_string(target));
  return side == "left" ? c->eq.lhs : c->eq.rhs;
}

void ensure_recursors(Kernel& k) {
  if (!has_recursors(k.program())) k.apply(mk(StepKind::InstallRecursors));
}

bool is_recursor(const Program& p, const Term& t) {
  Term h = head(t);
  if (!is_sym(h)) return false;
  const SymbolInfo* s = p.find_symbol(h->name);
  return s && s->role == SymbolRole::Recursor;
}

// A hypothesis whose equation prints as `text`, if the session has one.
std::optional<std::string> hyp_with(const Kernel& k, const std::string& text) {
  for (const auto& h : k.state().H)
    if (equation_str(h.eq) == text) return h.id;
  return std::nullopt;
}

std::string printed(const std::string& text, const Program& p) {
  std::map<std::string, Type> vars;
  return equation_str(parse_equation(text, p, vars));
}

// Runs f on a copy and commits only on success.
template <class F>
bool attempt(Kernel& k, F&& f) {
  Kernel trial = k;
  try {
    if (!f(trial)) return false;
  } catch (const ScriptError&) {
    return false;
  } catch (const StepRejected&) {
    return false;
  }
  k = std::move(trial);
  return true;
}

std::string ensure_template_lemma(Kernel& k, const TemplateMatch& m) {
  ensure_recursors(k);
  TemplateLemma tl = emit_template_recursor_lemma(m, k.program());
  for (const auto& s : tl.setup)
    if (s.kind == StepKind::DefineSymbol && !k.program().find_symbol(s.symbol)) k.apply(s);
  if (auto h = hyp_with(k, printed(tl.equation, k.program()))) return *h;
  Kernel trial = k;
  std::string id = prove_lemma(trial, tl.equation, tl.script);
  k = std::move(trial);
  return id;
}

std::string ensure_entry(Kernel& k, const RecursorLemma& e, const std::vector<Term>& inst) {
  InstantiatedLemma il = instantiate_lemma(e, k.program(), inst);
  if (auto h = hyp_with(k, il.equation_text)) return *h;
  Kernel trial = k;
  std::string id = prove_bank_entry(trial, e, inst);
  k = std::move(trial);
  return id;
}

// Rewrites the side to recursor form at the root. Returns false when the
// root symbol is not a template.
bool to_recursor(Kernel& k, int target, const std::string& side, std::string* why) {
  Term s = side_of(k, target, side);
  if (is_recursor(k.program(), s)) return true;
  Term h = head(s);
  if (!is_sym(h)) return false;
  auto ms = match_template(k.program(), h->name);
  for (const auto& m : ms) {
    bool ok = attempt(k, [&](Kernel& t) {
      std::string id = ensure_template_lemma(t, m);
      ProofStep st = mk(StepKind::Hypothesis, target);
      st.side = side;
      st.hyp = id;
      st.direction = "lr";
      if (!t.can_apply(st, why)) return false;
      t.apply(st);
      return true;
    });
    if (ok) return true;
  }
  return false;
}

// Recursor, function argument and the remaining three arguments.
struct RecForm {
  std::string rec;
  Term fn;
  std::vector<Term> rest;
};
std::optional<RecForm> rec_form(const Program& p, const Term& t) {
  if (!is_recursor(p, t)) return std::nullopt;
  auto as = args(t);
  if (as.size() != 4) return std::nullopt;
  return RecForm{head(t)->name, as[0], {as[1], as[2], as[3]}};
}

// Positions of the hole functions in an entry equation: for each side, the
// hole index used as the recursor's function argument.
std::pair<int, int> hole_sides(const RecursorLemma& e) {
  auto idx = [](const std::string& side_text) {
    auto p = side_text.find('#');
    return p == std::string::npos ? 0 : side_text[p + 1] - '0';
  };
  auto tilde = e.equation.find('~');
  return {idx(e.equation.substr(0, tilde)), idx(e.equation.substr(tilde))};
}

// Hole instantiation putting `lf` at the left recursor and `rf` at the right.
std::vector<Term> inst_for(const RecursorLemma& e, const Term& lf, const Term& rf) {
  if (!e.holes) return {};
  auto [l, r] = hole_sides(e);
  std::vector<Term> inst(2);
  inst[l - 1] = lf;
  inst[r - 1] = rf;
  // A hole that appears on neither side shares the other's function.
  for (auto& t : inst)
    if (!t) t = lf;
  return inst;
}

void calc_ground(Kernel& k, int target, const std::string& side) {
  for (int guard = 0; guard < 50; ++guard) {
    Term s = side_of(k, target, side);
    bool done = false;
    for (const auto& pos : positions(s)) {
      Term sub = *subterm_at(s, pos);
      if (!is_ground(sub) || !is_base_type(sub) || !is_theory_term(sub) || is_value(sub)) continue;
      ProofStep st = mk(StepKind::Simplify, target);
      st.side = side;
      st.rule = "calc";
      st.pos = pos;
      if (k.can_apply(st)) {
        k.apply(st);
        done = true;
        break;
      }
    }
    if (!done) return;
  }
}

void unfold_synth(Kernel& k, int target) {
  for (int guard = 0; guard < 100; ++guard) {
    bool changed = false;
    for (const char* side : {"left", "right"}) {
      Term s = side_of(k, target, side);
      for (const auto& pos : positions(s)) {
        Term h = head(*subterm_at(s, pos));
        if (!is_sym(h)) continue;
        const SymbolInfo* info = k.program().find_symbol(h->name);
        if (!info || info->role != SymbolRole::Synthesized) continue;
        for (const Rule* r : k.program().rules_for(h->name)) {
          ProofStep st = mk(StepKind::Simplify, target);
          st.side = side;
          st.rule = r->label;
          st.pos = pos;
          if (k.can_apply(st)) {
            k.apply(st);
            changed = true;
            break;
          }
        }
        if (changed) break;
      }
      if (changed) break;
    }
    if (!changed) return;
  }
}

// One recursive unrolling of the recursor at the root of the side.
bool unroll(Kernel& k, int target, const std::string& side) {
  auto rf = rec_form(k.program(), side_of(k, target, side));
  if (!rf) return false;
  ProofStep st = mk(StepKind::Simplify, target);
  st.side = side;
  st.rule = rf->rec + ":1";
  if (!k.can_apply(st)) return false;
  k.apply(st);
  unfold_synth(k, target);
  calc_ground(k, target, side);
  return true;
}

// HDelete with `hyp`, unrolling either side up to twice when the recursor
// arguments are not yet aligned.
bool close_aligned(Kernel& k, int target, const std::string& hyp) {
  ProofStep hd = mk(StepKind::HDelete, target);
  hd.hyp = hyp;
  for (int l = 0; l <= 2; ++l)
    for (int r = 0; r <= 2; ++r) {
      bool ok = attempt(k, [&](Kernel& t) {
        for (int i = 0; i < l; ++i)
          if (!unroll(t, target, "left")) return false;
        for (int i = 0; i < r; ++i)
          if (!unroll(t, target, "right")) return false;
        if (!t.can_apply(hd)) return false;
        t.apply(hd);
        return true;
      });
      if (ok) return true;
    }
  return false;
}

std::string bridge_text(const Program& p, const std::string& rec, const Term& from, const Term& to) {
  Term r = p.symbol(rec);
  Term i = mk_var("i", int_type()), y = mk_var("y", int_type()), a = mk_var("a", int_type());
  return to_string(mk_apps(r, {from, i, y, a})) + " ~ " + to_string(mk_apps(r, {to, i, y, a}));
}

// The fixed bridging proof: induction on the recursion, both sides stepped
// together, the context symbols unfolded.
Script bridge_script(const std::string& rec) {
  ScriptOp induct;
  induct.kind = ScriptOp::Induct;
  ScriptOp cs;
  cs.kind = ScriptOp::CaseGuard;
  cs.side = "left";
  cs.rule = rec + ":0";
  ScriptOp s0l{ScriptOp::Simp, "left", rec + ":0"}, s0r{ScriptOp::Simp, "right", rec + ":0"};
  ScriptOp s1l{ScriptOp::Simp, "left", rec + ":1"}, s1r{ScriptOp::Simp, "right", rec + ":1"};
  ScriptOp unfold{ScriptOp::Unfold}, close{ScriptOp::Close};
  cs.then_ops = {s0l, s0r, unfold, close};
  cs.else_ops = {s1l, s1r, unfold, close};
  return {induct, cs};
}

// Existing symbols first, so bridges read `rec [*] .. ~ rec F_.. ..`.
bool plain_fn(const Term& f) { return is_sym(f) && (f->theory || f->name.rfind("F_", 0) != 0); }

}  // namespace

void expose_heads(Kernel& k, int target) {
  for (const char* side : {"left", "right"}) {
    for (int guard = 0; guard < 8; ++guard) {
      Term s = side_of(k, target, side);
      Term h = head(s);
      if (!is_sym(h) || h->theory) break;
      const SymbolInfo* info = k.program().find_symbol(h->name);
      if (!info || info->role != SymbolRole::User || !match_template(k.program(), h->name).empty()) break;
      bool stepped = false;
      for (const Rule* r : k.program().rules_for(h->name)) {
        ProofStep st = mk(StepKind::Simplify, target);
        st.side = side;
        st.rule = r->label;
        if (k.can_apply(st)) {
          k.apply(st);
          calc_ground(k, target, side);
          stepped = true;
          break;
        }
      }
      if (!stepped) break;
    }
  }
}

TacticResult tactic_one_sided(Kernel& k, int target, const std::string& side) {
  TacticResult res;
  res.steps_before = k.trace().size();
  Kernel t = k;
  try {
    expose_heads(t, target);
    std::string why;
    if (!to_recursor(t, target, side, &why)) {
      res.message = "the " + side + " side is not an instance of a template" + (why.empty() ? "" : ": " + why);
      return res;
    }
    auto rf = rec_form(t.program(), side_of(t, target, side));
    if (!rf) {
      res.message = "no recursor at the root";
      return res;
    }
    // Prefer an entry whose other recursor is what the other side becomes.
    std::string other_rec;
    {
      Kernel peek = t;
      std::string other = side == "left" ? "right" : "left";
      if (to_recursor(peek, target, other, nullptr))
        if (auto of = rec_form(peek.program(), side_of(peek, target, other))) other_rec = of->rec;
      if (other_rec.empty()) {
        Term oh = head(side_of(t, target, other));
        if (is_sym(oh))
          for (const auto& m : match_template(t.program(), oh->name)) other_rec = template_recursor(m.kind);
      }
    }
    std::vector<std::pair<const RecursorLemma*, bool>> cands;  // entry, rewrite lr
    for (const auto& e : lemma_bank()) {
      if (e.lhs_recursor == rf->rec) cands.emplace_back(&e, true);
      if (e.rhs_recursor == rf->rec) cands.emplace_back(&e, false);
    }
    std::stable_sort(cands.begin(), cands.end(), [&](const auto& a, const auto& b) {
      auto score = [&](const auto& c) {
        const std::string& far = c.second ? c.first->rhs_recursor : c.first->lhs_recursor;
        return (far == other_rec ? 0 : 2) + (c.first->holes ? 1 : 0);
      };
      return score(a) < score(b);
    });
    for (const auto& [e, lr] : cands) {
      std::vector<Term> inst = inst_for(*e, rf->fn, rf->fn);
      if (e->holes && discharge_axioms(*e, inst, t.program()).status != AxiomCheck::Pass) continue;
      bool ok = attempt(t, [&](Kernel& kk) {
        std::string id = ensure_entry(kk, *e, inst);
        ProofStep st = mk(StepKind::Hypothesis, target);
        st.side = side;
        st.hyp = id;
        st.direction = lr ? "lr" : "rl";
        if (!kk.can_apply(st, &why)) return false;
        kk.apply(st);
        return true;
      });
      if (ok) {
        res.ok = true;
        res.message = "rewrote the " + side + " side with " + e->id;
        k = std::move(t);
        return res;
      }
    }
    res.message = "no bank entry applies to the " + side + " side" + (why.empty() ? "" : ": " + why);
  } catch (const std::exception& e) {
    res.message = e.what();
  }
  return res;
}

TacticResult tactic_two_sided(Kernel& k, int target, bool prove_bridges) {
  TacticResult res;
  res.steps_before = k.trace().size();
  Kernel t = k;
  try {
    expose_heads(t, target);
    std::string why;
    for (const char* side : {"left", "right"})
      if (!to_recursor(t, target, side, &why)) {
        res.message = std::string("the ") + side + " side is not an instance of a template" +
                      (why.empty() ? "" : ": " + why);
        return res;
      }
    auto lf = rec_form(t.program(), side_of(t, target, "left"));
    auto rf = rec_form(t.program(), side_of(t, target, "right"));
    if (!lf || !rf) {
      res.message = "sides are not in recursor form";
      return res;
    }
    for (const auto& e : lemma_bank()) {
      bool fwd = e.lhs_recursor == lf->rec && e.rhs_recursor == rf->rec;
      bool bwd = e.lhs_recursor == rf->rec && e.rhs_recursor == lf->rec;
      if (!fwd && !bwd) continue;
      const Term& ef_l = fwd ? lf->fn : rf->fn;
      const Term& ef_r = fwd ? rf->fn : lf->fn;
      if (!e.holes && !term_eq(lf->fn, rf->fn)) {
        // The entry needs one function on both recursors.
        const Term& c = plain_fn(lf->fn) ? lf->fn : rf->fn;
        const Term& F = plain_fn(lf->fn) ? rf->fn : lf->fn;
        res.bridges = {bridge_text(t.program(), lf->rec, c, F), bridge_text(t.program(), rf->rec, c, F)};
        if (!prove_bridges) {
          res.message = "bridge-needed";
          return res;
        }
        std::vector<std::string> ids;
        for (std::size_t b = 0; b < 2; ++b) {
          const std::string& rec = b == 0 ? lf->rec : rf->rec;
          ids.push_back(hyp_with(t, printed(res.bridges[b], t.program())).value_or(""));
          if (ids.back().empty()) ids.back() = prove_lemma(t, res.bridges[b], bridge_script(rec));
        }
        // Rewrite one side so both recursors carry the same function.
        bool ok = false;
        for (std::size_t b = 0; b < 2 && !ok; ++b) {
          const char* side = b == 0 ? "left" : "right";
          const Term& have = b == 0 ? lf->fn : rf->fn;
          const Term& want = b == 0 ? rf->fn : lf->fn;
          ProofStep st = mk(StepKind::Hypothesis, target);
          st.side = side;
          st.hyp = ids[b];
          st.direction = term_eq(have, c) ? "lr" : "rl";
          (void)want;
          if (!t.can_apply(st)) continue;
          ok = attempt(t, [&](Kernel& kk) {
            kk.apply(st);
            std::string id = ensure_entry(kk, e, {});
            return close_aligned(kk, target, id);
          });
        }
        if (ok) {
          res.ok = true;
          res.message = "closed with " + e.id + " after bridging";
          k = std::move(t);
          return res;
        }
        continue;
      }
      std::vector<Term> inst = inst_for(e, ef_l, ef_r);
      if (e.holes) {
        AxiomCheck chk = discharge_axioms(e, inst, t.program());
        if (chk.status != AxiomCheck::Pass) {
          res.message = e.id + ": " + chk.message;
          continue;
        }
      }
      bool ok = attempt(t, [&](Kernel& kk) {
        std::string id = ensure_entry(kk, e, inst);
        return close_aligned(kk, target, id);
      });
      if (ok) {
        res.ok = true;
        res.message = "closed with " + e.id;
        k = std::move(t);
        return res;
      }
    }
    if (res.message.empty()) res.message = "no bank entry closes " + lf->rec + " against " + rf->rec;
  } catch (const std::exception& e) {
    res.message = e.what();
  }
  return res;
}

// --- generic search ---------------------------------------------------------

namespace {

bool search(Kernel& k, int depth, long& budget) {
  if (k.state().E.empty()) return true;
  if (depth <= 0 || budget <= 0) return false;
  int target = k.state().E.front().id;
  auto steps = enumerate_steps(k, target);
  std::vector<ProofStep> pick;
  for (const auto& s : steps)
    if (s.kind == StepKind::Delete || s.kind == StepKind::HDelete) {
      pick = {s};
      break;
    }
  if (pick.empty()) {
    bool simp = false;
    int hyps = 0;
    for (const auto& s : steps) {
      if (s.kind == StepKind::Simplify && !simp) {
        pick.push_back(s);
        simp = true;
      }
      if (s.kind == StepKind::Hypothesis && hyps < 3) {
        pick.push_back(s);
        ++hyps;
      }
    }
    bool just_inducted = !k.trace().empty() && k.trace().back().kind == StepKind::Induct &&
                         k.trace().back().target == target;
    if (pick.empty())
      for (const auto& s : steps)
        if (s.kind == StepKind::Case || (s.kind == StepKind::Induct && !just_inducted)) pick.push_back(s);
  }
  for (const auto& s : pick) {
    if (--budget <= 0) return false;
    Kernel t = k;
    try {
      t.apply(s);
    } catch (const StepRejected&) {
      continue;
    }
    if (search(t, depth - 1, budget)) {
      k = std::move(t);
      return true;
    }
  }
  return false;
}

// Rewrites either side at the root with proved equations and closes with
// one of them: a transitivity chain through earlier results.
bool chain(Kernel& k, int target, int depth, long& budget) {
  std::vector<std::string> ids;
  for (const auto& a : k.state().A)
    if (a.justification.rfind("proved:", 0) == 0) ids.push_back(a.id);
  for (const auto& id : ids) {
    ProofStep hd = mk(StepKind::HDelete, target);
    hd.hyp = id;
    if (k.can_apply(hd)) {
      k.apply(hd);
      return true;
    }
  }
  if (depth <= 0) return false;
  for (const auto& id : ids)
    for (const char* side : {"left", "right"})
      for (const char* dir : {"lr", "rl"}) {
        if (--budget <= 0) return false;
        ProofStep st = mk(StepKind::Hypothesis, target);
        st.side = side;
        st.hyp = id;
        st.direction = dir;
        if (!k.can_apply(st)) continue;
        Kernel t = k;
        t.apply(st);
        if (chain(t, target, depth - 1, budget)) {
          k = std::move(t);
          return true;
        }
      }
  return false;
}

}  // namespace

bool generic_search(Kernel& k, int depth, long& budget) {
  for (int d = 1; d <= depth; ++d) {
    Kernel t = k;
    if (search(t, d, budget)) {
      k = std::move(t);
      return true;
    }
    if (budget <= 0) break;
  }
  return false;
}

AutoResult auto_prove(const Program& p, const Equation& goal, const AutoOptions& opt) {
  AutoResult res;
  Kernel base(p, goal);
  auto finish = [&](Kernel k, const std::string& strategy) {
    res.verdict = k.verdict();
    res.strategy = strategy;
    res.kernel = std::make_unique<Kernel>(std::move(k));
    return std::move(res);
  };
  // Template tactics.
  {
    Kernel k = base;
    TacticResult two = tactic_two_sided(k, 0, true);
    res.log.push_back("two-sided: " + two.message);
    if (two.ok && k.state().E.empty()) return finish(std::move(k), "two-sided");
  }
  for (const char* side : {"left", "right"}) {
    Kernel k = base;
    TacticResult one = tactic_one_sided(k, 0, side);
    res.log.push_back(std::string("one-sided ") + side + ": " + one.message);
    if (!one.ok) continue;
    long budget = opt.budget / 4;
    if (generic_search(k, opt.depth, budget)) return finish(std::move(k), "one-sided");
  }
  // Earlier results.
  if (!opt.proved.empty()) {
    Kernel k = base;
    expose_heads(k, 0);
    Kernel unexposed = base;
    for (Kernel* kk : {&unexposed, &k}) {
      try {
        for (const auto& pe : opt.proved) {
          ProofStep st = mk(StepKind::AssumeAxiom);
          st.equation = equation_str(pe.eq);
          st.justification = "proved:" + pe.name;
          kk->apply(st);
        }
      } catch (const StepRejected& e) {
        res.log.push_back(std::string("chain: ") + e.what());
        continue;
      }
      long budget = opt.budget;
      if (chain(*kk, 0, 3, budget)) return finish(std::move(*kk), "chain");
    }
    res.log.push_back("chain: no chain of proved equations closes the goal");
  }
  {
    Kernel k = base;
    long budget = opt.budget;
    if (generic_search(k, opt.depth, budget)) return finish(std::move(k), "search");
    res.log.push_back("search: budget or depth exhausted");
  }
  Kernel k = base;
  try {
    expose_heads(k, 0);
  } catch (const std::exception&) {
  }
  return finish(std::move(k), "");
}

}  // namespace lcstrs
