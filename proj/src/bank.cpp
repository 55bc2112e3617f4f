#include "lcstrs/solver.hpp"
#include "lcstrs/templates.hpp"
#include "lcstrs/theory.hpp"

namespace lcstrs {

using nlohmann::json;

namespace {

const char* op_name(ScriptOp::Kind k) {
  switch (k) {
    case ScriptOp::Induct: return "induct";
    case ScriptOp::CaseGuard: return "case-guard";
    case ScriptOp::Simp: return "simplify";
    case ScriptOp::Unfold: return "unfold";
    case ScriptOp::Hyp: return "hypothesis";
    case ScriptOp::HDel: return "hdelete";
    case ScriptOp::Delete: return "delete";
    case ScriptOp::Close: return "close";
    case ScriptOp::Lemma: return "lemma";
  }
  return "?";
}

std::string resolve(const std::string& ref, const ScriptEnv& env) {
  if (ref.size() > 2 && ref[1] == '@') {
    std::size_t k = std::stoul(ref.substr(2));
    const auto& pool = ref[0] == 'H' ? env.hyps : env.axioms;
    if (k >= pool.size()) throw ScriptError("unbound script reference " + ref);
    return pool[k];
  }
  return ref;
}

Term side_term(const Kernel& k, int target, const std::string& side) {
  const EquationContext* c = k.find(target);
  if (!c) throw ScriptError("context " + std::to_string(target) + " is gone");
  return side == "left" ? c->eq.lhs : c->eq.rhs;
}

// Applies the first variant accepted by the kernel, trying positions
// outermost first.
bool apply_somewhere(Kernel& k, ProofStep st, std::string* why) {
  for (const auto& pos : positions(side_term(k, st.target, st.side))) {
    st.pos = pos;
    if (k.can_apply(st, why)) {
      k.apply(st);
      return true;
    }
  }
  return false;
}

ProofStep mk(StepKind kind, int target) {
  ProofStep st;
  st.kind = kind;
  st.target = target;
  return st;
}

// The guard of `label` instantiated where its left-hand side first matches.
std::optional<std::string> guard_at(const Kernel& k, int target, const std::string& side, const std::string& label) {
  const Rule* r = k.program().rule_by_label(label);
  if (!r) throw ScriptError("no rule " + label);
  std::size_t n = args(r->lhs).size();
  for (const auto& pos : positions(side_term(k, target, side))) {
    Term sub = *subterm_at(side_term(k, target, side), pos);
    auto as = args(sub);
    if (as.size() < n) continue;
    auto sg = match_term(r->lhs, mk_apps(head(sub), {as.begin(), as.begin() + n}));
    if (sg) return to_string(apply_subst(r->constraint, *sg));
  }
  return std::nullopt;
}

std::vector<std::string> local_refs(const ScriptEnv& env) {
  std::vector<std::string> out(env.hyps.rbegin(), env.hyps.rend());
  out.insert(out.end(), env.axioms.begin(), env.axioms.end());
  return out;
}

bool try_close(Kernel& k, int target, const ScriptEnv& env) {
  if (k.can_apply(mk(StepKind::Delete, target))) {
    k.apply(mk(StepKind::Delete, target));
    return true;
  }
  auto refs = local_refs(env);
  for (const auto& r : refs) {
    ProofStep st = mk(StepKind::HDelete, target);
    st.hyp = r;
    if (k.can_apply(st)) {
      k.apply(st);
      return true;
    }
  }
  // One Hypothesis step, then Delete or HDelete.
  for (const auto& r : refs)
    for (const char* side : {"left", "right"})
      for (const char* dir : {"lr", "rl"}) {
        const EquationContext* c = k.find(target);
        for (const auto& pos : positions(side == std::string("left") ? c->eq.lhs : c->eq.rhs)) {
          ProofStep st = mk(StepKind::Hypothesis, target);
          st.side = side;
          st.hyp = r;
          st.direction = dir;
          st.pos = pos;
          if (!k.can_apply(st)) continue;
          Kernel trial = k;
          trial.apply(st);
          if (trial.can_apply(mk(StepKind::Delete, target))) {
            k.apply(st);
            k.apply(mk(StepKind::Delete, target));
            return true;
          }
          for (const auto& r2 : refs) {
            ProofStep hd = mk(StepKind::HDelete, target);
            hd.hyp = r2;
            if (trial.can_apply(hd)) {
              k.apply(st);
              k.apply(hd);
              return true;
            }
          }
        }
      }
  return false;
}

void unfold_all(Kernel& k, int target) {
  for (int guard = 0; guard < 200; ++guard) {
    bool changed = false;
    for (const char* side : {"left", "right"}) {
      Term s = side_term(k, target, side);
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

}  // namespace

json script_json(const Script& s) {
  json out = json::array();
  for (const auto& op : s) {
    json j = {{"op", op_name(op.kind)}};
    if (!op.side.empty()) j["side"] = op.side;
    if (!op.rule.empty()) j["rule"] = op.rule;
    if (!op.ref.empty()) j["ref"] = op.ref;
    if (!op.dir.empty()) j["direction"] = op.dir;
    if (!op.equation.empty()) j["equation"] = op.equation;
    if (!op.then_ops.empty() || !op.else_ops.empty()) {
      j["then"] = script_json(op.then_ops);
      j["else"] = script_json(op.else_ops);
    }
    if (!op.body.empty()) j["body"] = script_json(op.body);
    out.push_back(j);
  }
  return out;
}

void run_script(Kernel& k, int target, const Script& s, ScriptEnv& env) {
  for (const auto& op : s) {
    auto fail = [&](const std::string& why) {
      std::string ctx;
      if (const EquationContext* c = k.find(target)) ctx = " on " + equation_str(c->eq);
      throw ScriptError(std::string(op_name(op.kind)) + (op.rule.empty() ? "" : " " + op.rule) +
                        (op.ref.empty() ? "" : " " + op.ref) + ctx + ": " + why);
    };
    std::string why;
    switch (op.kind) {
      case ScriptOp::Induct:
        k.apply(mk(StepKind::Induct, target));
        env.hyps.push_back(k.state().H.back().id);
        break;
      case ScriptOp::CaseGuard: {
        auto g = guard_at(k, target, op.side, op.rule);
        if (!g) fail("rule does not match");
        ProofStep st = mk(StepKind::Case, target);
        st.split = *g;
        auto ids = k.apply(st);
        run_script(k, ids[0], op.then_ops, env);
        run_script(k, ids[1], op.else_ops, env);
        return;
      }
      case ScriptOp::Simp: {
        ProofStep st = mk(StepKind::Simplify, target);
        st.side = op.side;
        st.rule = op.rule;
        if (!apply_somewhere(k, st, &why)) fail(why.empty() ? "no position" : why);
        break;
      }
      case ScriptOp::Unfold:
        unfold_all(k, target);
        break;
      case ScriptOp::Hyp: {
        ProofStep st = mk(StepKind::Hypothesis, target);
        st.side = op.side;
        st.hyp = resolve(op.ref, env);
        st.direction = op.dir;
        if (!apply_somewhere(k, st, &why)) fail(why.empty() ? "no position" : why);
        break;
      }
      case ScriptOp::HDel: {
        ProofStep st = mk(StepKind::HDelete, target);
        st.hyp = resolve(op.ref, env);
        if (!k.can_apply(st, &why)) fail(why);
        k.apply(st);
        return;
      }
      case ScriptOp::Delete:
        if (!k.can_apply(mk(StepKind::Delete, target), &why)) fail(why);
        k.apply(mk(StepKind::Delete, target));
        return;
      case ScriptOp::Close:
        if (!try_close(k, target, env)) fail("no closing step applies");
        return;
      case ScriptOp::Lemma: {
        ProofStep st = mk(StepKind::AddLemma, -1);
        st.equation = op.equation;
        // Instantiated holes are already in the equation text.
        auto ids = k.apply(st);
        run_script(k, ids[0], op.body, env);
        break;
      }
    }
  }
  if (k.find(target)) {
    throw ScriptError("script ended with " + equation_str(k.find(target)->eq) + " open");
  }
}

std::string prove_lemma(Kernel& k, const std::string& equation, const Script& s,
                        const std::vector<std::string>& axioms) {
  ProofStep st;
  st.kind = StepKind::AddLemma;
  st.equation = equation;
  auto ids = k.apply(st);
  ScriptEnv env;
  env.axioms = axioms;
  run_script(k, ids[0], s, env);
  if (env.hyps.empty()) throw ScriptError("lemma script without Induct");
  return env.hyps[0];
}

// --- bank -------------------------------------------------------------------

namespace {

ScriptOp op(ScriptOp::Kind k, std::string side = "", std::string rule = "", std::string ref = "",
            std::string dir = "") {
  ScriptOp o;
  o.kind = k;
  o.side = std::move(side);
  o.rule = std::move(rule);
  o.ref = std::move(ref);
  o.dir = std::move(dir);
  return o;
}
ScriptOp simp(const std::string& side, const std::string& rule) { return op(ScriptOp::Simp, side, rule); }
ScriptOp hyp(const std::string& side, const std::string& ref, const std::string& dir) {
  return op(ScriptOp::Hyp, side, "", ref, dir);
}
ScriptOp close_op() { return op(ScriptOp::Close); }
ScriptOp case_on(const std::string& side, const std::string& rule, Script yes, Script no) {
  ScriptOp o = op(ScriptOp::CaseGuard, side, rule);
  o.then_ops = std::move(yes);
  o.else_ops = std::move(no);
  return o;
}
ScriptOp lemma_op(const std::string& eq, Script body) {
  ScriptOp o = op(ScriptOp::Lemma);
  o.equation = eq;
  o.body = std::move(body);
  return o;
}

// Two nested inductions: the outer step rewrites the left side with the
// first hypothesis; the inner one closes with the second.
Script nested(const std::string& l, const std::string& r, const std::string& inner_rule, Script inner_step) {
  return {op(ScriptOp::Induct),
          case_on("left", l + ":0", {simp("left", l + ":0"), simp("right", r + ":0"), close_op()},
                  {simp("left", l + ":1"), hyp("left", "H@0", "lr"), simp("right", r + ":1"), op(ScriptOp::Induct),
                   case_on("left", inner_rule + ":0",
                           {simp("left", inner_rule + ":0"), simp("right", inner_rule + ":0"), close_op()},
                           std::move(inner_step))})};
}

// Outer induction whose step case is closed by a generalized lemma.
Script generalized(const std::string& l, const std::string& r, const std::string& lemma, const std::string& g,
                   Script g_step) {
  return {op(ScriptOp::Induct),
          case_on("left", l + ":0", {simp("left", l + ":0"), simp("right", r + ":0"), close_op()},
                  {simp("left", l + ":1"), hyp("left", "H@0", "lr"), simp("right", r + ":1"),
                   lemma_op(lemma, {op(ScriptOp::Induct),
                                    case_on("left", g + ":0",
                                            {simp("left", g + ":0"), simp("right", g + ":0"), close_op()},
                                            std::move(g_step))}),
                   op(ScriptOp::HDel, "", "", "H@1")})};
}

std::vector<RecursorLemma> build_bank() {
  std::vector<RecursorLemma> bank;
  {
    RecursorLemma e;
    e.id = "tailup-recdn";
    e.equation = "tailup f x y z ~ recdn f x y z";
    e.requirements = {{"tailup f x y z", "recdn f x' y (f x z)", "x <= y /\\ x' = x + 1"}};
    e.script = nested("tailup", "recdn", "recdn", {simp("left", "recdn:1"), simp("right", "recdn:1"), close_op()});
    e.lhs_recursor = "tailup";
    e.rhs_recursor = "recdn";
    bank.push_back(e);
  }
  {
    RecursorLemma e;
    e.id = "taildn-recup";
    e.equation = "taildn f x y z ~ recup f x y z";
    e.requirements = {{"taildn f x y z", "recup f x y' (f z y)", "x <= y /\\ y' = y - 1"}};
    e.script = nested("taildn", "recup", "recup", {simp("left", "recup:1"), simp("right", "recup:1"), close_op()});
    e.lhs_recursor = "taildn";
    e.rhs_recursor = "recup";
    bank.push_back(e);
  }
  {
    RecursorLemma e;
    e.id = "tailup-taildn";
    e.holes = 2;
    e.equation = "tailup #1 x y a ~ taildn #2 x y a";
    e.axioms = {"#1 x (#2 y z) ~ #2 (#1 x y) z", "#1 x y ~ #2 y x"};
    e.requirements = {
        {"tailup #1 x y a", "taildn #2 x1 y (#1 x a)", "x <= y /\\ x1 = x + 1 /\\ y1 = y - 1"},
        {"taildn #2 x1 y (#1 x a)", "taildn #2 x1 y1 (#1 x (#2 a y))",
         "x <= y /\\ x1 = x + 1 /\\ y1 = y - 1 /\\ x1 <= y"},
    };
    e.script = nested("tailup", "taildn", "taildn",
                      {simp("left", "taildn:1"), simp("right", "taildn:1"), hyp("left", "A@0", "rl"), close_op()});
    e.lhs_recursor = "tailup";
    e.rhs_recursor = "taildn";
    bank.push_back(e);
  }
  {
    RecursorLemma e;
    e.id = "taildn-recdn";
    e.holes = 2;
    e.equation = "taildn #2 x y a ~ recdn #1 x y a";
    e.axioms = {"#1 x (#1 y z) ~ #1 y (#1 x z)", "#1 x y ~ #2 y x"};
    e.requirements = {
        {"taildn #2 x y a", "recdn #1 x y1 (#2 a y)", "x <= y /\\ y1 = y - 1"},
        {"recdn #1 x y1 (#2 a y)", "#1 y1 (#1 y (recdn #1 x y2 a))", "x <= y /\\ x <= y1 /\\ y2 = y1 - 1"},
    };
    e.script = generalized("taildn", "recdn", "recdn #1 x y1 (#2 a y) ~ #1 y (recdn #1 x y1 a)", "recdn",
                           {simp("left", "recdn:1"), simp("right", "recdn:1"), hyp("right", "A@0", "lr"), close_op()});
    e.lhs_recursor = "taildn";
    e.rhs_recursor = "recdn";
    bank.push_back(e);
  }
  {
    RecursorLemma e;
    e.id = "tailup-recup";
    e.holes = 2;
    e.equation = "tailup #2 x y a ~ recup #1 x y a";
    e.axioms = {"#1 (#1 x y) z ~ #1 (#1 x z) y", "#1 x y ~ #2 y x"};
    e.requirements = {
        {"tailup #2 x y a", "recup #1 x1 y (#2 x a)", "x <= y /\\ x1 = x + 1"},
        {"recup #1 x1 y (#2 x a)", "#1 (#1 (recup #1 x2 y a) x) x1", "x <= y /\\ x1 <= y /\\ x2 = x1 + 1"},
    };
    e.script = generalized("tailup", "recup", "recup #1 x1 y (#2 x a) ~ #1 (recup #1 x1 y a) x", "recup",
                           {simp("left", "recup:1"), simp("right", "recup:1"), hyp("right", "A@0", "lr"), close_op()});
    e.lhs_recursor = "tailup";
    e.rhs_recursor = "recup";
    bank.push_back(e);
  }
  {
    RecursorLemma e;
    e.id = "recup-recdn";
    e.holes = 2;
    e.equation = "recup #1 x y a ~ recdn #2 x y a";
    e.axioms = {"#1 (#2 x y) z ~ #2 x (#1 y z)", "#1 x y ~ #2 y x"};
    e.requirements = {
        {"recup #1 x y a", "#1 (recdn #2 x1 y a) x", "x <= y /\\ x1 = x + 1"},
        {"#2 y (recdn #2 x y1 a)", "#2 y (#1 (recdn #2 x1 y1 a) x)",
         "x <= y /\\ x1 = x + 1 /\\ y1 = y - 1 /\\ x1 <= y"},
    };
    e.script = nested("recup", "recdn", "recdn",
                      {simp("left", "recdn:1"), simp("right", "recdn:1"), hyp("right", "H@1", "rl"), close_op()});
    e.lhs_recursor = "recup";
    e.rhs_recursor = "recdn";
    bank.push_back(e);
  }
  return bank;
}

Term parse_with_holes(const std::string& text, const Program& p, std::map<std::string, Type>& vars,
                      const Type& expected = nullptr) {
  return parse_term(text, p, vars, true, true, expected);
}

}  // namespace

const std::vector<RecursorLemma>& lemma_bank() {
  static const std::vector<RecursorLemma> bank = build_bank();
  return bank;
}

const RecursorLemma* find_lemma(const std::string& id) {
  for (const auto& e : lemma_bank())
    if (e.id == id) return &e;
  return nullptr;
}

InstantiatedLemma instantiate_lemma(const RecursorLemma& e, const Program& p, const std::vector<Term>& inst) {
  if (static_cast<int>(inst.size()) < e.holes) throw TermError(e.id + " needs " + std::to_string(e.holes) + " terms");
  InstantiatedLemma out;
  auto fill_eq = [&](const std::string& text) {
    std::map<std::string, Type> vars;
    Equation q = parse_equation(text, p, vars, true);
    if (e.holes) q = {fill(q.lhs, inst), fill(q.rhs, inst), fill(q.constraint, inst)};
    return q;
  };
  out.equation = fill_eq(e.equation);
  out.equation_text = equation_str(out.equation);
  for (const auto& a : e.axioms) {
    out.axioms.push_back(fill_eq(a));
    out.axiom_texts.push_back(equation_str(out.axioms.back()));
  }
  for (const auto& r : e.requirements) {
    std::map<std::string, Type> vars;
    Term l = parse_with_holes(r.left, p, vars);
    Term rt = parse_with_holes(r.right, p, vars, l->type);
    Term c = parse_term(r.constraint, p, vars, true, true, bool_type());
    if (e.holes) {
      l = fill(l, inst);
      rt = fill(rt, inst);
    }
    out.requirements.push_back({l, rt, c, true, e.id});
  }
  return out;
}

const char* axiom_status_str(AxiomCheck::Status s) {
  switch (s) {
    case AxiomCheck::Pass: return "pass";
    case AxiomCheck::Fail: return "fail";
    case AxiomCheck::Unknown: return "unknown";
  }
  return "?";
}

AxiomCheck discharge_axioms(const RecursorLemma& e, const std::vector<Term>& inst, const Program& p) {
  AxiomCheck out;
  InstantiatedLemma il = instantiate_lemma(e, p, inst);
  for (std::size_t i = 0; i < il.axioms.size(); ++i) {
    const Equation& ax = il.axioms[i];
    if (ring_equal(ax, p)) continue;
    out.failed = static_cast<int>(i);
    out.status = AxiomCheck::Unknown;
    out.message = "axiom " + il.axiom_texts[i] + " not proved";
    // Arithmetic on both sides: ask the solver for a counterexample.
    if (is_theory_term(ax.lhs) && is_theory_term(ax.rhs) && is_base_type(ax.lhs)) {
      SolverResult r = is_valid(mk_bin("=", ax.lhs, ax.rhs));
      if (r.verdict == Verdict::No) {
        out.status = AxiomCheck::Fail;
        std::string w;
        for (const auto& [v, val] : r.model) {
          if (!w.empty()) w += ", ";
          w += v + " = " + to_string(val.to_term());
        }
        out.witness = w;
        out.message = "axiom " + il.axiom_texts[i] + " fails at " + w;
      }
    }
    return out;
  }
  return out;
}

std::string prove_bank_entry(Kernel& k, const RecursorLemma& e, const std::vector<Term>& inst) {
  InstantiatedLemma il = instantiate_lemma(e, k.program(), inst);
  AxiomCheck chk = discharge_axioms(e, inst, k.program());
  std::vector<std::string> axiom_ids;
  for (std::size_t i = 0; i < il.axiom_texts.size(); ++i) {
    ProofStep st;
    st.kind = StepKind::AssumeAxiom;
    st.equation = il.axiom_texts[i];
    // Axioms that were not discharged stay open obligations.
    st.justification = chk.status == AxiomCheck::Pass ? "ring" : "";
    k.apply(st);
    axiom_ids.push_back(k.state().A.back().id);
  }
  Script s = e.script;
  if (e.holes) {
    // Generalization lemmas inside the script carry holes too.
    std::function<void(Script&)> inst_ops = [&](Script& ops) {
      for (auto& o : ops) {
        if (!o.equation.empty()) {
          std::map<std::string, Type> vars;
          Equation q = parse_equation(o.equation, k.program(), vars, true);
          o.equation = equation_str({fill(q.lhs, inst), fill(q.rhs, inst), fill(q.constraint, inst)});
        }
        inst_ops(o.then_ops);
        inst_ops(o.else_ops);
        inst_ops(o.body);
      }
    };
    inst_ops(s);
  }
  return prove_lemma(k, il.equation_text, s, axiom_ids);
}

}  // namespace lcstrs
