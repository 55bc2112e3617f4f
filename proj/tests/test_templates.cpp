#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lcstrs/kernel.hpp"
#include "lcstrs/templates.hpp"

#include <fstream>
#include <sstream>

using namespace lcstrs;

namespace {

std::string slurp(const std::string& rel) {
  std::ifstream in(std::string(LCSTRS_SOURCE_DIR) + "/" + rel);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Program& fac() {
  static const Program p = parse_program(slurp("corpus/factorial.lcstrs"));
  return p;
}

const Program& funfac() {
  static const Program p = parse_program(slurp("corpus/funfac.lcstrs"));
  return p;
}

Program with_rec(Program p) {
  install_recursors(p);
  return p;
}

Equation E(const std::string& s, const Program& p) {
  std::map<std::string, Type> vars;
  return parse_equation(s, p, vars);
}

std::string rules_str(const std::vector<Rule>& rs) {
  std::string out;
  for (const auto& r : rs) out += rule_str(r) + "\n";
  return out;
}

// Kernel over a program with the recursors already installed, goal trivial.
Kernel session(const Program& p) {
  Kernel k(p, E("0 ~ 0", p));
  ProofStep st;
  st.kind = StepKind::Delete;
  st.target = 0;
  k.apply(st);
  st.kind = StepKind::InstallRecursors;
  k.apply(st);
  return k;
}

std::string prove_template_lemma(Kernel& k, const TemplateMatch& m) {
  TemplateLemma tl = emit_template_recursor_lemma(m, k.program());
  for (const auto& s : tl.setup)
    if (s.kind != StepKind::InstallRecursors) k.apply(s);
  return prove_lemma(k, tl.equation, tl.script);
}

Term synth_fn(Kernel& k, const TemplateMatch& m) {
  if (m.synth && !k.program().find_symbol(m.synth->name)) k.apply(m.synth->define_step());
  return m.fn;
}

}  // namespace

TEST_CASE("normalize_inequalities") {
  auto norm = [](const std::string& sym) { return rules_str(normalize_inequalities([&] {
                                            std::vector<Rule> rs;
                                            for (const Rule* r : fac().rules_for(sym)) rs.push_back(*r);
                                            return rs;
                                          }())); };
  CHECK(norm("d") == "d x a -> a [x < 1]\nd x a -> d (x - 1) (a * x) [x >= 1]\n");
  CHECK(norm("facRD") == "facRD x -> 1 [x < 2]\nfacRD x -> x * facRD (x - 1) [x >= 2]\n");
  CHECK(norm("u") == "u x i a -> a [i > x]\nu x i a -> u x (i + 1) (i * a) [i <= x]\n");
  // Idempotent.
  std::vector<Rule> once;
  for (const Rule* r : fac().rules_for("d")) once.push_back(*r);
  once = normalize_inequalities(once);
  CHECK(rules_str(normalize_inequalities(once)) == rules_str(once));
}

TEST_CASE("template matches of the factorial programs") {
  auto ms = match_template(fac(), "u");
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].kind == TemplateKind::TailUp);
  CHECK(to_string(ms[0].F) == "#1 * #2");
  CHECK(to_string(ms[0].bound) == "x");
  CHECK(to_string(ms[0].context) == "u x #1 #2");
  CHECK(to_string(ms[0].fn) == "[*]");

  ms = match_template(fac(), "U");
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].kind == TemplateKind::RecUp);
  CHECK(to_string(ms[0].F) == "#2 * #1");
  CHECK(to_string(ms[0].bound) == "x - 1");
  CHECK(to_string(ms[0].base) == "x");
  CHECK(to_string(ms[0].context) == "U #1 x");
  REQUIRE(ms[0].synth);
  CHECK(ms[0].synth->rhs == "x2 * x1");

  ms = match_template(fac(), "d");
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].kind == TemplateKind::TailDown);
  CHECK(to_string(ms[0].F) == "#1 * #2");
  CHECK(to_string(ms[0].bound) == "1");

  ms = match_template(fac(), "facRD");
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].kind == TemplateKind::RecDown);
  CHECK(to_string(ms[0].F) == "#1 * #2");
  CHECK(to_string(ms[0].bound) == "2");
  CHECK(to_string(ms[0].base) == "1");

  CHECK(match_template(fac(), "facTU").empty());
}

TEST_CASE("template matches with a function parameter") {
  auto ms = match_template(funfac(), "u");
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].kind == TemplateKind::TailUp);
  CHECK(to_string(ms[0].F) == "h #1 * #2");
  REQUIRE(ms[0].synth);
  CHECK(ms[0].synth->params == std::vector<std::string>{"h"});
  CHECK(ms[0].synth->rhs == "h x1 * x2");
  ms = match_template(funfac(), "d");
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].kind == TemplateKind::TailDown);
  CHECK(to_string(ms[0].F) == "#1 * h #2");
  CHECK(ms[0].synth->rhs == "x1 * h x2");
}

TEST_CASE("synthesized names are content addressed") {
  auto a = match_template(fac(), "U")[0];
  Program q = parse_program(
      "fun V :: Int -> Int -> Int; rule V j n -> n [j > n - 1]; rule V j n -> j * V (j + 1) n [j <= n - 1];");
  auto b = match_template(q, "V")[0];
  CHECK(a.synth->name == b.synth->name);
  CHECK(a.synth->name != match_template(funfac(), "u")[0].synth->name);
}

TEST_CASE("property: reconstruction reproduces the normalized rules") {
  for (const auto* p : {&fac(), &funfac()})
    for (const auto& sym : {"u", "d", "U", "facRD"}) {
      if (!p->find_symbol(sym)) continue;
      for (const auto& m : match_template(*p, sym)) {
        auto rebuilt = reconstruct_rules(m);
        REQUIRE(rebuilt.size() == 2);
        for (int i = 0; i < 2; ++i) {
          INFO(sym << ": " << rule_str(rebuilt[i]) << " vs " << rule_str(m.rules[i]));
          CHECK(equal_modulo_theory(rebuilt[i].lhs, m.rules[i].lhs, mk_bool(true)));
          CHECK(equal_modulo_theory(rebuilt[i].rhs, m.rules[i].rhs, mk_bool(true)));
          CHECK(equal_modulo_theory(rebuilt[i].constraint, m.rules[i].constraint, mk_bool(true)));
        }
      }
    }
}

TEST_CASE("template-recursor lemmas replay without ordering requirements") {
  Kernel k = session(fac());
  std::vector<std::string> eqs;
  for (const auto& sym : {"u", "d", "U", "facRD"}) {
    auto m = match_template(k.program(), sym)[0];
    TemplateLemma tl = emit_template_recursor_lemma(m, k.program());
    eqs.push_back(tl.equation);
    std::size_t before = k.state().requirements.size();
    CHECK_NOTHROW(prove_template_lemma(k, m));
    CHECK(k.state().requirements.size() == before);
  }
  CHECK(eqs[0] == "u x i a ~ tailup [*] i x a");
  CHECK(eqs[1] == "d x a ~ taildn [*] 1 x a");
  CHECK(eqs[3] == "facRD x ~ recdn [*] 2 x 1");
  CHECK(eqs[2].rfind("U i x ~ recup F_", 0) == 0);
  CHECK(k.verdict() == ProofVerdict::Proved);
}

TEST_CASE("template-recursor lemmas with a function parameter") {
  Kernel k = session(funfac());
  for (const auto& sym : {"u", "d"}) {
    auto m = match_template(k.program(), sym)[0];
    INFO(emit_template_recursor_lemma(m, k.program()).equation);
    CHECK_NOTHROW(prove_template_lemma(k, m));
  }
  CHECK(k.state().requirements.empty());
}

TEST_CASE("bank shape") {
  CHECK(lemma_bank().size() == 6);
  int conditional = 0;
  for (const auto& e : lemma_bank()) {
    if (e.holes) {
      ++conditional;
      CHECK(e.axioms.size() == 2);
      CHECK(e.requirements.size() == 2);
    } else {
      CHECK(e.axioms.empty());
      CHECK(e.requirements.size() == 1);
    }
  }
  CHECK(conditional == 4);
  CHECK(find_lemma("tailup-taildn")->axioms[0] == "#1 x (#2 y z) ~ #2 (#1 x y) z");
}

TEST_CASE("unconditional bank entries replay") {
  for (const char* id : {"tailup-recdn", "taildn-recup"}) {
    Kernel k = session(fac());
    INFO(id);
    std::string h;
    try {
      h = prove_bank_entry(k, *find_lemma(id), {});
    } catch (const std::exception& e) {
      FAIL(std::string(e.what()));
    }
    CHECK(k.verdict() == ProofVerdict::Proved);
    CHECK(k.state().requirements.size() == 1);
    auto il = instantiate_lemma(*find_lemma(id), k.program(), {});
    CHECK(discharge(il.requirements, k.ordering()).empty());
  }
}

TEST_CASE("conditional bank entries replay with multiplication") {
  for (const auto& e : lemma_bank()) {
    if (!e.holes) continue;
    Kernel k = session(fac());
    INFO(e.id);
    Term times = theory_op("*");
    CHECK(discharge_axioms(e, {times, times}, k.program()).status == AxiomCheck::Pass);
    try {
      prove_bank_entry(k, e, {times, times});
    } catch (const std::exception& ex) {
      FAIL(std::string(ex.what()));
    }
    CHECK(k.verdict() == ProofVerdict::Proved);
    auto il = instantiate_lemma(e, k.program(), {times, times});
    CHECK(discharge(il.requirements, k.ordering()).empty());
    for (const auto& [i, r] : k.state().requirements) CHECK(k.ordering().satisfied(r));
  }
}

TEST_CASE("conditional bank entries replay with synthesized context symbols") {
  Kernel k0 = session(funfac());
  auto mu = match_template(k0.program(), "u")[0];
  auto md = match_template(k0.program(), "d")[0];
  for (const auto& e : lemma_bank()) {
    if (!e.holes) continue;
    Kernel k = k0;
    INFO(e.id);
    Term f = synth_fn(k, mu), g = synth_fn(k, md);
    if (discharge_axioms(e, {f, g}, k.program()).status != AxiomCheck::Pass) continue;
    try {
      prove_bank_entry(k, e, {f, g});
    } catch (const std::exception& ex) {
      FAIL(std::string(ex.what()));
    }
    CHECK(k.verdict() == ProofVerdict::Proved);
  }
}

TEST_CASE("axiom discharge") {
  Kernel k = session(funfac());
  auto mu = match_template(k.program(), "u")[0];
  auto md = match_template(k.program(), "d")[0];
  Term f = synth_fn(k, mu), g = synth_fn(k, md);
  CHECK(discharge_axioms(*find_lemma("tailup-taildn"), {f, g}, k.program()).status == AxiomCheck::Pass);
  Term minus = theory_op("-");
  AxiomCheck c = discharge_axioms(*find_lemma("tailup-taildn"), {minus, minus}, k.program());
  CHECK(c.status == AxiomCheck::Fail);
  CHECK(c.failed == 0);
  c = discharge_axioms(*find_lemma("taildn-recdn"), {minus, minus}, k.program());
  CHECK(c.status == AxiomCheck::Fail);
  CHECK(!c.witness.empty());
  for (const auto& e : lemma_bank()) {
    if (!e.holes) continue;
    for (const char* op : {"*", "+"})
      CHECK(discharge_axioms(e, {theory_op(op), theory_op(op)}, k.program()).status == AxiomCheck::Pass);
  }
}
