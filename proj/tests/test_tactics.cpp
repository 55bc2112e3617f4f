#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lcstrs/kernel.hpp"
#include "lcstrs/templates.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

using namespace lcstrs;

namespace {

Program load(const std::string& rel) {
  std::ifstream in(std::string(LCSTRS_SOURCE_DIR) + "/" + rel);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

const Program& fac() {
  static const Program p = load("corpus/factorial.lcstrs");
  return p;
}

Equation E(const std::string& s, const Program& p) {
  std::map<std::string, Type> vars;
  return parse_equation(s, p, vars);
}

// Proves the goal and samples ground instances of it.
void proved_and_sound(const Program& p, const Equation& goal, const AutoOptions& opt, const std::string& strategy) {
  AutoResult r = auto_prove(p, goal, opt);
  std::string log;
  for (const auto& l : r.log) log += l + "\n";
  INFO(equation_str(goal) << "\n" << log);
  REQUIRE(r.verdict == ProofVerdict::Proved);
  CHECK(r.strategy == strategy);
  CHECK(r.kernel->bound_violations().empty());
  for (const auto& [i, req] : r.kernel->state().requirements) CHECK(r.kernel->ordering().satisfied(req));
  // The trace replays from scratch.
  ReplayResult rr = replay_trace(r.kernel->trace_json(print_program(p)), print_program(p));
  CHECK(rr.kernel->verdict() == ProofVerdict::Proved);
  SoundnessReport s = sample_soundness(goal, r.kernel->program(), 50, 1, 20);
  CHECK(s.ok());
}

}  // namespace

TEST_CASE("expose_heads unfolds non-template roots") {
  Kernel k(fac(), fac().goals[0]);
  expose_heads(k, 0);
  CHECK(equation_str(k.find(0)->eq) == "u x 1 1 ~ facRD x [x >= 1]");
}

TEST_CASE("one-sided tactic residuals") {
  Kernel k(fac(), E("u x 2 1 ~ facRD x [x >= 1]", fac()));
  TacticResult r = tactic_one_sided(k, 0, "left");
  INFO(r.message);
  REQUIRE(r.ok);
  CHECK(equation_str(k.find(0)->eq) == "recdn [*] 2 x 1 ~ facRD x [x >= 1]");

  Kernel k2(fac(), E("u x 2 1 ~ facRD x [x >= 1]", fac()));
  r = tactic_one_sided(k2, 0, "right");
  INFO(r.message);
  REQUIRE(r.ok);
  CHECK(equation_str(k2.find(0)->eq) == "u x 2 1 ~ tailup [*] 2 x 1 [x >= 1]");

  Kernel k3(fac(), E("d (x - 1) x ~ U 1 x [x >= 1]", fac()));
  r = tactic_one_sided(k3, 0, "right");
  INFO(r.message);
  REQUIRE(r.ok);
  std::string rhs = to_string(k3.find(0)->eq.rhs);
  CHECK(rhs.rfind("taildn F_", 0) == 0);
  CHECK(rhs.substr(rhs.size() - 11) == "1 (x - 1) x");
}

TEST_CASE("two-sided tactic aligns by unrolling") {
  Kernel k(fac(), fac().goals[0]);
  TacticResult r = tactic_two_sided(k, 0);
  INFO(r.message);
  CHECK(r.ok);
  CHECK(k.verdict() == ProofVerdict::Proved);
}

TEST_CASE("two-sided tactic reports bridging lemmas") {
  Kernel k(fac(), fac().goals[1]);
  TacticResult r = tactic_two_sided(k, 0, false);
  CHECK_FALSE(r.ok);
  CHECK(r.message == "bridge-needed");
  REQUIRE(r.bridges.size() == 2);
  CHECK(r.bridges[0].rfind("taildn [*] i y a ~ taildn F_", 0) == 0);
  CHECK(r.bridges[1].rfind("recup [*] i y a ~ recup F_", 0) == 0);
  // Reporting leaves the session untouched.
  CHECK(k.trace().empty());

  r = tactic_two_sided(k, 0, true);
  INFO(r.message);
  CHECK(r.ok);
  CHECK(k.verdict() == ProofVerdict::Proved);
}

TEST_CASE("factorial goals") {
  AutoOptions opt;
  proved_and_sound(fac(), fac().goals[0], opt, "two-sided");
  proved_and_sound(fac(), fac().goals[1], opt, "two-sided");
  proved_and_sound(fac(), fac().goals[2], opt, "two-sided");
  opt.proved = {{"goal1", fac().goals[0]}, {"goal2", fac().goals[1]}, {"goal3", fac().goals[2]}};
  proved_and_sound(fac(), fac().goals[3], opt, "chain");
}

TEST_CASE("the downward pair needs the earlier results") {
  AutoResult r = auto_prove(fac(), fac().goals[3]);
  CHECK(r.verdict == ProofVerdict::Open);
}

TEST_CASE("function-parameter factorial") {
  Program p = load("corpus/funfac.lcstrs");
  proved_and_sound(p, p.goals[0], {}, "two-sided");
}

TEST_CASE("constructor goal by search") {
  Program p = load("corpus/add.lcstrs");
  proved_and_sound(p, p.goals[0], {}, "search");
}

TEST_CASE("unconstrained factorial goal is recorded, not asserted") {
  // Both sides are 1 for x <= 0, so the equation holds; whether the
  // tactics find a proof is reported only.
  AutoResult r = auto_prove(fac(), E("facTU x ~ facRD x", fac()));
  MESSAGE("facTU x ~ facRD x [true]: " << std::string(proof_verdict_str(r.verdict)) << " " << r.strategy);
  if (r.verdict == ProofVerdict::Proved) CHECK(sample_soundness(E("facTU x ~ facRD x", fac()), fac(), 50, -5, 20).ok());
}

TEST_CASE("search respects its budget") {
  Program p = load("corpus/add.lcstrs");
  Kernel k(p, E("add x y ~ add y x", p));
  long budget = 50;
  auto t0 = std::chrono::steady_clock::now();
  CHECK_FALSE(generic_search(k, 7, budget));
  CHECK(budget <= 0);
  CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(10));
  CHECK(k.trace().empty());
}
