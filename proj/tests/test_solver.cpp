#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lia_suite.hpp"

#include "lcstrs/program.hpp"
#include "lcstrs/solver.hpp"
#include "lcstrs/theory.hpp"

using namespace lcstrs;

namespace {

Term C(const std::string& s) {
  static const Program empty;
  std::map<std::string, Type> vars;
  return parse_term(s, empty, vars, true, false, bool_type());
}

Term I(const std::string& s) {
  static const Program empty;
  std::map<std::string, Type> vars;
  return parse_term(s, empty, vars, true, false, int_type());
}

}  // namespace

TEST_CASE("ground evaluation") {
  CHECK(eval_ground(I("2 * (3 - 5)")).i == -4);
  CHECK(eval_ground(C("1 < 2 /\\ not (3 = 4)")).b);
  CHECK_THROWS_AS(eval_ground(I("x + 1")), TheoryError);
}

TEST_CASE("polynomial normal form") {
  CHECK(poly_normal_form(I("(x + 1) * (x - 1)")).str() == "x^2 - 1");
  CHECK(poly_normal_form(I("x * y - y * x")).str() == "0");
  CHECK(poly_normal_form(I("x * (y * z)")) == poly_normal_form(I("(x * y) * z")));
  CHECK_FALSE(poly_normal_form(I("x - y")) == poly_normal_form(I("y - x")));
  CHECK(poly_normal_form(I("3 * x + 2")).is_linear());
}

TEST_CASE("entailments from the factorial examples") {
  CHECK(entails(C("z >= 10"), C("z > 1")).verdict == Verdict::Yes);
  CHECK(entails(C("z >= 10"), C("z <= 1")).verdict == Verdict::No);
  CHECK(entails(C("y >= 2 /\\ z = y - 1"), C("z >= 1")).verdict == Verdict::Yes);
  CHECK(is_valid(C("i > y \\/ i <= y")).verdict == Verdict::Yes);
}

TEST_CASE("falsifying assignments are small and correct") {
  SolverResult r = is_valid(C("x > 0"));
  REQUIRE(r.verdict == Verdict::No);
  CHECK(r.model.at("x").i == 0);
  SolverResult s = is_satisfiable(C("x * y = 6 /\\ x > y /\\ y > 1"));
  REQUIRE(s.verdict == Verdict::Yes);
  CHECK(s.model.at("x").i * s.model.at("y").i == 6);
}

TEST_CASE("omega test core") {
  // 2x = 1 has no integer solution although it has a rational one.
  LinearConstraint c;
  c.coef["x"] = 2;
  c.c = -1;
  c.eq = true;
  CHECK(omega_feasible({c}, nullptr) == Feasibility::Unsat);
  // 2 <= 3x <= 4 is a thin strip with x = 1 inside.
  LinearConstraint lo, hi;
  lo.coef["x"] = 3;
  lo.c = -2;
  hi.coef["x"] = -3;
  hi.c = 4;
  std::map<std::string, Int> m;
  REQUIRE(omega_feasible({lo, hi}, &m) == Feasibility::Sat);
  CHECK(m.at("x") == 1);
  // 27 <= 11x + 13y <= 45 and -10 <= 7x - 9y <= 4: the real shadow is
  // nonempty, the integer set is empty (classic dark shadow example).
  auto mk = [](Int a, Int b, Int k) {
    LinearConstraint l;
    l.coef["x"] = a;
    l.coef["y"] = b;
    l.c = k;
    return l;
  };
  CHECK(omega_feasible({mk(11, 13, -27), mk(-11, -13, 45), mk(7, -9, 10), mk(-7, 9, 4)}, nullptr) ==
        Feasibility::Unsat);
}

TEST_CASE("smt-lib rendering") {
  std::string q = smtlib_query(C("x + 1 > x"));
  CHECK(q.find("(set-logic") != std::string::npos);
  CHECK(q.find("(declare-const |x| Int)") != std::string::npos);
  CHECK(q.find("(check-sat)") != std::string::npos);
  // Without a configured solver the round trip reports unknown.
  set_smt_solver("");
  CHECK(smt_roundtrip(C("x > 0")).verdict == Verdict::Unknown);
}

TEST_CASE("hand-written suite with sampling agreement") {
  auto cases = lia::load(std::string(LCSTRS_SOURCE_DIR) + "/tests/data/lia_cases.txt");
  CHECK(cases.size() == 200);
  std::mt19937 rng(2024);
  for (const auto& c : cases) {
    auto o = lia::run(c, rng);
    INFO("line " << c.line << ": " << c.text << " " << o.detail);
    CHECK(o.verdict_ok);
    CHECK(o.fuzz_ok);
  }
}
