#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lcstrs/program.hpp"
#include "lcstrs/solver.hpp"

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

std::string error_of(const std::string& text) {
  try {
    parse_program(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

// Drops the k-th "rule" line of a program text.
std::string drop_rule(const std::string& text, int k) {
  std::istringstream in(text);
  std::string line, out;
  int seen = 0;
  while (std::getline(in, line)) {
    if (line.rfind("rule ", 0) == 0 && seen++ == k) continue;
    out += line + "\n";
  }
  return out;
}

}  // namespace

TEST_CASE("factorial corpus parses") {
  Program p = parse_program(slurp("corpus/factorial.lcstrs"));
  CHECK(p.rules.size() == 11);
  CHECK(p.goals.size() == 4);
  CHECK(p.precedences.size() == 1);
  CHECK(p.arity("u") == 3);
  CHECK(p.arity("facRD") == 1);
  CHECK(p.arity("*") == 2);
  CHECK(rule_str(*p.rule_by_label("facRD:1")) == "facRD x -> x * facRD (x - 1) [x > 1]");
  CHECK(equation_str(p.goals[0]) == "facTU x ~ facRD x [x >= 1]");
}

TEST_CASE("constructor arity is infinite") {
  Program p = parse_program(slurp("corpus/add.lcstrs"));
  CHECK(p.arity("add") == 2);
  CHECK_FALSE(p.arity("s"));
  CHECK_FALSE(p.arity("0"));
  // The declared Nat zero shadows the integer literal.
  CHECK(type_str(p.symbol("0")->type) == "Nat");
}

TEST_CASE("well-formedness errors") {
  CHECK(error_of("fun f :: Int -> Int; rule f x -> y;").find("occur neither") != std::string::npos);
  CHECK(error_of("fun f :: Int -> Int; rule f x -> x; rule f -> f;").find("arity") != std::string::npos);
  CHECK(error_of("fun f :: Int -> Int; rule f x -> true;").find("type") != std::string::npos);
  CHECK(error_of("fun f :: Int -> Int; rule f x -> x [y = y];").find("y::Int") != std::string::npos);
  CHECK(error_of("fun f :: Int -> Int; rule f x -> x [y::Int = y];").empty());
  CHECK(error_of("fun f :: Int -> Int; rule F x -> x;").find("unknown symbol") != std::string::npos);
  CHECK(error_of("fun f :: Int -> Int; rule f #1 -> 1;") != "");
  CHECK(error_of("fun f :: Int -> Int; rule f x -> x") != "");
  std::string e = error_of("fun f :: Int -> Int;\nrule f x -> 0 0;");
  CHECK(e.rfind("2:", 0) == 0);
}

TEST_CASE("prefix operators and unary minus") {
  Program p = parse_program(
      "fun tailup :: (Int -> Int -> Int) -> Int -> Int -> Int -> Int;\n"
      "fun g :: Int -> Int;");
  std::map<std::string, Type> vars;
  Term t = parse_term("tailup [*] 1 x 1", p, vars);
  CHECK(to_string(t) == "tailup [*] 1 x 1");
  CHECK(type_str(vars.at("x")) == "Int");
  CHECK(to_string(parse_term("g (-3)", p, vars)) == "g (-3)");
  CHECK(to_string(parse_term("-x + 1", p, vars)) == "0 - x + 1");
  CHECK(to_string(parse_term("x + y * z", p, vars)) == "x + y * z");
  CHECK(to_string(parse_term("(x + y) * z", p, vars)) == "(x + y) * z");
  Term hole_term = parse_term("#1 x (#2 y z)", p, vars, true, true);
  CHECK(hole_count(hole_term) == 2);
  CHECK_THROWS_AS(parse_term("#1", p, vars), ParseError);
  CHECK_THROWS_AS(parse_term("q", p, vars, false), ParseError);
}

TEST_CASE("print and reparse round trip") {
  for (const char* f : {"corpus/factorial.lcstrs", "corpus/funfac.lcstrs", "corpus/add.lcstrs"}) {
    Program p = parse_program(slurp(f));
    std::string once = print_program(p);
    Program q = parse_program(once);
    CHECK(print_program(q) == once);
    REQUIRE(q.rules.size() == p.rules.size());
    for (std::size_t i = 0; i < p.rules.size(); ++i) {
      CHECK(term_eq(p.rules[i].lhs, q.rules[i].lhs));
      CHECK(term_eq(p.rules[i].rhs, q.rules[i].rhs));
      CHECK(term_eq(p.rules[i].constraint, q.rules[i].constraint));
    }
  }
}

TEST_CASE("calculation rules") {
  auto rs = synth_calc_rules();
  CHECK(rs.size() == 14);
  bool saw = false;
  for (const auto& r : rs) {
    if (rule_str(r) == "x1 * x2 -> y [y = x1 * x2]") saw = true;
    CHECK(r.label == "calc");
    CHECK(is_var(r.rhs));
  }
  CHECK(saw);
}

TEST_CASE("quasi-reductivity of the corpus") {
  for (const char* f : {"corpus/factorial.lcstrs", "corpus/funfac.lcstrs", "corpus/add.lcstrs"}) {
    Program p = parse_program(slurp(f));
    auto rep = check_quasi_reductivity(p);
    INFO(f << "\n" << rep.str());
    CHECK(rep.status == CoverageEntry::Pass);
  }
}

TEST_CASE("quasi-reductivity reports the uncovered region") {
  std::string text = slurp("corpus/factorial.lcstrs");
  Program p = parse_program(drop_rule(text, 1));  // u x i a -> a [i > x]
  auto rep = check_quasi_reductivity(p);
  REQUIRE(rep.status == CoverageEntry::Fail);
  const CoverageEntry* u = nullptr;
  for (const auto& e : rep.entries)
    if (e.symbol == "u") u = &e;
  REQUIRE(u);
  CHECK(u->status == CoverageEntry::Fail);
  CHECK(u->uncovered == "i > x");

  Program q = parse_program(drop_rule(slurp("corpus/add.lcstrs"), 1));
  auto rq = check_quasi_reductivity(q);
  REQUIRE(rq.status == CoverageEntry::Fail);
  CHECK(rq.entries[0].uncovered == "add (s _) _");
}
