#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lcstrs/horpo.hpp"
#include "lcstrs/rewriter.hpp"
#include "lcstrs/templates.hpp"
#include "lcstrs/theory.hpp"

#include <fstream>
#include <random>
#include <sstream>

using namespace lcstrs;

namespace {

std::string slurp(const std::string& rel) {
  std::ifstream in(std::string(LCSTRS_SOURCE_DIR) + "/" + rel);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Program with_rec(const std::string& text) {
  Program p = parse_program(text);
  install_recursors(p);
  return p;
}

// Parses "l > r [phi]" with holes filled by `fill_with` (or left as holes).
OrderingRequirement req(const Program& p, const std::string& l, const std::string& r, const std::string& phi,
                        const Term& fill_with = nullptr) {
  std::map<std::string, Type> vars;
  Term a = parse_term(l, p, vars, true, true);
  Term b = parse_term(r, p, vars, true, true, a->type);
  Term c = parse_term(phi, p, vars, true, false, bool_type());
  if (fill_with) {
    a = fill(a, {fill_with, fill_with});
    b = fill(b, {fill_with, fill_with});
  }
  return OrderingRequirement{a, b, c, true, ""};
}

}  // namespace

TEST_CASE("recursor rules orient with the default precedence") {
  Program p = with_rec("");
  Ordering ord = Ordering::for_program(p);
  auto rep = orient_rules(p, ord);
  CHECK(rep.ok);
  CHECK(rep.measures.at("tailup") == "max(-i + y + 1, 0)");
  CHECK(rep.measures.at("taildn") == "max(-x + i + 1, 0)");
  CHECK(orient_rules(synth_calc_rules(), ord).ok);
}

TEST_CASE("factorial systems orient") {
  Program p = with_rec(slurp("corpus/factorial.lcstrs"));
  Ordering ord = Ordering::for_program(p);
  auto rep = orient_rules(p, ord);
  CHECK(rep.ok);
  CHECK(rep.measures.at("u") == "max(x - i + 1, 0)");
  CHECK(ord.precedence().greater(p.symbol("facTU"), p.symbol("u")));
  CHECK(ord.precedence().greater(p.symbol("facRU"), p.symbol("facTU")));
  CHECK(ord.precedence().greater(p.symbol("u"), p.symbol("tailup")));
  CHECK(ord.precedence().greater(p.symbol("tailup"), p.symbol("recdn")));
  CHECK_FALSE(ord.precedence().greater(p.symbol("facRD"), p.symbol("facTU")));
  Program f = with_rec(slurp("corpus/funfac.lcstrs"));
  CHECK(orient_rules(f, Ordering::for_program(f)).ok);
}

TEST_CASE("unbounded recursion does not orient") {
  Program p = parse_program("fun f :: Int -> Int; rule f x -> f (x + 1);");
  auto rep = orient_rules(p, Ordering::for_program(p));
  CHECK_FALSE(rep.ok);
  CHECK(rep.failed.at(0) == "f:0");
}

TEST_CASE("cyclic directives are rejected") {
  Program p = parse_program("fun f :: Int -> Int; fun g :: Int -> Int; rule f x -> g x; rule g x -> x; prec g > f;");
  CHECK_THROWS_AS(Ordering::for_program(p), TermError);
}

TEST_CASE("basic clauses") {
  Program p = with_rec(slurp("corpus/add.lcstrs"));
  Ordering ord = Ordering::for_program(p);
  std::map<std::string, Type> vars;
  Term t = parse_term("t", p, vars, true, false, sort_type("Nat"));
  Term st = parse_term("s t", p, vars);
  CHECK(ord.compare(st, t, mk_bool(true)) == Cmp::GT);
  CHECK(ord.compare(t, st, mk_bool(true)) == Cmp::Unknown);
  CHECK(ord.compare(t, t, mk_bool(true)) == Cmp::GEQ);
  // Calculations are bigger than their results.
  Term e = parse_term("x + 1", p, vars);
  CHECK(ord.compare(e, parse_term("y", p, vars, true, false, int_type()), mk_bool(true)) == Cmp::GT);
}

TEST_CASE("unconditional recursor equivalence requirements") {
  Program p = with_rec("");
  Ordering ord = Ordering::for_program(p);
  auto r1 = req(p, "tailup f x y z", "recdn f x' y (f x z)", "x <= y /\\ x' = x + 1");
  auto r2 = req(p, "taildn f x y z", "recup f x y' (f z y)", "x <= y /\\ y' = y - 1");
  CHECK(discharge({r1, r2}, ord).empty());
}

TEST_CASE("conditional recursor equivalence requirements with multiplication") {
  Program p = with_rec("");
  Ordering ord = Ordering::for_program(p);
  Term times = theory_op("*");
  std::vector<OrderingRequirement> rs = {
      req(p, "tailup #1 x y a", "taildn #2 x1 y (#1 x a)", "x <= y /\\ x1 = x + 1 /\\ y1 = y - 1", times),
      req(p, "taildn #2 x1 y (#1 x a)", "taildn #2 x1 y1 (#1 x (#2 a y))",
          "x <= y /\\ x1 = x + 1 /\\ y1 = y - 1 /\\ x1 <= y", times),
      req(p, "taildn #2 x y a", "recdn #1 x y1 (#2 a y)", "x <= y /\\ y1 = y - 1", times),
      req(p, "recdn #1 x y1 (#2 a y)", "#1 y1 (#1 y (recdn #1 x y2 a))", "x <= y /\\ x <= y1 /\\ y2 = y1 - 1",
          times),
      req(p, "tailup #2 x y a", "recup #1 x1 y (#2 x a)", "x <= y /\\ x1 = x + 1", times),
      req(p, "recup #1 x1 y (#2 x a)", "#1 (#1 (recup #1 x2 y a) x) x1", "x <= y /\\ x1 <= y /\\ x2 = x1 + 1",
          times),
      req(p, "recup #1 x y a", "#1 (recdn #2 x1 y a) x", "x <= y /\\ x1 = x + 1", times),
      req(p, "#2 y (recdn #2 x y1 a)", "#2 y (#1 (recdn #2 x1 y1 a) x)",
          "x <= y /\\ x1 = x + 1 /\\ y1 = y - 1 /\\ x1 <= y", times),
  };
  auto bad = discharge(rs, ord);
  for (const auto& b : bad) INFO(requirement_str(b));
  CHECK(bad.empty());
}

TEST_CASE("conditional requirement fails for a recursor-headed context") {
  Program p = with_rec("");
  Ordering ord = Ordering::for_program(p);
  std::map<std::string, Type> vars;
  Term ctx = parse_term("tailup [*] 0", p, vars);
  auto r = req(p, "tailup #1 x y a", "taildn #2 x1 y (#1 x a)", "x <= y /\\ x1 = x + 1 /\\ y1 = y - 1");
  r.left = fill(r.left, {ctx, theory_op("*")});
  r.right = fill(r.right, {ctx, theory_op("*")});
  CHECK_FALSE(ord.satisfied(r));
}

TEST_CASE("user symbols dominate recursor forms") {
  Program p = with_rec(slurp("corpus/factorial.lcstrs"));
  Ordering ord = Ordering::for_program(p);
  std::map<std::string, Type> vars;
  Term s = parse_term("facTU x", p, vars);
  Term t = parse_term("tailup [*] 1 x 1", p, vars);
  CHECK(ord.compare(s, t, mk_bool(true)) == Cmp::GT);
  CHECK(ord.compare(parse_term("facRU x", p, vars), parse_term("facTD x", p, vars), mk_bool(true)) == Cmp::GT);
}

TEST_CASE("property: rule steps decrease and verdicts are stable under instances") {
  // For sampled respecting instances of each oriented rule, the ground
  // instance of the left side is still GT the instance of the right side.
  Program p = with_rec(slurp("corpus/factorial.lcstrs"));
  Ordering ord = Ordering::for_program(p);
  std::mt19937 rng(3);
  int checked = 0;
  for (const auto& r : p.rules) {
    for (int k = 0; k < 200; ++k) {
      std::map<std::string, Value> env;
      Subst g;
      for (const auto& v : vars_of(r.lhs)) {
        if (!is_base_type(v)) {
          g[v->name] = theory_op("*");
          continue;
        }
        Int val = std::uniform_int_distribution<int>(-6, 6)(rng);
        env[v->name] = Value::of_int(val);
        g[v->name] = mk_int(val);
      }
      for (const auto& v : vars_of(r.constraint))
        if (!env.count(v->name)) env[v->name] = Value::of_int(0);
      if (!eval_under(r.constraint, env).b) continue;
      ++checked;
      Term l = apply_subst(r.lhs, g), rr = apply_subst(r.rhs, g);
      CHECK(ord.compare(l, rr, mk_bool(true)) == Cmp::GT);
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("property: decreasing chains terminate") {
  // Repeatedly stepping to a GT-smaller reduct never cycles.
  Program p = with_rec(slurp("corpus/factorial.lcstrs"));
  Ordering ord = Ordering::for_program(p);
  std::map<std::string, Type> vars;
  for (const char* start : {"facTU 6", "facRU 6", "tailup [*] 1 6 1", "recdn [*] 1 6 1"}) {
    Term t = parse_term(start, p, vars);
    int steps = 0;
    while (auto s = reduce_ground_once(t, p)) {
      CHECK(ord.compare(t, s->result, mk_bool(true)) == Cmp::GT);
      t = s->result;
      REQUIRE(++steps < 10000);
    }
  }
}
