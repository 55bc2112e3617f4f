#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lcstrs/rewriter.hpp"
#include "lcstrs/solver.hpp"
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

const Program& fac() {
  static const Program p = parse_program(slurp("corpus/factorial.lcstrs"));
  return p;
}

Term T(const std::string& s, const Program& p = fac()) {
  std::map<std::string, Type> vars;
  return parse_term(s, p, vars);
}

Int factorial(int n) {
  Int r = 1;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

}  // namespace

TEST_CASE("single ground steps") {
  auto s = reduce_ground_once(T("facRD 2"), fac());
  REQUIRE(s);
  CHECK(to_string(s->result) == "2 * facRD (2 - 1)");
  CHECK(s->label == "facRD:1");
  Program add = parse_program(slurp("corpus/add.lcstrs"));
  auto a = reduce_ground_once(T("add (s 0) (s 0)", add), add);
  REQUIRE(a);
  CHECK(to_string(a->result) == "s (add 0 (s 0))");
  CHECK_FALSE(reduce_ground_once(mk_int(42), fac()));
}

TEST_CASE("innermost order") {
  auto s = reduce_ground_once(T("2 * facRD (2 - 1)"), fac());
  REQUIRE(s);
  CHECK(to_string(s->result) == "2 * facRD 1");
  CHECK(s->label == "calc");
  CHECK(s->pos == Position{1, 0});
}

TEST_CASE("normal forms agree with factorial") {
  auto r = normalize(T("facRD 2"), fac());
  CHECK(to_string(r.term) == "2");
  CHECK(r.steps == 4);
  for (int n = 1; n <= 8; ++n)
    for (const char* f : {"facTU", "facTD", "facRU", "facRD"}) {
      auto nf = normalize(mk_app(fac().symbol(f), mk_int(n)), fac());
      CHECK_FALSE(nf.exhausted);
      REQUIRE(is_int_lit(nf.term));
      CHECK(int_value(nf.term) == factorial(n));
    }
}

TEST_CASE("fuel and joinability") {
  Program loop = parse_program("fun f :: Int -> Int; rule f x -> f (x + 1);");
  auto r = normalize(T("f 0", loop), loop, 50);
  CHECK(r.exhausted);
  CHECK(joinable(T("facTU 4"), T("facRD 4"), fac()) == Joinable::Yes);
  CHECK(joinable(T("facTU 0"), T("facRD 0"), fac()) == Joinable::Yes);
  CHECK(joinable(T("facRD 3"), mk_int(7), fac()) == Joinable::No);
  CHECK(joinable(T("f 0", loop), mk_int(0), loop, 100) == Joinable::FuelExhausted);
}

TEST_CASE("determinism") {
  Term t = T("facTD 6");
  CHECK(term_eq(normalize(t, fac()).term, normalize(t, fac()).term));
}

TEST_CASE("symbolic steps") {
  std::map<std::string, Type> vars;
  Term s = parse_term("facRD z", fac(), vars);
  Term phi = parse_term("z >= 10", fac(), vars);
  auto r = constrained_rewrite(s, phi, *fac().rule_by_label("facRD:1"), {}, {});
  REQUIRE(r);
  CHECK(to_string(r->term) == "z * facRD (z - 1)");
  CHECK(term_eq(r->constraint, phi));
  RewriteRefusal why;
  CHECK_FALSE(constrained_rewrite(s, phi, *fac().rule_by_label("facRD:0"), {}, {}, &why));
  CHECK(why.reason.find("entailment") != std::string::npos);

  auto c = abstract_calc(r->term, phi, {1, 0}, {});
  REQUIRE(c);
  CHECK(to_string(c->term) == "z * facRD z'");
  CHECK(to_string(c->constraint) == "z >= 10 /\\ z' = z - 1");
  CHECK(c->defs.size() == 1);

  // Ground theory subterms are evaluated in place.
  Term g = parse_term("facRD (2 - 1)", fac(), vars);
  auto e = abstract_calc(g, phi, {0}, {});
  REQUIRE(e);
  CHECK(to_string(e->term) == "facRD 1");
}

TEST_CASE("rule variables bound to theory terms are defined") {
  std::map<std::string, Type> vars;
  Term s = parse_term("u x (i + 1) a", fac(), vars);
  Term phi = parse_term("i + 1 > x", fac(), vars);
  auto r = constrained_rewrite(s, phi, *fac().rule_by_label("u:0"), {}, {});
  REQUIRE(r);
  CHECK(to_string(r->term) == "a");
  CHECK(r->defs.size() == 1);
}

TEST_CASE("enumeration is outermost first") {
  std::map<std::string, Type> vars;
  Term s = parse_term("facRD (facRD z)", fac(), vars);
  Term phi = parse_term("z >= 10", fac(), vars);
  auto rs = enumerate_rewrites(s, phi, fac(), {});
  REQUIRE_FALSE(rs.empty());
  // The inner redex is the only one with a decided guard.
  CHECK(rs[0].pos == Position{0});
}

TEST_CASE("property: symbolic steps are sound on ground instances") {
  // For sampled respecting groundings, the instance of the input reduces
  // to the instance of the output.
  std::mt19937 rng(5);
  std::map<std::string, Type> vars;
  struct Case {
    const char* term;
    const char* phi;
    const char* label;
  } cases[] = {{"facRD z", "z >= 10", "facRD:1"},
               {"u x i a", "i <= x", "u:1"},
               {"u x i a", "i > x", "u:0"},
               {"d x a", "x > 0", "d:1"},
               {"U i x", "i <= x - 1", "U:1"}};
  for (const auto& c : cases) {
    Term s = parse_term(c.term, fac(), vars);
    Term phi = parse_term(c.phi, fac(), vars);
    auto r = constrained_rewrite(s, phi, *fac().rule_by_label(c.label), {}, {});
    REQUIRE(r);
    int hits = 0;
    for (int k = 0; k < 2000 && hits < 100; ++k) {
      std::map<std::string, Value> env;
      Subst g;
      for (const auto& v : vars_of(s)) {
        Int val = std::uniform_int_distribution<int>(-20, 20)(rng);
        env[v->name] = Value::of_int(val);
        g[v->name] = mk_int(val);
      }
      if (!eval_under(phi, env).b) continue;
      for (const auto& [n, e] : r->defs) g[n] = eval_under(e, env).to_term();
      ++hits;
      Term target = apply_subst(r->term, g);
      Term cur = apply_subst(s, g);
      bool reached = false;
      for (int step = 0; step < 4 && !reached; ++step) {
        auto next = reduce_ground_once(cur, fac());
        if (!next) break;
        cur = next->result;
        reached = term_eq(cur, target);
      }
      CHECK(reached);
    }
    CHECK(hits == 100);
  }
}
