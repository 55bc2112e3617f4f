#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lcstrs/term.hpp"

#include <random>

using namespace lcstrs;

namespace {

Type I() { return int_type(); }
Term x() { return mk_var("x", I()); }
Term y() { return mk_var("y", I()); }
Term fn(const std::string& n, int k) {
  std::vector<Type> as(k, I());
  return mk_sym(n, arrows(as, I()));
}

// Random terms over a small first-order signature f/2, g/1, c/0 and vars.
Term random_term(std::mt19937& rng, int depth, bool ground) {
  std::uniform_int_distribution<int> pick(0, ground ? 2 : 3);
  int k = depth <= 0 ? (ground ? 2 : 3) : pick(rng);
  switch (k) {
    case 0:
      return mk_apps(fn("f", 2), {random_term(rng, depth - 1, ground), random_term(rng, depth - 1, ground)});
    case 1:
      return mk_app(fn("g", 1), random_term(rng, depth - 1, ground));
    case 2:
      return mk_sym("c", I());
    default:
      return std::uniform_int_distribution<int>(0, 1)(rng) ? x() : y();
  }
}

}  // namespace

TEST_CASE("typing of applications") {
  Type nat = sort_type("Nat");
  Term add = mk_sym("add", arrows({nat, nat}, nat));
  Term zero = mk_sym("0", nat);
  Term t = mk_apps(add, {zero, mk_var("y", nat)});
  CHECK(type_str(t->type) == "Nat");
  CHECK(type_str(x()->type) == "Int");
  CHECK_THROWS_AS(mk_app(mk_int(0), mk_int(0)), TermError);
  CHECK_THROWS_AS(mk_app(add, mk_int(1)), TermError);
}

TEST_CASE("type printing is right associative") {
  Type t = arrows({arrow(I(), I()), I()}, I());
  CHECK(type_str(t) == "(Int -> Int) -> Int -> Int");
  CHECK(arg_types(t).size() == 2);
  CHECK(type_str(result_type(t)) == "Int");
  CHECK(is_theory_type(t));
  CHECK_FALSE(is_theory_type(arrow(sort_type("Nat"), I())));
}

TEST_CASE("matching examples") {
  Term u = fn("u", 3);
  Term i = mk_var("i", I()), a = mk_var("a", I());
  auto g = match_term(mk_apps(u, {x(), i, a}), mk_apps(u, {x(), mk_int(2), mk_int(1)}));
  REQUIRE(g);
  CHECK(to_string(g->at("i")) == "2");
  CHECK(to_string(g->at("a")) == "1");
  CHECK(to_string(g->at("x")) == "x");

  Type b = arrows({I(), I()}, I());
  Term tailup = mk_sym("tailup", arrows({b, I(), I(), I()}, I()));
  Term f = mk_var("f", b), z = mk_var("z", I()), w = mk_var("w", I());
  auto g2 = match_term(mk_apps(tailup, {f, x(), y(), z}),
                       mk_apps(tailup, {theory_op("*"), mk_int(2), w, mk_int(1)}));
  REQUIRE(g2);
  CHECK(to_string(g2->at("f")) == "[*]");
  CHECK(to_string(g2->at("x")) == "2");
  CHECK(to_string(g2->at("y")) == "w");

  Term fa = mk_apps(fn("f", 2), {a, a});
  CHECK_FALSE(match_term(fa, mk_apps(fn("g", 2), {mk_var("b", I()), mk_var("c", I())})));
  CHECK_FALSE(match_term(fa, mk_apps(fn("f", 2), {mk_int(1), mk_int(2)})));
}

TEST_CASE("substitution examples") {
  Term t = mk_bin("+", x(), mk_int(3));
  CHECK(to_string(apply_subst(t, {{"x", mk_int(2)}})) == "2 + 3");
  Term fac = mk_app(fn("facTU", 1), x());
  CHECK(to_string(apply_subst(fac, {{"x", mk_int(4)}})) == "facTU 4");
  Term gr = mk_app(fn("g", 1), mk_int(5));
  CHECK(term_eq(apply_subst(gr, {{"x", mk_int(4)}}), gr));
}

TEST_CASE("fill context functions") {
  Term F = mk_bin("*", hole(1, I()), hole(2, I()));
  Term i = mk_var("i", I()), a = mk_var("a", I());
  CHECK(to_string(fill(F, {i, a})) == "i * a");
  Term h = mk_var("h", arrow(I(), I()));
  Term G = mk_bin("*", mk_app(h, hole(1, I())), hole(2, I()));
  CHECK(to_string(fill(G, {i, a})) == "h i * a");
  Term plain = mk_bin("+", x(), mk_int(1));
  CHECK(term_eq(fill(plain, {}), plain));
  CHECK_THROWS_AS(fill(F, {i}), TermError);
  CHECK_THROWS_AS(fill(F, {i, mk_bool(true)}), TermError);
}

TEST_CASE("positions and replacement") {
  Term facRD = fn("facRD", 1);
  Term z1 = mk_var("z'", I());
  Term t = mk_bin("*", mk_var("z", I()), mk_app(facRD, z1));
  CHECK(to_string(*subterm_at(t, {1})) == "facRD z'");
  CHECK(term_eq(replace_at(t, {}, x()), x()));
  Term r = replace_at(t, {1, 0}, mk_int(7));
  CHECK(to_string(r) == "z * facRD 7");
  CHECK(to_string(*subterm_at(r, {1, 0})) == "7");
  CHECK_FALSE(subterm_at(t, {2}));
  CHECK_THROWS_AS(replace_at(t, {1}, mk_bool(true)), TermError);
  CHECK(positions(t).size() == 4);
}

TEST_CASE("classification") {
  auto ar = [](const std::string& s) -> std::optional<int> {
    if (s == "s") return std::nullopt;
    if (s == "*") return 2;
    return std::nullopt;
  };
  Term m = mk_bin("*", mk_int(7), mk_int(0));
  auto c = classify(m, ar);
  CHECK(c.ground);
  CHECK(c.theory);
  CHECK_FALSE(c.value);
  auto ct = classify(mk_bool(true), ar);
  CHECK(ct.ground);
  CHECK(ct.theory);
  CHECK(ct.value);
  Type nat = sort_type("Nat");
  Term s = mk_sym("s", arrow(nat, nat)), zero = mk_sym("0", nat);
  auto cs = classify(mk_app(s, mk_app(s, zero)), ar);
  CHECK(cs.ground);
  CHECK(cs.semi_constructor);
  CHECK_FALSE(cs.theory);
  CHECK_FALSE(cs.value);
  CHECK_FALSE(classify(m, ar).semi_constructor);
}

TEST_CASE("printing of theory terms") {
  Term t = mk_bin("-", x(), mk_bin("-", y(), mk_int(1)));
  CHECK(to_string(t) == "x - (y - 1)");
  CHECK(to_string(mk_bin("-", mk_bin("-", x(), y()), mk_int(1))) == "x - y - 1");
  CHECK(to_string(mk_bin("*", mk_bin("+", x(), y()), mk_int(-2))) == "(x + y) * (-2)");
  CHECK(to_string(mk_and({mk_bin("<=", x(), y()), mk_bool(true), mk_not(mk_bin("=", x(), y()))})) ==
        "x <= y /\\ not x = y");
  CHECK(to_string(mk_app(fn("g", 1), mk_int(-3))) == "g (-3)");
}

TEST_CASE("fresh names") {
  CHECK(fresh_name("x", {"x"}) == "x1");
  CHECK(fresh_name("x1", {"x", "x1"}) == "x2");
  CHECK(fresh_name("y'", {"y"}) == "y1");
  CHECK(fresh_name("#1", {}) == "v1");
}

TEST_CASE("property: matching round trip") {
  std::mt19937 rng(7);
  for (int k = 0; k < 500; ++k) {
    Term p = random_term(rng, 3, false);
    Subst g;
    for (const auto& v : vars_of(p)) g[v->name] = random_term(rng, 2, true);
    Term s = apply_subst(p, g);
    auto m = match_term(p, s);
    REQUIRE(m);
    CHECK(term_eq(apply_subst(p, *m), s));
    // Typing soundness.
    CHECK(type_eq(s->type, p->type));
  }
}

TEST_CASE("property: fill agrees with replace_at for contexts") {
  std::mt19937 rng(11);
  for (int k = 0; k < 300; ++k) {
    Term t = random_term(rng, 3, true);
    auto ps = positions(t);
    Position p = ps[std::uniform_int_distribution<std::size_t>(0, ps.size() - 1)(rng)];
    Term ctx = replace_at(t, p, hole(1, I()));
    Term s = random_term(rng, 2, true);
    CHECK(term_eq(fill(ctx, {s}), replace_at(t, p, s)));
    CHECK(term_eq(*subterm_at(replace_at(t, p, s), p), s));
  }
}
