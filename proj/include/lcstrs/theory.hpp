#pragma once

#include "lcstrs/term.hpp"

#include <map>
#include <string>
#include <vector>

namespace lcstrs {

struct TheoryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Semantic value of a base-type theory term.
struct Value {
  bool is_bool = false;
  Int i = 0;
  bool b = false;

  static Value of_int(Int v) { return Value{false, std::move(v), false}; }
  static Value of_bool(bool v) { return Value{true, 0, v}; }
  Term to_term() const { return is_bool ? mk_bool(b) : mk_int(i); }
  bool operator==(const Value& o) const { return is_bool == o.is_bool && (is_bool ? b == o.b : i == o.i); }
};

/// Interpretation of ground theory terms. Throws TheoryError on
/// non-theory symbols, variables, or arrow-typed roots.
Value eval_ground(const Term& t);

/// Evaluates a theory term under an assignment of its variables.
Value eval_under(const Term& t, const std::map<std::string, Value>& env);

/// Number of arguments a theory symbol consumes before it computes
/// (0 for values).
int theory_arity(const Term& sym);

/// A monomial is a sorted list of (atom, exponent); atoms are variable names
/// or, with opaque atoms enabled, printed non-arithmetic subterms in braces.
using Monomial = std::vector<std::pair<std::string, int>>;

struct Polynomial {
  std::map<Monomial, Int> terms;  // no zero coefficients
  std::map<std::string, Term> atoms;  // atom key -> term it stands for

  bool operator==(const Polynomial& o) const { return terms == o.terms; }
  bool is_constant() const;
  bool is_linear() const;
  Int constant() const;
  Int eval(const std::map<std::string, Int>& env) const;
  std::string str() const;
  Term to_term() const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  static Polynomial constant_poly(const Int& c);
  static Polynomial atom(const std::string& key, const Term& t);
};

/// Canonical polynomial of an integer term over + - * literals and
/// variables. With `opaque` set, any other Int subterm becomes an atom.
Polynomial poly_normal_form(const Term& t, bool opaque = false);

/// Negation pushed through the boolean structure: comparisons are flipped,
/// conjunctions and disjunctions use De Morgan.
Term negate(const Term& phi);

/// Top-level conjuncts of a constraint (true yields none).
std::vector<Term> conjuncts(const Term& phi);

bool is_constraint(const Term& phi);

}  // namespace lcstrs
