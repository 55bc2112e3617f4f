#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace lcstrs {

using Int = boost::multiprecision::cpp_int;

// Thrown for ill-typed construction, bad positions, arity mismatches in fill.
struct TermError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TypeNode;
using Type = std::shared_ptr<const TypeNode>;

/// A sort leaf (from == nullptr) or an arrow from -> to.
struct TypeNode {
  std::string sort;
  Type from;
  Type to;
  bool is_arrow() const { return from != nullptr; }
};

Type sort_type(const std::string& name);
Type arrow(Type from, Type to);
Type arrows(const std::vector<Type>& args, Type result);
Type int_type();
Type bool_type();
bool type_eq(const Type& a, const Type& b);
std::string type_str(const Type& t);
std::vector<Type> arg_types(const Type& t);
Type result_type(const Type& t);
bool is_theory_sort(const std::string& s);
/// Every sort occurring in t is Int or Bool.
bool is_theory_type(const Type& t);

enum class TermKind { Sym, Var, App };

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

struct TermNode {
  TermKind kind;
  std::string name;  // symbols and variables
  bool theory = false;  // symbols only
  Type type;
  Term fun, arg;  // applications only
  std::size_t hash = 0;
  std::size_t size = 1;
};

bool term_eq(const Term& a, const Term& b);
struct TermEq {
  bool operator()(const Term& a, const Term& b) const { return term_eq(a, b); }
};
struct TermHash {
  std::size_t operator()(const Term& t) const { return t->hash; }
};
/// Total order used for canonical containers; not semantically meaningful.
bool term_less(const Term& a, const Term& b);
struct TermLess {
  bool operator()(const Term& a, const Term& b) const { return term_less(a, b); }
};

Term mk_sym(const std::string& name, Type type, bool theory = false);
Term mk_var(const std::string& name, Type type);
Term mk_app(const Term& f, const Term& a);
Term mk_apps(Term f, const std::vector<Term>& args);

// Theory symbol shorthands. Binary operators are curried symbols.
Term mk_int(const Int& v);
Term mk_bool(bool b);
Term theory_op(const std::string& op, const Type& operand = nullptr);
Term mk_bin(const std::string& op, const Term& a, const Term& b);
Term mk_not(const Term& a);
Term mk_and(const std::vector<Term>& cs);  // flattens nested conjunctions, drops true
Term mk_or(const Term& a, const Term& b);

bool is_var(const Term& t);
bool is_sym(const Term& t);
bool is_app(const Term& t);

/// Flattened view u s1 .. sm.
Term head(const Term& t);
std::vector<Term> args(const Term& t);

bool is_int_lit(const Term& t);
bool is_bool_lit(const Term& t);
/// Theory symbol of base type (integer literal, true, false).
bool is_value(const Term& t);
Int int_value(const Term& t);
bool bool_value(const Term& t);
bool is_ground(const Term& t);
/// All symbols are theory symbols (variables allowed).
bool is_theory_term(const Term& t);
bool is_base_type(const Term& t);

/// Arity lookup for semi-constructor checks; nullopt stands for infinity.
using Arity = std::function<std::optional<int>(const std::string&)>;
bool is_semi_constructor(const Term& t, const Arity& ar);

struct Classification {
  bool ground, theory, semi_constructor, value;
};
Classification classify(const Term& t, const Arity& ar);

/// Variables in first-occurrence order (left to right, preorder).
std::vector<Term> vars_of(const Term& t);
std::set<std::string> var_names(const Term& t);
bool occurs_var(const std::string& name, const Term& t);
bool contains_sym(const Term& t, const std::string& name);

using Subst = std::map<std::string, Term>;

Term apply_subst(const Term& t, const Subst& s);
/// Syntactic matching; extends `out` (must be consistent with existing bindings).
bool match_term(const Term& pattern, const Term& subject, Subst& out);
std::optional<Subst> match_term(const Term& pattern, const Term& subject);

/// Positions index the arguments of the flattened form: [i] is the i-th
/// argument (0-based) of the head. The root is [].
using Position = std::vector<int>;
std::vector<Position> positions(const Term& t);
std::optional<Term> subterm_at(const Term& t, const Position& p);
Term replace_at(const Term& t, const Position& p, const Term& s);
std::string position_str(const Position& p);

/// Hole constants #1, #2, ... live in a reserved namespace.
Term hole(int i, Type type);
bool is_hole(const Term& t);
int hole_index(const Term& t);
int hole_count(const Term& cf);
Term fill(const Term& cf, const std::vector<Term>& args);

std::string to_string(const Term& t);

/// Deterministic fresh name generation: strips trailing digits and primes
/// from the base and appends the smallest k >= 1 not in `used`.
std::string fresh_name(const std::string& base, const std::set<std::string>& used);

std::string int_str(const Int& v);

}  // namespace lcstrs
