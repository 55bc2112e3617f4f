#pragma once

#include "lcstrs/term.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lcstrs {

struct ParseError : std::runtime_error {
  int line = 0, col = 0;
  ParseError(int l, int c, const std::string& msg)
      : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg), line(l), col(c) {}
};

/// lhs -> rhs [constraint]; label is "sym:k" (k-th rule of sym, 0-based).
struct Rule {
  Term lhs, rhs, constraint;
  std::string label;
};

/// lhs ~ rhs [constraint].
struct Equation {
  Term lhs, rhs, constraint;
};

std::string equation_str(const Equation& e);
std::string rule_str(const Rule& r);

enum class SymbolRole { User, Recursor, Synthesized };

struct SymbolInfo {
  std::string name;
  Type type;
  SymbolRole role = SymbolRole::User;
};

/// Signature, rules, goals and lemmas of an LCSTRS. Theory symbols are
/// built in and never stored here.
class Program {
 public:
  std::vector<SymbolInfo> symbols;  // declaration order
  std::vector<Rule> rules;          // declaration order
  std::vector<Equation> goals;
  std::vector<Equation> lemmas;
  std::vector<std::vector<std::string>> precedences;  // prec a > b > c;

  const SymbolInfo* find_symbol(const std::string& name) const;
  Term symbol(const std::string& name) const;
  void declare(const std::string& name, Type type, SymbolRole role = SymbolRole::User);
  /// Validates well-formedness, assigns the label, updates arities.
  const Rule& add_rule(Term lhs, Term rhs, Term constraint);
  std::vector<const Rule*> rules_for(const std::string& sym) const;
  const Rule* rule_by_label(const std::string& label) const;

  /// ar(f): rule argument count; nullopt means infinity (constructor).
  /// Theory symbols consume their operands; values are constructors.
  std::optional<int> arity(const std::string& sym) const;
  std::optional<int> arity(const Term& sym) const;
  Arity arity_fn() const;
  bool is_defined(const std::string& sym) const { return arities_.count(sym) > 0; }

 private:
  std::map<std::string, std::size_t> index_;
  std::map<std::string, int> arities_;
};

/// Parses a complete program. Throws ParseError.
Program parse_program(const std::string& text);

/// Parses a term against the program's signature. Variables already in
/// `vars` keep their types; new lowercase identifiers become variables
/// (typed by inference) and are added to `vars` when allowed.
Term parse_term(const std::string& text, const Program& p, std::map<std::string, Type>& vars,
                bool allow_new_vars = true, bool allow_holes = false, const Type& expected = nullptr);

/// Parses "s ~ t [phi]" with the same conventions as parse_term.
Equation parse_equation(const std::string& text, const Program& p, std::map<std::string, Type>& vars,
                        bool allow_holes = false);

Type parse_type(const std::string& text);

/// Textual form accepted by parse_program.
std::string print_program(const Program& p);

/// One rule f x1 .. xm -> y [y = f x1 .. xm] per non-value theory symbol.
std::vector<Rule> synth_calc_rules();

struct CoverageEntry {
  std::string symbol;
  enum Status { Pass, Fail, Unverified } status = Pass;
  std::string message;
  std::string uncovered;  // constraint region or missing pattern
};

struct QuasiReductivityReport {
  CoverageEntry::Status status = CoverageEntry::Pass;
  std::vector<CoverageEntry> entries;
  std::string str() const;
};

QuasiReductivityReport check_quasi_reductivity(const Program& p);

/// Variables of the equation with their types (lhs, rhs, constraint order).
std::map<std::string, Type> equation_vars(const Equation& e);
std::map<std::string, Type> rule_vars(const Rule& r);

}  // namespace lcstrs
