#pragma once

#include "lcstrs/program.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lcstrs {

/// One ground step: the rule label ("calc" for calculations), the position
/// of the redex node and the number of its arguments the rule consumed.
struct GroundStep {
  Term result;
  std::string label;
  Position pos;
};

/// Leftmost-innermost step with the program rules and calculations.
/// Returns nullopt on normal forms. `t` must be ground.
std::optional<GroundStep> reduce_ground_once(const Term& t, const Program& p);

struct NormalizeResult {
  Term term;
  long steps = 0;
  bool exhausted = false;  // fuel ran out before a normal form
};

NormalizeResult normalize(const Term& t, const Program& p, long fuel = 100000);

enum class Joinable { Yes, No, FuelExhausted };
Joinable joinable(const Term& s, const Term& t, const Program& p, long fuel = 100000);

/// Outcome of a symbolic step on one side of a constrained equation.
struct RewriteResult {
  Term term;
  Term constraint;  // input constraint, extended with definitions of fresh variables
  std::string label;
  Position pos;
  std::vector<std::pair<std::string, Term>> defs;  // fresh variable := theory term
};

/// Why a symbolic step was refused.
struct RewriteRefusal {
  std::string reason;
};

/// Rewrites s at pos with `rule` under phi. `avoid` lists names the fresh
/// variables must not take (e.g. variables of the other side and bounds).
/// Rule variables are renamed apart internally.
std::optional<RewriteResult> constrained_rewrite(const Term& s, const Term& phi, const Rule& rule,
                                                 const Position& pos, const std::set<std::string>& avoid,
                                                 RewriteRefusal* why = nullptr);

/// Replaces the theory subterm at pos by a fresh variable defined in the
/// constraint (z*(f (z-1)) becomes z*(f z') with z' = z - 1). Ground theory
/// subterms are evaluated in place instead.
std::optional<RewriteResult> abstract_calc(const Term& s, const Term& phi, const Position& pos,
                                           const std::set<std::string>& avoid, RewriteRefusal* why = nullptr);

/// All applicable (position, rule) steps on s, outermost-leftmost, with
/// calculation abstractions last.
std::vector<RewriteResult> enumerate_rewrites(const Term& s, const Term& phi, const Program& p,
                                              const std::set<std::string>& avoid);

/// Variables that must be instantiated by values: those of the constraint.
/// A theory term is "computable under phi" when its variables all occur in phi.
bool computable_under(const Term& e, const Term& phi);

}  // namespace lcstrs
