#pragma once

#include "lcstrs/theory.hpp"

#include <string>

namespace lcstrs {

enum class Verdict { Yes, No, Unknown };
const char* verdict_str(Verdict v);

struct SolverResult {
  Verdict verdict = Verdict::Unknown;
  /// For No from is_valid: a falsifying assignment. For Yes from
  /// is_satisfiable: a satisfying one. Values only.
  std::map<std::string, Value> model;
  /// Which layer settled the query: "linear", "nonlinear-abstraction",
  /// "enumeration", "smt", or empty.
  std::string via;
};

/// Validity of a constraint under all assignments of its variables.
SolverResult is_valid(const Term& phi);
/// yes iff is_valid(phi -> psi) is yes.
SolverResult entails(const Term& phi, const Term& psi);
SolverResult is_satisfiable(const Term& phi);

/// Bounding box for nonlinear refutation search (default 64).
void set_enumeration_bound(int b);
int enumeration_bound();

/// External solver path; empty disables. Defaults to $LCSTRS_SMT.
void set_smt_solver(const std::string& path);
std::string smt_solver();

/// SMT-LIB 2 script checking validity of phi by refuting its negation.
std::string smtlib_query(const Term& phi);
/// Runs the configured (or given) external solver on the negation of phi.
SolverResult smt_roundtrip(const Term& phi, const std::string& solver_path = "");

/// Feasibility of a conjunction of linear integer constraints. Each entry is
/// sum(coef * var) + c, with `eq` meaning = 0 and otherwise >= 0. Returns a
/// model on success. Exposed for testing.
struct LinearConstraint {
  std::map<std::string, Int> coef;
  Int c = 0;
  bool eq = false;
};
enum class Feasibility { Sat, Unsat, Unknown };
Feasibility omega_feasible(const std::vector<LinearConstraint>& cs, std::map<std::string, Int>* model);

}  // namespace lcstrs
