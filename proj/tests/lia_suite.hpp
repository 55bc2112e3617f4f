#pragma once

// Shared by the solver unit tests and the acceptance binary.

#include "lcstrs/program.hpp"
#include "lcstrs/solver.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace lia {

struct Case {
  int line = 0;
  bool validity = true;  // false: satisfiability
  bool expected = true;
  std::string text;
};

inline std::vector<Case> load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<Case> out;
  std::string s;
  int n = 0;
  while (std::getline(in, s)) {
    ++n;
    if (s.empty() || s[0] == '#') continue;
    auto bar = s.find('|');
    std::istringstream head(s.substr(0, bar));
    std::string kind, exp;
    head >> kind >> exp;
    out.push_back(Case{n, kind == "valid", exp == "yes", s.substr(bar + 1)});
  }
  return out;
}

struct Outcome {
  bool verdict_ok = false;
  bool fuzz_ok = false;
  std::string detail;
};

inline lcstrs::Term parse(const Case& c) {
  static const lcstrs::Program empty;
  std::map<std::string, lcstrs::Type> vars;
  return lcstrs::parse_term(c.text, empty, vars, true, false, lcstrs::bool_type());
}

// Checks the decision and then compares it against `points` evaluations:
// a valid formula must hold everywhere, an unsatisfiable one nowhere, and
// every returned model must do what it claims.
inline Outcome run(const Case& c, std::mt19937& rng, int points = 1000) {
  using namespace lcstrs;
  Outcome o;
  Term phi = parse(c);
  SolverResult r = c.validity ? is_valid(phi) : is_satisfiable(phi);
  Verdict want = c.expected ? Verdict::Yes : Verdict::No;
  o.verdict_ok = r.verdict == want;
  if (!o.verdict_ok) o.detail = std::string("verdict ") + verdict_str(r.verdict);

  auto holds = [&](const std::map<std::string, Value>& env) { return eval_under(phi, env).b; };
  o.fuzz_ok = true;
  bool witness_claimed = (c.validity && r.verdict == Verdict::No) || (!c.validity && r.verdict == Verdict::Yes);
  if (witness_claimed) {
    bool h = holds(r.model);
    if (h != !c.validity) {
      o.fuzz_ok = false;
      o.detail += "; model does not witness the verdict";
    }
  }
  auto vs = vars_of(phi);
  std::uniform_int_distribution<int> small(-3, 3), wide(-100, 100), coin(0, 1);
  for (int k = 0; k < points && o.fuzz_ok; ++k) {
    std::map<std::string, Value> env;
    for (const auto& v : vs) {
      if (v->type->sort == "Bool")
        env[v->name] = Value::of_bool(coin(rng));
      else
        env[v->name] = Value::of_int(k % 2 ? small(rng) : wide(rng));
    }
    bool h = holds(env);
    if (r.verdict == Verdict::Yes && c.validity && !h) o.fuzz_ok = false;
    if (r.verdict == Verdict::No && !c.validity && h) o.fuzz_ok = false;
    if (!o.fuzz_ok) o.detail += "; counterexample to the verdict found by sampling";
  }
  return o;
}

}  // namespace lia
