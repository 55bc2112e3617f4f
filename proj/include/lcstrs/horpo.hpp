#pragma once

#include "lcstrs/program.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lcstrs {

enum class Cmp { GT, GEQ, Unknown };
const char* cmp_str(Cmp c);

/// left > right [constraint] (or >= when not strict).
struct OrderingRequirement {
  Term left, right, constraint;
  bool strict = true;
  std::string note;
};
std::string requirement_str(const OrderingRequirement& r);

/// max(sum coef_j * arg_j + c, 0) over Int argument positions of a symbol.
struct Measure {
  std::vector<std::pair<int, int>> coefs;  // (argument position, coefficient)
  int constant = 0;
  std::string str(const std::vector<std::string>& names = {}) const;
};

/// Strict partial order on symbols. User-defined symbols sit above the
/// recursors (tailup > taildn > recup > recdn), which sit above
/// synthesized context symbols, then constructors; theory symbols and
/// holes are minimal. Among user symbols the order is the transitive
/// closure of the call graph and `prec` directives.
class Precedence {
 public:
  static Precedence for_program(const Program& p);
  bool greater(const Term& f, const Term& g) const;
  /// Rank class, larger is bigger: 0 theory/holes, 1 constructors,
  /// 2 synthesized, 3..6 recursors, 10 user-defined.
  int tier(const std::string& name) const;

 private:
  std::map<std::string, int> tiers_;
  std::map<std::string, std::set<std::string>> above_;  // f -> all g with f > g (user tier)
};

class Ordering {
 public:
  /// Builds the precedence and synthesizes measures for every recursive
  /// symbol of p. Throws TermError if the directives contradict the call
  /// graph.
  static Ordering for_program(const Program& p);

  Cmp compare(const Term& s, const Term& t, const Term& phi) const;
  bool satisfied(const OrderingRequirement& r) const;

  const Precedence& precedence() const { return prec_; }
  const std::map<std::string, Measure>& measures() const { return measures_; }
  void set_measure(const std::string& sym, Measure m) { measures_[sym] = std::move(m); }

 private:
  Precedence prec_;
  std::map<std::string, Measure> measures_;
};

struct OrientationReport {
  bool ok = true;
  std::vector<std::string> failed;  // rule labels
  std::map<std::string, std::string> measures;  // symbol -> printed measure
};

OrientationReport orient_rules(const Program& p, const Ordering& ord);
OrientationReport orient_rules(const std::vector<Rule>& rules, const Ordering& ord);

/// Every failing requirement; empty means all pass.
std::vector<OrderingRequirement> discharge(const std::vector<OrderingRequirement>& reqs, const Ordering& ord);

/// Candidate measures for a symbol of the given type, in search order.
std::vector<Measure> measure_candidates(const Type& sym_type);

}  // namespace lcstrs
