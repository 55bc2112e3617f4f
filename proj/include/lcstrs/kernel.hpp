#pragma once

#include "lcstrs/horpo.hpp"
#include "lcstrs/program.hpp"
#include "lcstrs/rewriter.hpp"

#include "json.hpp"

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace lcstrs {

/// Which bound dominates a side of an equation context. `strict` is set
/// once the side has been rewritten, so the bound is then strictly greater.
struct Dominance {
  bool by_right = false;
  bool strict = false;
};

/// (bound_left, lhs ~ rhs [phi], bound_right) with a stable id.
struct EquationContext {
  int id = 0;
  Term bound_left;
  Equation eq;
  Term bound_right;
  Dominance left_dom{false, false};
  Dominance right_dom{true, false};
  /// Hypotheses of the Induct steps this context descends from. While any
  /// such context is open the hypothesis is still being proved.
  std::vector<std::string> inducts;
};

struct Hypothesis {
  std::string id;  // H0, H1, ...
  Equation eq;
};

/// An assumed equation. `justification` is empty for an undischarged
/// obligation; "ring" is checked by the kernel; "proved:<name>" refers to
/// a completed proof tracked by the caller.
struct Axiom {
  std::string id;  // A0, A1, ...
  Equation eq;
  std::string justification;
};

enum class StepKind {
  Simplify,
  Case,
  Delete,
  Induct,
  HDelete,
  Hypothesis,
  AddLemma,
  AssumeAxiom,
  InstallRecursors,
  DefineSymbol,
};
const char* step_kind_str(StepKind k);

/// One deduction step. Terms travel as text so traces stay readable and
/// replay re-parses them against the current signature.
struct ProofStep {
  StepKind kind = StepKind::Delete;
  int target = -1;
  std::string side;       // "left" | "right"
  Position pos;
  std::string rule;       // Simplify: rule label or "calc"
  std::string split;      // Case: constraint text
  std::string hyp;        // HDelete / Hypothesis: H<k> or A<k>
  std::string direction;  // "lr" | "rl"
  std::string equation;   // AddLemma / AssumeAxiom: "s ~ t [phi]"
  std::string justification;
  std::string symbol, type;        // DefineSymbol
  struct RuleText {
    std::string lhs, rhs, constraint;
  };
  std::vector<RuleText> rules;  // DefineSymbol

  nlohmann::json to_json() const;
  static ProofStep from_json(const nlohmann::json& j);
};

/// Machine-readable rejection codes; the HTTP layer exposes them verbatim.
namespace reason {
inline constexpr const char* kUnknownTarget = "unknown-target";
inline constexpr const char* kBadStep = "bad-step";
inline constexpr const char* kNoMatch = "no-match";
inline constexpr const char* kEntailment = "entailment-failed";
inline constexpr const char* kOrdering = "ordering-requirement-unknown";
inline constexpr const char* kBoundUnchanged = "bound-unchanged";
inline constexpr const char* kNotDeletable = "not-deletable";
inline constexpr const char* kBadAxiom = "axiom-not-verified";
}  // namespace reason

struct StepRejected : std::runtime_error {
  std::string code;
  StepRejected(std::string c, const std::string& msg) : std::runtime_error(msg), code(std::move(c)) {}
};

struct ProofState {
  std::vector<EquationContext> E;
  std::vector<Hypothesis> H;
  std::vector<Axiom> A;
  int next_id = 0;
  /// Ordering requirements checked by Hypothesis steps, with the step index.
  std::vector<std::pair<std::size_t, OrderingRequirement>> requirements;
};

enum class ProofVerdict { Open, Proved, Conditional };
const char* proof_verdict_str(ProofVerdict v);

/// Single-writer proof session over a private copy of the program.
class Kernel {
 public:
  Kernel(Program p, const Equation& goal);

  /// Validates and applies; throws StepRejected and leaves the state
  /// unchanged on failure. Returns ids of contexts created by the step.
  std::vector<int> apply(const ProofStep& step);

  const ProofState& state() const { return st_; }
  const Program& program() const { return prog_; }
  const Ordering& ordering() const { return ord_; }
  const std::vector<ProofStep>& trace() const { return trace_; }
  const Equation& goal() const { return goal_; }
  ProofVerdict verdict() const;
  const EquationContext* find(int id) const;

  /// Truncates the trace to n steps and replays it.
  void undo_to(std::size_t n);

  /// Contexts whose bounds no longer provably dominate their sides.
  std::vector<int> bound_violations() const;

  /// Sets a measure for a symbol (fixed for the session).
  void set_measure(const std::string& sym, Measure m);

  /// Whether the step would be accepted (state untouched).
  bool can_apply(const ProofStep& step, std::string* why = nullptr) const;

  /// Serialized trace ("lcstrs-trace/1").
  nlohmann::json trace_json(const std::string& program_text) const;

 private:
  Program initial_prog_;
  Program prog_;
  Equation goal_;
  Ordering ord_;
  ProofState st_;
  std::vector<ProofStep> trace_;
  std::map<std::string, Measure> measure_overrides_;

  std::vector<int> apply_unchecked(const ProofStep& step);
  EquationContext& get(int id);
  void rebuild_ordering();
  std::vector<int> simplify(const ProofStep& step);
  std::vector<int> case_split(const ProofStep& step);
  std::vector<int> hdelete(const ProofStep& step);
  std::vector<int> hypothesis(const ProofStep& step);
  const Equation* lookup_hyp(const std::string& id, bool& in_h) const;
};

/// Replays a trace document against a program text. Throws StepRejected
/// (with the failing step index in the message) on divergence.
struct ReplayResult {
  std::unique_ptr<Kernel> kernel;
  std::size_t steps = 0;
};
ReplayResult replay_trace(const nlohmann::json& trace, const std::string& program_text);

/// 64-bit FNV-1a of the text, as 16 hex digits.
std::string text_hash(const std::string& text);

/// Theory terms equal under phi wherever the two terms differ. Int-sorted
/// terms also compare equal when their polynomial normal forms agree with
/// non-arithmetic subterms treated as opaque atoms.
bool equal_modulo_theory(const Term& s, const Term& t, const Term& phi);

/// Matches `pattern` against `subject` where theory subterms need only be
/// equal under phi. Theory-like mismatches are postponed until the rest of
/// the match has bound their variables; a single unbound variable with
/// coefficient 1 or -1 is then solved for.
bool match_modulo(const Term& pattern, const Term& subject, const Term& phi, Subst& out);

/// Both sides agree after unfolding unconstrained rules of synthesized
/// symbols and normalizing arithmetic (non-arithmetic subterms opaque).
bool ring_equal(const Equation& e, const Program& p);

struct SoundnessReport {
  int samples = 0;
  int joinable = 0;
  int fuel_exhausted = 0;
  std::vector<std::string> violations;  // printed witnesses
  bool ok() const { return violations.empty() && samples > 0; }
};

/// Ground instances respecting the constraint with Int variables drawn from
/// [lo, hi]; function variables become sampled linear functions added as
/// extra rules; other base variables become random constructor terms.
SoundnessReport sample_soundness(const Equation& e, const Program& p, int n = 50, int lo = -20, int hi = 20,
                                 unsigned seed = 1, long fuel = 200000);

/// Step suggestions for one context, cheapest first.
std::vector<ProofStep> enumerate_steps(const Kernel& k, int target);

}  // namespace lcstrs
