#pragma once

#include "lcstrs/horpo.hpp"
#include "lcstrs/kernel.hpp"
#include "lcstrs/program.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lcstrs {

/// The higher-order recursors, in precedence order.
const std::vector<std::string>& recursor_names();

/// Declares tailup, taildn, recup, recdn and adds their eight rules.
/// Throws TermError if any of the names is taken.
void install_recursors(Program& p);
bool has_recursors(const Program& p);

/// True iff no recursor occurs in the equation.
bool recursor_free(const Equation& e, const Program& p);

/// Adds `rule lhs -> rhs [phi];` given as text (variables typed by inference).
const Rule& add_rule_text(Program& p, const std::string& lhs, const std::string& rhs, const std::string& phi = "");

// --- Template recognition ------------------------------------------------

enum class TemplateKind { TailUp, TailDown, RecUp, RecDown };
const char* template_kind_str(TemplateKind k);
/// The recursor a template kind corresponds to.
const char* template_recursor(TemplateKind k);

/// A fresh context symbol F x1 .. xk y1 y2 -> F(y1, y2) over the free
/// variables x1 .. xk of the context function.
struct SynthSymbol {
  std::string name;  // F_<8 hex digits of the printed context function>
  std::string type;
  std::string lhs, rhs;
  std::vector<std::string> params;  // free variables, in order

  ProofStep define_step() const;
};

struct TemplateMatch {
  TemplateKind kind = TemplateKind::TailUp;
  std::string symbol;
  /// The defined symbol applied with #1 at the index and (Tail kinds) #2
  /// at the accumulator; other arguments are the rule's variables.
  Term context;
  /// Context function over #1 #2 in the argument order of the recursor's f.
  Term F;
  Term bound;  // u (Up kinds) or l (Down kinds)
  Term base;   // b, Rec kinds only
  std::string index, acc;
  std::vector<Rule> rules;  // normalized source rules: base, recursive
  /// Function term given to the recursor: an existing symbol, or the
  /// synthesized symbol applied to its parameters.
  Term fn;
  std::optional<SynthSymbol> synth;
};

/// Rewrites single-comparison guards to the polarity of the recursion
/// direction: upward rules use `i > u` / `i <= u`, downward rules `i < l` /
/// `i >= l`. Idempotent; rules of other shapes pass through unchanged.
std::vector<Rule> normalize_inequalities(const std::vector<Rule>& rules);

/// All template kinds the rules of `sym` fit (empty if none).
std::vector<TemplateMatch> match_template(const Program& p, const std::string& sym);
std::vector<TemplateMatch> match_template(const Program& p, const std::string& sym, TemplateKind kind);

/// The template rules instantiated with the match's parameters.
std::vector<Rule> reconstruct_rules(const TemplateMatch& m);

// --- Proof scripts -------------------------------------------------------

/// One instruction of a stored proof script. Scripts refer to hypotheses
/// and axioms through local references: "H@k" is the k-th Induct of the
/// running script, "A@k" the k-th axiom supplied to it. Any other reference
/// is passed to the kernel unchanged.
struct ScriptOp {
  enum Kind {
    Induct,
    CaseGuard,  // split on the guard of `rule` where it matches on `side`
    Simp,       // Simplify `side` with `rule`, first applicable position
    Unfold,     // exhaust the rules of synthesized symbols on both sides
    Hyp,        // Hypothesis `ref` in direction `dir` on `side`
    HDel,       // HDelete with `ref`
    Delete,
    Close,      // Delete, or HDelete with any local reference, or one
                // Hypothesis step followed by either
    Lemma,      // prove `equation` with `body` and keep it in H
  } kind = Close;
  std::string side, rule, ref, dir, equation;
  std::vector<ScriptOp> then_ops, else_ops, body;
};
using Script = std::vector<ScriptOp>;

nlohmann::json script_json(const Script& s);

struct ScriptEnv {
  std::vector<std::string> hyps;    // H@k -> kernel id
  std::vector<std::string> axioms;  // A@k -> kernel id
};

struct ScriptError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Runs the script on one context; throws ScriptError naming the failing
/// instruction. Every context the script creates must be closed by it.
void run_script(Kernel& k, int target, const Script& s, ScriptEnv& env);

/// AddLemma + script. Returns the hypothesis id of the lemma's Induct.
std::string prove_lemma(Kernel& k, const std::string& equation, const Script& s,
                        const std::vector<std::string>& axioms = {});

// --- Template-recursor lemmas ---------------------------------------------

struct TemplateLemma {
  std::string equation;  // T[i,a] ~ tailup F i u a etc.
  Script script;
  std::vector<ProofStep> setup;  // install-recursors / define-symbol as needed
};

/// The equivalence between the template symbol and its recursor, with the
/// canonical Induct/Case/Simplify/Delete/HDelete proof.
TemplateLemma emit_template_recursor_lemma(const TemplateMatch& m, const Program& p);

// --- Lemma bank -------------------------------------------------------------

struct RecursorLemma {
  std::string id;
  std::string equation;  // holes #1 #2 in conditional entries
  std::vector<std::string> axioms;
  struct Req {
    std::string left, right, constraint;
  };
  std::vector<Req> requirements;
  Script script;
  int holes = 0;
  std::string lhs_recursor, rhs_recursor;
};

const std::vector<RecursorLemma>& lemma_bank();
const RecursorLemma* find_lemma(const std::string& id);

/// Entry text with the holes replaced (in a program that has recursors).
struct InstantiatedLemma {
  Equation equation;
  std::vector<Equation> axioms;
  std::vector<OrderingRequirement> requirements;
  std::string equation_text;
  std::vector<std::string> axiom_texts;
};
InstantiatedLemma instantiate_lemma(const RecursorLemma& e, const Program& p, const std::vector<Term>& inst);

struct AxiomCheck {
  enum Status { Pass, Fail, Unknown } status = Pass;
  int failed = -1;       // index of the first axiom that is not proved
  std::string witness;   // "x = 0, y = 1" when refuted by the solver
  std::string message;
};
const char* axiom_status_str(AxiomCheck::Status s);

/// Proves each instantiated axiom: unfold synthesized symbols, compare
/// polynomial normal forms, and otherwise ask the solver for a
/// counterexample when both sides are arithmetic.
AxiomCheck discharge_axioms(const RecursorLemma& e, const std::vector<Term>& inst, const Program& p);

/// Proves a bank entry inside the session: assumes its axioms (justified
/// "ring" when they pass), adds the equation and runs its script. Returns
/// the hypothesis id.
std::string prove_bank_entry(Kernel& k, const RecursorLemma& e, const std::vector<Term>& inst);

// --- Tactics ----------------------------------------------------------------

struct TacticResult {
  bool ok = false;
  std::string message;
  std::vector<std::string> bridges;  // suggested bridging lemmas
  std::size_t steps_before = 0;      // trace length before the tactic
};

/// Rewrites `side` of the context to recursor form with the template lemma
/// and then across a bank entry, leaving the residual goal open.
TacticResult tactic_one_sided(Kernel& k, int target, const std::string& side);

/// Rewrites both sides to recursor form and closes the goal with a bank
/// entry. When only the context functions disagree it reports the bridging
/// lemmas instead (and proves and uses them when `prove_bridges` is set).
TacticResult tactic_two_sided(Kernel& k, int target, bool prove_bridges = false);

/// Simplifies root symbols that are not templates (facTU x -> u x 1 1).
void expose_heads(Kernel& k, int target);

struct ProvedEquation {
  std::string name;
  Equation eq;
};

struct AutoOptions {
  long budget = 2000;  // kernel steps tried by the generic search
  int depth = 7;
  std::vector<ProvedEquation> proved;  // earlier results usable as axioms
};

struct AutoResult {
  ProofVerdict verdict = ProofVerdict::Open;
  std::string strategy;  // "two-sided", "one-sided", "chain", "search", ""
  std::unique_ptr<Kernel> kernel;
  std::vector<std::string> log;
};

AutoResult auto_prove(const Program& p, const Equation& goal, const AutoOptions& opt = {});

/// Bounded depth-first search over enumerate_steps; returns true and leaves
/// the kernel in the closed state on success.
bool generic_search(Kernel& k, int depth, long& budget);

}  // namespace lcstrs
