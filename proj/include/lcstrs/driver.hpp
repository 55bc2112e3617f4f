#pragma once

#include "json.hpp"

#include <optional>
#include <string>

namespace lcstrs {

struct ProveOptions {
  std::optional<std::size_t> goal;  // index into the goal queue; all when empty
  long budget = 2000;
  std::string trace_dir;            // one trace file per goal when set
  std::string trace_stem = "goal";  // file name prefix of the traces
  bool allow_conditional = false;
  int sample_lo = -20, sample_hi = 20, samples = 50;
};

/// Exit codes of `prove`.
inline constexpr int kExitProved = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitConditional = 2;
inline constexpr int kExitOpen = 3;

/// Proves the goal queue (lemmas first) with auto_prove, each goal getting
/// the earlier proved ones as usable results. The report lists per goal the
/// verdict, strategy, trace path, soundness sample and open contexts, plus
/// the overall "exit" code. Parse errors are reported with exit 1.
nlohmann::json prove_program(const std::string& text, const ProveOptions& opt);

/// Parse, quasi-reductivity and rule orientation.
nlohmann::json check_program(const std::string& text);

/// Normal form of a ground term. Throws on parse errors or when the
/// rewriting fuel runs out.
std::string eval_term(const std::string& program_text, const std::string& term, long fuel = 1000000);

}  // namespace lcstrs
