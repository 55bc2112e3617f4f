#include "lcstrs/driver.hpp"

#include "lcstrs/horpo.hpp"
#include "lcstrs/kernel.hpp"
#include "lcstrs/rewriter.hpp"
#include "lcstrs/service.hpp"
#include "lcstrs/templates.hpp"

#include <filesystem>
#include <fstream>

namespace lcstrs {

using nlohmann::json;
namespace fs = std::filesystem;

json prove_program(const std::string& text, const ProveOptions& opt) {
  json report;
  Program p;
  try {
    p = parse_program(text);
  } catch (const std::exception& e) {
    report["error"] = e.what();
    report["exit"] = kExitInputError;
    return report;
  }
  std::vector<Equation> queue = goal_queue(p);
  if (opt.goal && *opt.goal >= queue.size()) {
    report["error"] = "the program has " + std::to_string(queue.size()) + " goals, no goal " + std::to_string(*opt.goal);
    report["exit"] = kExitInputError;
    return report;
  }
  std::size_t last = opt.goal ? *opt.goal : queue.size() - 1;
  if (!opt.trace_dir.empty()) fs::create_directories(opt.trace_dir);
  AutoOptions aopt;
  aopt.budget = opt.budget;
  report["goals"] = json::array();
  bool any_open = false, any_conditional = false;
  for (std::size_t i = 0; i <= last && i < queue.size(); ++i) {
    AutoResult r = auto_prove(p, queue[i], aopt);
    bool reported = !opt.goal || *opt.goal == i;
    // Earlier goals serve the selected one as proved results.
    if (r.verdict == ProofVerdict::Proved)
      aopt.proved.push_back({"goal" + std::to_string(i), queue[i]});
    if (!reported) continue;
    json g;
    g["index"] = i;
    g["kind"] = i < p.lemmas.size() ? "lemma" : "goal";
    g["equation"] = equation_str(queue[i]);
    g["verdict"] = proof_verdict_str(r.verdict);
    g["strategy"] = r.strategy;
    g["log"] = r.log;
    g["open"] = json::array();
    for (const auto& c : r.kernel->state().E) g["open"].push_back(equation_str(c.eq));
    if (!opt.trace_dir.empty()) {
      fs::path path = fs::path(opt.trace_dir) / (opt.trace_stem + "." + std::to_string(i) + ".trace.json");
      std::ofstream(path, std::ios::binary | std::ios::trunc) << r.kernel->trace_json(text).dump(2) << "\n";
      g["trace"] = path.string();
    }
    if (r.verdict != ProofVerdict::Open) {
      SoundnessReport s = sample_soundness(queue[i], r.kernel->program(), opt.samples, opt.sample_lo, opt.sample_hi);
      g["soundness"] = {{"samples", s.samples},
                        {"joinable", s.joinable},
                        {"fuel_exhausted", s.fuel_exhausted},
                        {"violations", s.violations},
                        {"ok", s.ok()}};
      // A sampled counterexample overrides the verdict.
      if (!s.violations.empty()) g["verdict"] = "refuted";
    }
    std::string v = g["verdict"];
    any_open |= v == "open" || v == "refuted";
    any_conditional |= v == "conditional";
    report["goals"].push_back(g);
  }
  report["exit"] = any_open ? kExitOpen : any_conditional && !opt.allow_conditional ? kExitConditional : kExitProved;
  return report;
}

json check_program(const std::string& text) {
  json report;
  Program p;
  try {
    p = parse_program(text);
  } catch (const std::exception& e) {
    report["error"] = e.what();
    report["ok"] = false;
    return report;
  }
  QuasiReductivityReport qr = check_quasi_reductivity(p);
  json cov = json::array();
  for (const auto& e : qr.entries) {
    const char* st = e.status == CoverageEntry::Pass ? "pass" : e.status == CoverageEntry::Fail ? "fail" : "unverified";
    cov.push_back({{"symbol", e.symbol}, {"status", st}, {"message", e.message}, {"uncovered", e.uncovered}});
  }
  report["quasi_reductivity"] = cov;
  bool ok = qr.status != CoverageEntry::Fail;
  try {
    Ordering ord = Ordering::for_program(p);
    OrientationReport o = orient_rules(p, ord);
    report["orientation"] = {{"ok", o.ok}, {"failed", o.failed}, {"measures", o.measures}};
    ok = ok && o.ok;
  } catch (const std::exception& e) {
    report["orientation"] = {{"ok", false}, {"error", e.what()}};
    ok = false;
  }
  report["ok"] = ok;
  return report;
}

std::string eval_term(const std::string& program_text, const std::string& term, long fuel) {
  Program p = parse_program(program_text);
  std::map<std::string, Type> vars;
  Term t = parse_term(term, p, vars);
  if (!is_ground(t)) throw TermError("eval needs a ground term: " + term);
  NormalizeResult r = normalize(t, p, fuel);
  if (r.exhausted) throw TermError("no normal form within " + std::to_string(fuel) + " steps");
  return to_string(r.term);
}

}  // namespace lcstrs
