// Command-line front end. Talks to the prover only through the C API.
#include "lcstrs/lcstrs_c.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using nlohmann::json;

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::stringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

// Owns a string returned by the C API.
struct CStr {
  char* p = nullptr;
  ~CStr() { lcstrs_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct Program {
  lcstrs_program* p = nullptr;
  ~Program() { lcstrs_program_free(p); }
};

// Loads and parses a program file; prints the diagnostic and returns false.
bool load(const std::string& file, Program& prog) {
  std::string text;
  if (!read_file(file, text)) {
    std::cerr << "error: cannot read " << file << "\n";
    return false;
  }
  if (lcstrs_program_parse(text.c_str(), &prog.p) != LCSTRS_OK) {
    std::cerr << file << ":" << lcstrs_last_error() << "\n";
    return false;
  }
  return true;
}

int cmd_prove(const std::string& file, long goal, long budget, const std::string& smt, bool allow_conditional,
              const std::string& trace_dir, bool as_json) {
  Program prog;
  if (!load(file, prog)) return 1;
  lcstrs_prove_options opt;
  lcstrs_prove_options_init(&opt);
  opt.goal = goal > 0 ? goal - 1 : -1;
  opt.budget = budget;
  opt.allow_conditional = allow_conditional;
  std::string stem = std::filesystem::path(file).stem().string();
  if (!trace_dir.empty()) {
    opt.trace_dir = trace_dir.c_str();
    opt.trace_stem = stem.c_str();
  }
  if (!smt.empty()) opt.smt_path = smt.c_str();
  CStr report;
  int code = 1;
  if (lcstrs_prove(prog.p, &opt, &report.p, &code) != LCSTRS_OK) {
    std::cerr << "error: " << lcstrs_last_error() << "\n";
    return 1;
  }
  json r = json::parse(report.str());
  if (as_json) {
    std::cout << r.dump(2) << "\n";
    return code;
  }
  if (r.contains("error")) std::cerr << "error: " << r["error"].get<std::string>() << "\n";
  for (const auto& g : r.value("goals", json::array())) {
    std::size_t n = g["index"].get<std::size_t>() + 1;
    std::cout << g["kind"].get<std::string>() << " " << n << ": " << g["equation"].get<std::string>() << "\n";
    std::cout << "  verdict: " << g["verdict"].get<std::string>();
    if (!g["strategy"].get<std::string>().empty()) std::cout << " (" << g["strategy"].get<std::string>() << ")";
    std::cout << "\n";
    if (g.contains("soundness")) {
      const auto& s = g["soundness"];
      std::cout << "  soundness sample: " << s["joinable"] << "/" << s["samples"] << " joinable";
      if (s["fuel_exhausted"].get<int>() > 0) std::cout << ", " << s["fuel_exhausted"] << " out of fuel";
      std::cout << (s["ok"].get<bool>() ? "" : ", FAILED") << "\n";
      for (const auto& v : s["violations"]) std::cout << "    counterexample: " << v.get<std::string>() << "\n";
    }
    for (const auto& o : g["open"]) std::cout << "  open: " << o.get<std::string>() << "\n";
    if (g.contains("trace")) std::cout << "  trace: " << g["trace"].get<std::string>() << "\n";
  }
  return code;
}

int cmd_check(const std::string& file) {
  Program prog;
  if (!load(file, prog)) return 1;
  CStr report;
  if (lcstrs_check(prog.p, &report.p) != LCSTRS_OK) {
    std::cerr << "error: " << lcstrs_last_error() << "\n";
    return 1;
  }
  json r = json::parse(report.str());
  for (const auto& e : r["quasi_reductivity"]) {
    std::cout << "coverage " << e["symbol"].get<std::string>() << ": " << e["status"].get<std::string>();
    if (!e["uncovered"].get<std::string>().empty()) std::cout << " (uncovered: " << e["uncovered"].get<std::string>() << ")";
    std::cout << "\n";
  }
  const auto& o = r["orientation"];
  std::cout << "orientation: " << (o["ok"].get<bool>() ? "ok" : "failed") << "\n";
  for (const auto& f : o.value("failed", json::array())) std::cout << "  not oriented: " << f.get<std::string>() << "\n";
  json measures = o.value("measures", json::object());
  for (const auto& [sym, m] : measures.items())
    std::cout << "  measure " << sym << ": " << m.get<std::string>() << "\n";
  return r["ok"].get<bool>() ? 0 : 3;
}

int cmd_eval(const std::string& file, const std::string& term) {
  Program prog;
  if (!load(file, prog)) return 1;
  CStr nf;
  if (lcstrs_eval(prog.p, term.c_str(), &nf.p) != LCSTRS_OK) {
    std::cerr << "error: " << lcstrs_last_error() << "\n";
    return 1;
  }
  std::cout << nf.str() << "\n";
  return 0;
}

int cmd_replay(const std::string& file, const std::string& trace_file) {
  Program prog;
  if (!load(file, prog)) return 1;
  std::string trace;
  if (!read_file(trace_file, trace)) {
    std::cerr << "error: cannot read " << trace_file << "\n";
    return 1;
  }
  CStr verdict;
  if (lcstrs_replay(prog.p, trace.c_str(), &verdict.p) != LCSTRS_OK) {
    std::cerr << "replay failed: " << lcstrs_last_error() << "\n";
    return 3;
  }
  std::cout << verdict.str() << "\n";
  return verdict.str() == "proved" ? 0 : verdict.str() == "conditional" ? 2 : 3;
}

int cmd_serve(const std::string& host, int port, const std::string& trace_dir) {
  lcstrs_store* store = nullptr;
  if (lcstrs_store_new(trace_dir.empty() ? nullptr : trace_dir.c_str(), &store) != LCSTRS_OK) {
    std::cerr << "error: " << lcstrs_last_error() << "\n";
    return 1;
  }
  CStr failures;
  lcstrs_store_load(store, &failures.p);
  for (const auto& f : json::parse(failures.str().empty() ? "[]" : failures.str()))
    std::cerr << "not restored: " << f.get<std::string>() << "\n";
  std::cerr << "serving /v1 on " << host << ":" << port << "\n";
  lcstrs_status st = lcstrs_serve(store, host.c_str(), port);
  if (st != LCSTRS_OK) std::cerr << "error: " << lcstrs_last_error() << "\n";
  lcstrs_store_free(store);
  return st == LCSTRS_OK ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equivalence prover for logically constrained rewrite programs"};
  app.require_subcommand(1);

  std::string file, term, trace_dir, smt, host = "127.0.0.1", trace_file;
  long goal = 0, budget = 2000;
  int port = 8080;
  bool allow_conditional = false, as_json = false;

  auto* prove = app.add_subcommand("prove", "prove the goals of a program");
  prove->add_option("file", file, "program file")->required();
  prove->add_option("--goal", goal, "prove only goal N (1-based, lemmas first)")->check(CLI::PositiveNumber);
  prove->add_option("--budget", budget, "kernel steps for the generic search")->check(CLI::PositiveNumber);
  prove->add_option("--smt", smt, "external SMT-LIB solver executable");
  prove->add_flag("--allow-conditional", allow_conditional, "exit 0 on conditional verdicts");
  prove->add_option("--trace-dir", trace_dir, "write one trace file per goal");
  prove->add_flag("--json", as_json, "print the report as JSON");

  auto* check = app.add_subcommand("check", "parse, coverage and rule orientation");
  check->add_option("file", file, "program file")->required();

  auto* eval = app.add_subcommand("eval", "normal form of a ground term");
  eval->add_option("file", file, "program file")->required();
  eval->add_option("term", term, "ground term")->required();

  auto* replay = app.add_subcommand("replay", "replay a trace file");
  replay->add_option("file", file, "program file")->required();
  replay->add_option("trace", trace_file, "trace file")->required();

  auto* serve = app.add_subcommand("serve", "serve the /v1 session API over HTTP");
  serve->add_option("--port", port, "port");
  serve->add_option("--host", host, "address to bind");
  serve->add_option("--trace-dir", trace_dir, "persist sessions here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  if (*prove) return cmd_prove(file, goal, budget, smt, allow_conditional, trace_dir, as_json);
  if (*check) return cmd_check(file);
  if (*eval) return cmd_eval(file, term);
  if (*replay) return cmd_replay(file, trace_file);
  return cmd_serve(host, port, trace_dir);
}
