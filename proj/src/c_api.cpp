#include "lcstrs/lcstrs_c.h"

#include "lcstrs/driver.hpp"
#include "lcstrs/kernel.hpp"
#include "lcstrs/service.hpp"
#include "lcstrs/solver.hpp"

#include <cstdlib>
#include <cstring>

using namespace lcstrs;

struct lcstrs_program {
  std::string text;
  Program prog;
};

struct lcstrs_store {
  SessionStore store;
  explicit lcstrs_store(std::string dir) : store(std::move(dir)) {}
};

namespace {

thread_local std::string last_error;

lcstrs_status fail(lcstrs_status st, const std::string& msg) {
  last_error = msg;
  return st;
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Maps exceptions onto status codes.
template <class F>
lcstrs_status guarded(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const ParseError& e) {
    return fail(LCSTRS_ERR_PARSE, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(LCSTRS_ERR_PARSE, e.what());
  } catch (const StepRejected& e) {
    return fail(LCSTRS_ERR_REJECTED, e.code + ": " + e.what());
  } catch (const TermError& e) {
    return fail(LCSTRS_ERR_PARSE, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(LCSTRS_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(LCSTRS_ERR_INTERNAL, e.what());
  }
}

}  // namespace

extern "C" {

const char* lcstrs_version(void) { return "1.0.0"; }
const char* lcstrs_last_error(void) { return last_error.c_str(); }
void lcstrs_string_free(char* s) { std::free(s); }

lcstrs_status lcstrs_program_parse(const char* text, lcstrs_program** out) {
  if (!text || !out) return fail(LCSTRS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    auto p = std::make_unique<lcstrs_program>();
    p->text = text;
    p->prog = parse_program(p->text);
    *out = p.release();
    return LCSTRS_OK;
  });
}

void lcstrs_program_free(lcstrs_program* p) { delete p; }

size_t lcstrs_program_goal_count(const lcstrs_program* p) { return p ? goal_queue(p->prog).size() : 0; }

lcstrs_status lcstrs_program_goal(const lcstrs_program* p, size_t index, char** out) {
  if (!p || !out) return fail(LCSTRS_ERR_ARGUMENT, "null argument");
  auto q = goal_queue(p->prog);
  if (index >= q.size()) return fail(LCSTRS_ERR_ARGUMENT, "goal index out of range");
  *out = dup(equation_str(q[index]));
  return LCSTRS_OK;
}

lcstrs_status lcstrs_check(const lcstrs_program* p, char** report_json) {
  if (!p || !report_json) return fail(LCSTRS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *report_json = dup(check_program(p->text).dump(2));
    return LCSTRS_OK;
  });
}

lcstrs_status lcstrs_eval(const lcstrs_program* p, const char* term, char** normal_form) {
  if (!p || !term || !normal_form) return fail(LCSTRS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *normal_form = dup(eval_term(p->text, term));
    return LCSTRS_OK;
  });
}

void lcstrs_prove_options_init(lcstrs_prove_options* opt) {
  if (!opt) return;
  opt->goal = -1;
  opt->budget = 2000;
  opt->trace_dir = nullptr;
  opt->trace_stem = nullptr;
  opt->allow_conditional = 0;
  opt->smt_path = nullptr;
}

lcstrs_status lcstrs_prove(const lcstrs_program* p, const lcstrs_prove_options* opt, char** report_json,
                           int* exit_code) {
  if (!p || !report_json) return fail(LCSTRS_ERR_ARGUMENT, "null argument");
  lcstrs_prove_options d;
  lcstrs_prove_options_init(&d);
  if (!opt) opt = &d;
  if (opt->budget <= 0) return fail(LCSTRS_ERR_ARGUMENT, "budget must be positive");
  return guarded([&] {
    ProveOptions po;
    if (opt->goal >= 0) po.goal = static_cast<std::size_t>(opt->goal);
    po.budget = opt->budget;
    if (opt->trace_dir) po.trace_dir = opt->trace_dir;
    if (opt->trace_stem) po.trace_stem = opt->trace_stem;
    po.allow_conditional = opt->allow_conditional != 0;
    if (opt->smt_path) set_smt_solver(opt->smt_path);
    nlohmann::json r = prove_program(p->text, po);
    if (exit_code) *exit_code = r["exit"].get<int>();
    *report_json = dup(r.dump(2));
    return LCSTRS_OK;
  });
}

lcstrs_status lcstrs_replay(const lcstrs_program* p, const char* trace_json, char** verdict) {
  if (!p || !trace_json || !verdict) return fail(LCSTRS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    ReplayResult r = replay_trace(nlohmann::json::parse(trace_json), p->text);
    *verdict = dup(proof_verdict_str(r.kernel->verdict()));
    return LCSTRS_OK;
  });
}

lcstrs_status lcstrs_store_new(const char* trace_dir, lcstrs_store** out) {
  if (!out) return fail(LCSTRS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new lcstrs_store(trace_dir ? trace_dir : "");
    return LCSTRS_OK;
  });
}

void lcstrs_store_free(lcstrs_store* s) { delete s; }

lcstrs_status lcstrs_store_load(lcstrs_store* s, char** failures_json) {
  if (!s) return fail(LCSTRS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    auto failures = s->store.load_all();
    if (failures_json) *failures_json = dup(nlohmann::json(failures).dump());
    return LCSTRS_OK;
  });
}

lcstrs_status lcstrs_store_handle(lcstrs_store* s, const char* method, const char* path, const char* body,
                                  int* http_status, char** response_json) {
  if (!s || !method || !path || !http_status || !response_json) return fail(LCSTRS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    HttpResponse r = s->store.handle(method, path, body ? body : "");
    *http_status = r.status;
    *response_json = dup(r.body.dump());
    return LCSTRS_OK;
  });
}

lcstrs_status lcstrs_serve(lcstrs_store* s, const char* host, int port) {
  if (!s || !host) return fail(LCSTRS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    if (serve_http(s->store, host, port) != 0) return fail(LCSTRS_ERR_IO, "cannot listen on " + std::string(host) + ":" + std::to_string(port));
    return LCSTRS_OK;
  });
}

}  // extern "C"
