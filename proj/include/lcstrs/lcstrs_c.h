#ifndef LCSTRS_C_H
#define LCSTRS_C_H

/* C interface to the prover. Every object is an opaque handle released by
 * its _free function. Strings returned through `char**` are owned by the
 * caller and released with lcstrs_string_free. Functions return a status
 * code; on failure lcstrs_last_error() describes the problem (per thread,
 * valid until the next call on that thread). */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  LCSTRS_OK = 0,
  LCSTRS_ERR_PARSE = 1,     /* program, term or JSON text does not parse */
  LCSTRS_ERR_ARGUMENT = 2,  /* null handle, index out of range, bad option */
  LCSTRS_ERR_REJECTED = 3,  /* the kernel rejected a step or a trace */
  LCSTRS_ERR_IO = 4,
  LCSTRS_ERR_INTERNAL = 5
} lcstrs_status;

typedef struct lcstrs_program lcstrs_program;
typedef struct lcstrs_store lcstrs_store;

const char* lcstrs_version(void);
const char* lcstrs_last_error(void);
void lcstrs_string_free(char* s);

/* Programs. */
lcstrs_status lcstrs_program_parse(const char* text, lcstrs_program** out);
void lcstrs_program_free(lcstrs_program* p);
/* Lemmas first, then goals. */
size_t lcstrs_program_goal_count(const lcstrs_program* p);
lcstrs_status lcstrs_program_goal(const lcstrs_program* p, size_t index, char** out);
/* Quasi-reductivity and orientation report (JSON). */
lcstrs_status lcstrs_check(const lcstrs_program* p, char** report_json);
/* Normal form of a ground term. */
lcstrs_status lcstrs_eval(const lcstrs_program* p, const char* term, char** normal_form);

/* Proving. */
typedef struct {
  long goal;              /* index into the goal queue, or -1 for all */
  long budget;            /* generic search budget in kernel steps */
  const char* trace_dir;  /* NULL or a directory for trace files */
  const char* trace_stem; /* NULL for "goal" */
  int allow_conditional;
  const char* smt_path;   /* NULL keeps the current external solver */
} lcstrs_prove_options;

void lcstrs_prove_options_init(lcstrs_prove_options* opt);
/* Writes the JSON report and the exit code (0 proved, 1 input error,
 * 2 conditional, 3 open). A parse error is a report, not a failure. */
lcstrs_status lcstrs_prove(const lcstrs_program* p, const lcstrs_prove_options* opt, char** report_json,
                           int* exit_code);

/* Replays a trace document against a program text. */
lcstrs_status lcstrs_replay(const lcstrs_program* p, const char* trace_json, char** verdict);

/* Session service. */
lcstrs_status lcstrs_store_new(const char* trace_dir, lcstrs_store** out);
void lcstrs_store_free(lcstrs_store* s);
/* Loads persisted sessions; writes a JSON array of divergence reports. */
lcstrs_status lcstrs_store_load(lcstrs_store* s, char** failures_json);
/* One `/v1` request; writes the HTTP status and JSON response body. */
lcstrs_status lcstrs_store_handle(lcstrs_store* s, const char* method, const char* path, const char* body,
                                  int* http_status, char** response_json);
/* Blocks serving HTTP on host:port. */
lcstrs_status lcstrs_serve(lcstrs_store* s, const char* host, int port);

#ifdef __cplusplus
}
#endif

#endif
