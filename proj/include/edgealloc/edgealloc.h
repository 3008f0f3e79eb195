/* edgealloc: worst-case learning-error minimizing TDMA time/energy allocation.
 *
 * C interface over the solver core. All objects are opaque handles created and
 * destroyed here; every fallible call returns ea_status and leaves a
 * human-readable message in ea_last_error() (thread-local, overwritten by the
 * next failing call on the same thread). Strings returned through char** are
 * heap-allocated; release them with ea_string_free().
 */
#ifndef EDGEALLOC_H
#define EDGEALLOC_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define EA_API __declspec(dllexport)
#else
#define EA_API __attribute__((visibility("default")))
#endif

/* Values double as CLI exit codes. */
typedef enum ea_status {
  EA_OK = 0,
  EA_ERROR_INVALID_INPUT = 2,
  EA_ERROR_METHOD_INELIGIBLE = 3,
  EA_ERROR_INFEASIBLE = 4,
  EA_ERROR_SOLVER_FAILURE = 5
} ea_status;

typedef struct ea_scenario ea_scenario;
typedef struct ea_result ea_result;
typedef struct ea_summary ea_summary;

EA_API const char* ea_version(void);
EA_API const char* ea_last_error(void);
EA_API void ea_string_free(char* s);

/* ---- scenarios ---- */

EA_API ea_status ea_scenario_parse(const char* json_text, ea_scenario** out);
EA_API void ea_scenario_free(ea_scenario* s);
EA_API int ea_scenario_user_count(const ea_scenario* s);
EA_API int ea_scenario_task_count(const ea_scenario* s);
/* 1 when e_max >= t_max * p_max (the analytical solver's regime). */
EA_API int ea_scenario_ranking_eligible(const ea_scenario* s);

/* ---- solving ---- */

typedef struct ea_solve_options {
  const char* method; /* "ranking" | "dcp" | "time-fair" | "throughput-fair" */
  double epsilon;     /* ranking bisection tolerance; <= 0 selects 1e-9 */
  double outer_tol;   /* dcp outer tolerance; <= 0 selects 1e-6 */
  int max_outer;      /* dcp outer iteration cap; <= 0 selects 100 */
} ea_solve_options;

EA_API ea_status ea_solve(const ea_scenario* s, const ea_solve_options* options,
                          ea_result** out);
EA_API void ea_result_free(ea_result* r);
EA_API double ea_result_objective(const ea_result* r);
EA_API int ea_result_user_count(const ea_result* r);
/* Allocation, per-task sample counts and the solver trace as JSON. */
EA_API ea_status ea_result_report_json(const ea_result* r, char** out);
/* Per-user table: user,t_s,E_J,bits,samples (samples floored). */
EA_API ea_status ea_result_users_csv(const ea_result* r, char** out);

/* ---- learning-curve fitting ---- */

typedef struct ea_fit_result {
  double a;
  double b;
  double residual_sse;
  int iterations;
} ea_fit_result;

/* Least squares fit of err ~ a * v^-b. On EA_ERROR_SOLVER_FAILURE the best
 * iterate found is still written to *out. gradient_tol <= 0 selects 1e-10,
 * max_iterations <= 0 selects 500; multistart != 0 adds 8 jittered starts. */
EA_API ea_status ea_fit_power_law(const double* v, const double* err, int n,
                                  double gradient_tol, int max_iterations,
                                  int multistart, ea_fit_result* out);

/* ---- sweeps and reproductions ---- */

/* Built-in configs: "fig2a", "fig2b", "vehicular", "k4_vs_k6". */
EA_API ea_status ea_builtin_config(const char* name, char** out_json);

/* seed_override < 0 keeps the seed from the config. */
EA_API ea_status ea_sweep_run(const char* config_json, int64_t seed_override,
                              ea_summary** out);
EA_API void ea_summary_free(ea_summary* s);
EA_API ea_status ea_summary_csv(const ea_summary* s, char** out);
EA_API ea_status ea_summary_json(const ea_summary* s, char** out);

/* Fixed-rate two-vehicle collection benchmark: ranking vs equal time, with
 * floored per-task sample counts. */
EA_API ea_status ea_reproduce_vehicular(char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* EDGEALLOC_H */
