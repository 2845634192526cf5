/* vaxeq — equilibrium solver for group vaccination games.
 *
 * C interface of the shared library. All functions return a vaxeq_status;
 * on failure a human-readable message is available from vaxeq_last_error()
 * (thread-local, valid until the next failing call on the same thread).
 * Handles are opaque and must be released with the matching _free function.
 */
#ifndef VAXEQ_H
#define VAXEQ_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define VAXEQ_API __declspec(dllexport)
#else
#define VAXEQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct vaxeq_scenario vaxeq_scenario;
typedef struct vaxeq_solution vaxeq_solution;

typedef enum vaxeq_status {
  VAXEQ_OK = 0,
  VAXEQ_ERR_INVALID_ARGUMENT = 1, /* null handle, bad index, bad override */
  VAXEQ_ERR_PARSE = 2,            /* scenario text rejected */
  VAXEQ_ERR_VALIDATION = 3,       /* model failed validity checks */
  VAXEQ_ERR_SOLVE = 4,            /* no certified solution */
  VAXEQ_ERR_IO = 5,               /* file unreadable/unwritable, csv malformed */
  VAXEQ_ERR_ORACLE = 6,           /* best-response iteration did not settle */
  VAXEQ_ERR_INTERNAL = 7
} vaxeq_status;

VAXEQ_API const char *vaxeq_version(void);
VAXEQ_API const char *vaxeq_status_name(vaxeq_status status);
VAXEQ_API const char *vaxeq_last_error(void);

/* ---- scenarios ---------------------------------------------------------- */

VAXEQ_API vaxeq_status vaxeq_scenario_parse(const char *text, vaxeq_scenario **out);
VAXEQ_API vaxeq_status vaxeq_scenario_load(const char *path, vaxeq_scenario **out);
VAXEQ_API void vaxeq_scenario_free(vaxeq_scenario *scenario);

/* Canonical serialization; free the returned buffer with vaxeq_free_text. */
VAXEQ_API vaxeq_status vaxeq_scenario_text(const vaxeq_scenario *scenario, char **out);

VAXEQ_API int vaxeq_scenario_groups(const vaxeq_scenario *scenario);
VAXEQ_API int vaxeq_scenario_grid_points(const vaxeq_scenario *scenario);
VAXEQ_API double vaxeq_scenario_horizon(const vaxeq_scenario *scenario);
VAXEQ_API vaxeq_status vaxeq_scenario_set_grid_points(vaxeq_scenario *scenario, int grid_points);
VAXEQ_API vaxeq_status vaxeq_scenario_set_tol(vaxeq_scenario *scenario, double tol);

/* Output file names for this scenario (override or stem-derived default).
 * `which` is 0 for the CSV, 1 for the report. */
VAXEQ_API vaxeq_status vaxeq_scenario_output_name(const vaxeq_scenario *scenario, int which,
                                                  char **out);

/* ---- solving ------------------------------------------------------------ */

/* Solves every grid node and extracts the bound multipliers. parallel != 0
 * solves nodes concurrently from a fixed initial point instead of
 * warm-starting. */
VAXEQ_API vaxeq_status vaxeq_solve(const vaxeq_scenario *scenario, int parallel,
                                   vaxeq_solution **out);
VAXEQ_API void vaxeq_solution_free(vaxeq_solution *solution);

VAXEQ_API int vaxeq_solution_nodes(const vaxeq_solution *solution);
VAXEQ_API int vaxeq_solution_groups(const vaxeq_solution *solution);
VAXEQ_API vaxeq_status vaxeq_solution_node_time(const vaxeq_solution *solution, int node,
                                                double *t);
/* Strategy and multipliers at one (node, group); any output pointer may be
 * NULL. */
VAXEQ_API vaxeq_status vaxeq_solution_value(const vaxeq_solution *solution, int node, int group,
                                            double *strategy, double *alpha, double *beta);
VAXEQ_API vaxeq_status vaxeq_solution_coverage(const vaxeq_solution *solution, int node,
                                               double *coverage);
/* Largest certified natural residual across nodes. */
VAXEQ_API double vaxeq_solution_max_residual(const vaxeq_solution *solution);

/* ---- files -------------------------------------------------------------- */

/* Writes the per-node time series (t,group,Q,alpha,beta,u,g,coverage,regime). */
VAXEQ_API vaxeq_status vaxeq_solution_write_csv(const vaxeq_solution *solution, const char *path,
                                                long *rows_written);
/* Reads a CSV written by vaxeq_solution_write_csv back into a solution handle
 * so it can be re-verified without re-solving. */
VAXEQ_API vaxeq_status vaxeq_solution_read_csv(const vaxeq_scenario *scenario, const char *path,
                                               vaxeq_solution **out);

/* ---- verification ------------------------------------------------------- */

typedef struct vaxeq_verification {
  double kkt_residual;
  double complementarity_residual;
  double duality_gap;
  double primal_value;
  double dual_value;
  double max_natural_residual;
  double evi_identity;          /* psi(Q); ~0 at solutions */
  double evi_min_sampled;       /* min psi(P) over sampled box profiles */
  double saddle_worst_violation;
  double lagrangian_at_solution;
  int sign_conditions_pass;
  int saddle_pass;
  int evi_pass;
  int residual_pass;
  int pass; /* all pinned tolerances met */
} vaxeq_verification;

VAXEQ_API vaxeq_status vaxeq_verify(const vaxeq_solution *solution, uint64_t seed,
                                    vaxeq_verification *out);

/* Cross-checks the solution against the gradient-free best-response search:
 * no unit may improve its payoff beyond the oracle tolerance, and for up to
 * three groups the fixed-point search must land within resolution + tol of
 * the solver's answer. agrees is set to 0/1; the gap/gain outputs may be
 * NULL. */
VAXEQ_API vaxeq_status vaxeq_oracle_compare(const vaxeq_solution *solution, int *agrees,
                                            double *max_strategy_gap, double *max_payoff_gain);

/* Interpretation report (multiplier cases per node and group plus the
 * verification summary). Free with vaxeq_free_text. */
VAXEQ_API vaxeq_status vaxeq_report(const vaxeq_solution *solution, uint64_t seed, char **out);

VAXEQ_API void vaxeq_free_text(char *text);

#ifdef __cplusplus
}
#endif

#endif /* VAXEQ_H */
