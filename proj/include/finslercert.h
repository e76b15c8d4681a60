/* C interface to the metric certification library. All entry points return a
 * status code; outputs travel through pointers. Handles are opaque and owned
 * by the caller via the matching destroy function. Strings returned through
 * char** are heap-allocated and must be released with fc_string_free.
 *
 * On any non-FC_OK return, fc_last_error() describes the failure; the
 * message is thread-local and valid until the next API call on that thread.
 */

#ifndef FINSLERCERT_H
#define FINSLERCERT_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fc_status {
  FC_OK = 0,
  FC_ERR_ARGUMENT = 1,   /* precondition violated by the caller */
  FC_ERR_DOMAIN = 2,     /* input outside the metric's domain of definition */
  FC_ERR_CONVEXITY = 3,  /* fundamental tensor not positive definite */
  FC_ERR_NUMERIC = 4,    /* iteration or quadrature failed to converge */
  FC_ERR_ESTIMATION = 5, /* degenerate system, constant not recoverable */
  FC_ERR_IO = 6,         /* reserved for callers mapping file failures */
  FC_ERR_NOMEM = 7,
  FC_ERR_INTERNAL = 8
} fc_status;

typedef struct fc_metric fc_metric;
typedef struct fc_trace fc_trace;

/* Message for the most recent failure on this thread; never NULL. */
const char* fc_last_error(void);

void fc_string_free(char* s);

/* name is one of: "family", "funk", "euclidean", "perturbed". k and c are
 * read for "family" and "perturbed" and ignored otherwise. 2 <= dim <= 8. */
fc_status fc_metric_create(const char* name, double k, double c, int dim,
                           fc_metric** out);
void fc_metric_destroy(fc_metric* m);

/* Any out pointer may be NULL to skip that field. claimed_flat is 1 for
 * metrics asserted to satisfy every flatness condition, 0 for controls. */
fc_status fc_metric_info(const fc_metric* m, double* out_k, double* out_c,
                         int* out_dim, int* out_claimed_flat,
                         double* out_domain_radius);

/* Metric value at base point x with tangent y, both of length dim. */
fc_status fc_metric_eval(const fc_metric* m, const double* x, const double* y,
                         int dim, double* out_value);

/* Runs the full certification suite (convexity, coupled at the estimated
 * constant, dual flatness in ambient and reduced form, the straight-line
 * condition) over count seeded samples. out_json receives the report array.
 * out_as_expected is 1 when a claimed-flat metric passes everything or a
 * control fails everything decisively. */
fc_status fc_certify_run(const fc_metric* m, uint64_t seed, int count,
                         double tol, char** out_json, double* out_c_hat,
                         double* out_c_spread, int* out_as_expected);

/* Verifies the closed-form solution chain at (k, c): profile ODE, identity
 * suite, quadrature reconstruction. */
fc_status fc_classify_run(double k, double c, int dim, uint64_t seed,
                          int count, char** out_json, int* out_all_pass);

/* AD-vs-finite-difference harness. inject_fault != 0 deliberately biases one
 * derivative so callers can verify the harness catches it. */
fc_status fc_selftest_run(double fd_step, int points_per_metric, uint64_t seed,
                          int inject_fault, char** out_json, int* out_pass);

/* Integrates the geodesic from (x0, y0) over t_end with the given number of
 * fixed Runge-Kutta steps. The trace may stop early at the domain boundary;
 * that is reported through fc_trace_info, not as an error. */
fc_status fc_geodesic_run(const fc_metric* m, const double* x0,
                          const double* y0, int dim, double t_end, int steps,
                          fc_trace** out);
void fc_trace_destroy(fc_trace* t);

fc_status fc_trace_info(const fc_trace* t, int* out_points, int* out_truncated);

/* CSV with header t,x1..xn,xd1..xdn, 17 significant digits per field. */
fc_status fc_trace_csv(const fc_trace* t, char** out_csv);

/* Worst chord deviation of the base points, normalized by chord length. */
fc_status fc_trace_straightness(const fc_trace* t, double* out_residual);

#ifdef __cplusplus
}
#endif

#endif /* FINSLERCERT_H */
