#ifndef QFRAC_H
#define QFRAC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Which left or right operator a call evaluates.
typedef enum QfracOperator {
  QFRAC_OPERATOR_INTEGRAL = 0,
  QFRAC_OPERATOR_RIEMANN = 1,
  QFRAC_OPERATOR_CAPUTO = 2,
} QfracOperator;

// Result codes shared by every entry point.
typedef enum QfracStatus {
  QFRAC_STATUS_OK = 0,
  QFRAC_STATUS_INVALID_ARGUMENT = 1,
  QFRAC_STATUS_DOMAIN = 2,
  QFRAC_STATUS_POLE = 3,
  QFRAC_STATUS_NON_CONVERGENCE = 4,
  QFRAC_STATUS_NULL_POINTER = 5,
  QFRAC_STATUS_PANIC = 6,
} QfracStatus;

// Opaque: an evaluable solution of a homogeneous Caputo IVP.
typedef struct QfracIvpSolution QfracIvpSolution;

// Opaque: a value of `q` plus the truncation policy.
typedef struct QfracParams QfracParams;

// `f(x, user)`; must not unwind.
typedef double (*QfracFn)(double x, void *user);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL after a success.
// The pointer stays valid until the next call on the same thread.
const char *qfrac_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *qfrac_version(void);

// Parameters for `0 < q < 1` with the default truncation policy.
//
// # Safety
// `out` must be valid for writes.
enum QfracStatus qfrac_params_new(double q, struct QfracParams **out);

// Parameters with an explicit relative tolerance and term cap.
//
// # Safety
// `out` must be valid for writes.
enum QfracStatus qfrac_params_with_truncation(double q,
                                              double rel_tol,
                                              size_t max_terms,
                                              struct QfracParams **out);

// Releases a parameter handle. NULL is ignored.
//
// # Safety
// `p` must come from `qfrac_params_new*` and not be used afterwards.
void qfrac_params_free(struct QfracParams *p);

// # Safety
// `p` must be a live handle or NULL; `out` valid for writes.
enum QfracStatus qfrac_params_q(const struct QfracParams *p, double *out);

// `Gamma_q(alpha)`.
//
// # Safety
// `p` must be a live handle or NULL; `out` valid for writes.
enum QfracStatus qfrac_gamma(const struct QfracParams *p, double alpha, double *out);

// `(t - s)_q^alpha`.
//
// # Safety
// `p` must be a live handle or NULL; `out` valid for writes.
enum QfracStatus qfrac_factorial_power(const struct QfracParams *p,
                                       double t,
                                       double s,
                                       double alpha,
                                       double *out);

// `e_q(t)`.
//
// # Safety
// `p` must be a live handle or NULL; `out` valid for writes.
enum QfracStatus qfrac_exp_e(const struct QfracParams *p, double t, double *out);

// `E_q(t)`, `|t| < 1`.
//
// # Safety
// `p` must be a live handle or NULL; `out` valid for writes.
enum QfracStatus qfrac_exp_big_e(const struct QfracParams *p, double t, double *out);

// `E_{alpha,beta}(lambda, z - z0)`.
//
// # Safety
// `p` must be a live handle or NULL; `out` valid for writes.
enum QfracStatus qfrac_mittag_leffler(const struct QfracParams *p,
                                      double alpha,
                                      double beta,
                                      double lambda,
                                      double z0,
                                      double z,
                                      double *out);

// Left operator with lower limit `a` applied to `f`, evaluated at `t`.
//
// # Safety
// `p` must be a live handle or NULL; `out` valid for writes; `f` callable
// with `user` for the duration of the call.
enum QfracStatus qfrac_left(const struct QfracParams *p,
                            enum QfracOperator op,
                            QfracFn f,
                            void *user,
                            double a,
                            double alpha,
                            double t,
                            double *out);

// Right operator with upper limit `b` (may be `INFINITY`) applied to `f`.
//
// # Safety
// As for [`qfrac_left`].
enum QfracStatus qfrac_right(const struct QfracParams *p,
                             enum QfracOperator op,
                             QfracFn f,
                             void *user,
                             double b,
                             double alpha,
                             double t,
                             double *out);

// Solves `C_a^alpha y = lambda y`, `y(a) = a0`. `picard_iterations == 0`
// selects the closed form; otherwise the Picard iterate of that index.
//
// # Safety
// `p` must be a live handle or NULL; `out` valid for writes.
enum QfracStatus qfrac_ivp_solve(const struct QfracParams *p,
                                 double alpha,
                                 double lambda,
                                 double a,
                                 double a0,
                                 uint32_t picard_iterations,
                                 struct QfracIvpSolution **out);

// `y(t)`. Solutions are immutable and may be shared between threads.
//
// # Safety
// `sol` must be a live handle or NULL; `out` valid for writes.
enum QfracStatus qfrac_ivp_evaluate(const struct QfracIvpSolution *sol, double t, double *out);

// Releases a solution handle. NULL is ignored.
//
// # Safety
// `sol` must come from [`qfrac_ivp_solve`] and not be used afterwards.
void qfrac_ivp_free(struct QfracIvpSolution *sol);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QFRAC_H */
