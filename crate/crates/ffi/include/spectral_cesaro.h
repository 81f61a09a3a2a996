#ifndef SPECTRAL_CESARO_H
#define SPECTRAL_CESARO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ScStatus {
  SC_STATUS_OK = 0,
  SC_STATUS_PARAMETER = 1,
  SC_STATUS_DOMAIN = 2,
  SC_STATUS_SINGULARITY = 3,
  SC_STATUS_BOUNDARY = 4,
  SC_STATUS_UNSUPPORTED = 5,
  /**
   * The output holds the best estimate available.
   */
  SC_STATUS_ACCURACY = 6,
  SC_STATUS_DATA = 7,
  SC_STATUS_PARSE = 8,
  SC_STATUS_IO = 9,
  SC_STATUS_NULL_POINTER = 10,
  SC_STATUS_PANIC = 11,
} ScStatus;

typedef enum ScKernelKind {
  SC_KERNEL_KIND_HEAT = 0,
  SC_KERNEL_KIND_SCHRODINGER = 1,
  SC_KERNEL_KIND_CYLINDER = 2,
  SC_KERNEL_KIND_WIGHTMAN = 3,
} ScKernelKind;

typedef enum ScCase {
  SC_CASE_LINE = 0,
  SC_CASE_INTERVAL = 1,
} ScCase;

typedef enum ScMethod {
  SC_METHOD_SPECTRAL_SUM = 0,
  SC_METHOD_CLOSED_FORM = 1,
  SC_METHOD_IMAGE_SUM = 2,
} ScMethod;

/**
 * Opaque spectral measure.
 */
typedef struct ScMeasure ScMeasure;

/**
 * Opaque test function.
 */
typedef struct ScTestFunction ScTestFunction;

typedef struct ScComplex {
  double re;
  double im;
} ScComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *sc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sc_version(void);

/**
 * Builds a measure from `n` atoms at strictly increasing `positions`.
 * `weights_im` may be null for real weights.
 *
 * # Safety
 * `positions` and `weights_re` (and `weights_im` unless null) must point to
 * `n` doubles; `out` must be writable.
 */
enum ScStatus sc_measure_from_atoms(const double *positions,
                                    const double *weights_re,
                                    const double *weights_im,
                                    size_t n,
                                    double support_lower_bound,
                                    struct ScMeasure **out);

/**
 * Releases a measure. Null is ignored.
 *
 * # Safety
 * `m` must come from `sc_measure_from_atoms` and not be freed twice.
 */
void sc_measure_free(struct ScMeasure *m);

/**
 * Riesz mean of order `k` at `lambda`.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum ScStatus sc_riesz_mean(const struct ScMeasure *m,
                            size_t k,
                            double lambda,
                            struct ScComplex *out);

/**
 * Pairing of the measure with `phi(eps·)`.
 *
 * # Safety
 * `m` and `phi` must be live handles and `out` writable.
 */
enum ScStatus sc_smear_measure(const struct ScMeasure *m,
                               const struct ScTestFunction *phi,
                               double eps,
                               struct ScComplex *out);

/**
 * `exp(−((x − center)/width)²)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum ScStatus sc_test_function_gaussian(double center, double width, struct ScTestFunction **out);

/**
 * Smooth bump supported on `[a, b]`.
 *
 * # Safety
 * `out` must be writable.
 */
enum ScStatus sc_test_function_bump(double a, double b, struct ScTestFunction **out);

/**
 * `exp(−rate·x)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum ScStatus sc_test_function_exponential(double rate, struct ScTestFunction **out);

/**
 * # Safety
 * `phi` must be a live handle and `out` writable.
 */
enum ScStatus sc_test_function_eval(const struct ScTestFunction *phi, double x, double *out);

/**
 * Releases a test function. Null is ignored.
 *
 * # Safety
 * `phi` must come from an `sc_test_function_*` constructor and not be freed
 * twice.
 */
void sc_test_function_free(struct ScTestFunction *phi);

/**
 * Evaluates a Green kernel. `kind`, `kase` and `method` take the values of
 * `ScKernelKind`, `ScCase` and `ScMethod`.
 *
 * # Safety
 * `out` must be writable.
 */
enum ScStatus sc_kernel(int32_t kind,
                        int32_t kase,
                        int32_t method,
                        double t,
                        double x,
                        double y,
                        struct ScComplex *out);

/**
 * Sign pattern `P(t, x, y) ∈ {−1, 0, 1}` of the interval Wightman function.
 *
 * # Safety
 * `out` must be writable.
 */
enum ScStatus sc_wightman_p(double t, double x, double y, int32_t *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum ScStatus sc_density_free_line(double x, double y, double lambda, double *out);

/**
 * Free-space spectral density for points of dimension `d`.
 *
 * # Safety
 * `x` and `y` must point to `d` doubles and `out` must be writable.
 */
enum ScStatus sc_density_free_space(const double *x,
                                    const double *y,
                                    size_t d,
                                    double lambda,
                                    double *out);

/**
 * Dirichlet interval staircase; `terms` (nullable) receives the number of
 * eigenvalues below `lambda`.
 *
 * # Safety
 * `out` must be writable; `terms` null or writable.
 */
enum ScStatus sc_staircase_interval(double x, double y, double lambda, double *out, size_t *terms);

/**
 * Interval spectral density paired with `phi(eps·)`.
 *
 * # Safety
 * `phi` must be a live handle and `out` writable.
 */
enum ScStatus sc_density_smear_interval(double x,
                                        double y,
                                        const struct ScTestFunction *phi,
                                        double eps,
                                        double *out);

/**
 * Bessel `J_order(z)` for integer or half-integer order.
 *
 * # Safety
 * `out` must be writable.
 */
enum ScStatus sc_bessel_j(double order, double z, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPECTRAL_CESARO_H */
