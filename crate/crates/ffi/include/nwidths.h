#ifndef NWIDTHS_H
#define NWIDTHS_H

#include <stddef.h>
#include <stdint.h>

#define NW_OK 0

#define NW_ERR_NULL_POINTER 1

#define NW_ERR_USAGE 2

#define NW_ERR_INVALID_PARAMS 3

#define NW_ERR_NOT_COMPACT 10

#define NW_ERR_LIMITING_CASE 11

#define NW_ERR_HYPOTHESIS_FAILURE 12

#define NW_ERR_BOUNDARY_CASE 13

#define NW_ERR_UNSUPPORTED_REGION 20

#define NW_ERR_ORACLE_TOO_LARGE 21

#define NW_ERR_INVALID_QUERY 23

#define NW_ERR_REGIME_MISMATCH 30

#define NW_ERR_INFEASIBLE_CONSTRAINTS 31

#define NW_ERR_INVALID_BUDGET 32

#define NW_ERR_INSUFFICIENT_POINTS 40

#define NW_ERR_NON_POSITIVE_VALUE 41

#define NW_ERR_INVALID_WINDOW 42

#define NW_ERR_OUT_OF_RANGE 70

#define NW_ERR_PANIC 99

#define NW_KIND_KOLMOGOROV 0

#define NW_KIND_GELFAND 1

#define NW_STRATEGY_GREEDY 0

// Step 4 or Step 3, whichever matches the regime.
#define NW_STRATEGY_PAPER 1

#define NW_STRATEGY_PAPER_STEP3 2

#define NW_STRATEGY_PAPER_STEP4 3

// Parsed embedding parameters.
typedef struct NwParams NwParams;

// A sequence of `(n, value)` points.
typedef struct NwSequence NwSequence;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parse parameters from `key=value` text or a JSON object.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
int32_t nw_params_parse(const char *text, struct NwParams **out);

// Parameters with smoothness gap `delta` (`s2 = 0`), all numbers given as
// rational strings such as `"3/4"` or `"inf"`.
//
// # Safety
// All string arguments must be NUL-terminated; `out` must be valid.
int32_t nw_params_with_delta(const char *p1,
                             const char *p2,
                             uint32_t d,
                             const char *alpha,
                             const char *delta,
                             struct NwParams **out);

// # Safety
// `params` must come from this library or be NULL.
void nw_params_free(struct NwParams *params);

// Case (1..=6 for i..vi) and exponent κ. `out_kappa_str`, when not NULL,
// receives κ as an exact rational string to be freed with `nw_string_free`.
//
// # Safety
// `params` must be a live handle; output pointers must be valid.
int32_t nw_classify(const struct NwParams *params,
                    int32_t kind,
                    int32_t *out_case,
                    double *out_kappa,
                    char **out_kappa_str);

// Model width of `id: ℓ_{p1}^N → ℓ_{p2}^N` at index `n`.
//
// # Safety
// `p1`, `p2` must be NUL-terminated; `out_value` must be valid.
int32_t nw_finite_width(int32_t kind,
                        const char *p1,
                        const char *p2,
                        uint64_t big_n,
                        uint64_t n,
                        double *out_value);

// Upper bounds on the dyadic grid between the powers of two `n_min` and
// `n_max`, with `per_octave` points per doubling.
//
// # Safety
// `params` must be a live handle; `out` must be valid.
int32_t nw_upper_bound_sequence(const struct NwParams *params,
                                int32_t kind,
                                uint64_t n_min,
                                uint64_t n_max,
                                uint32_t per_octave,
                                int32_t strategy,
                                struct NwSequence **out);

// Single-block lower bounds on the same grid as the upper bounds.
//
// # Safety
// `params` must be a live handle; `out` must be valid.
int32_t nw_lower_bound_sequence(const struct NwParams *params,
                                int32_t kind,
                                uint64_t n_min,
                                uint64_t n_max,
                                uint32_t per_octave,
                                struct NwSequence **out);

// Number of points; 0 for NULL.
//
// # Safety
// `seq` must be a live handle or NULL.
uintptr_t nw_sequence_len(const struct NwSequence *seq);

// # Safety
// `seq` must be a live handle; output pointers must be valid.
int32_t nw_sequence_get(const struct NwSequence *seq,
                        uintptr_t index,
                        uint64_t *out_n,
                        double *out_value);

// # Safety
// `seq` must come from this library or be NULL.
void nw_sequence_free(struct NwSequence *seq);

// Least-squares slope of `log2 value` against `log2 n` on `[n_min, n_max]`.
// `out_residual_rms` may be NULL.
//
// # Safety
// `seq` must be a live handle; `out_slope` must be valid.
int32_t nw_fit_slope(const struct NwSequence *seq,
                     uint64_t n_min,
                     uint64_t n_max,
                     double *out_slope,
                     double *out_residual_rms);

// Message of the last failure on this thread, empty after a success. The
// pointer stays valid until the next call into this library on the thread.
const char *nw_last_error_message(void);

// # Safety
// `s` must come from this library or be NULL.
void nw_string_free(char *s);

const char *nw_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NWIDTHS_H */
