#ifndef KLOOSTAT_H
#define KLOOSTAT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Result of every fallible call.
 */
typedef enum KlsStatus {
  KLS_STATUS_OK = 0,
  KLS_STATUS_INVALID_ARGUMENT = 1,
  KLS_STATUS_NOT_PRIME = 2,
  KLS_STATUS_OUT_OF_RANGE = 3,
  KLS_STATUS_FORMAT = 4,
  KLS_STATUS_IO = 5,
  /**
   * A computed value violated a proven property.
   */
  KLS_STATUS_ASSERTION = 6,
  KLS_STATUS_EMPTY_SET = 7,
  KLS_STATUS_NULL_POINTER = 8,
  KLS_STATUS_PANIC = 9,
} KlsStatus;

/**
 * Algorithm codes for `kls_table_compute`.
 */
typedef enum KlsMethod {
  /**
   * Direct O(p^2) sum; rejected above 2^17.
   */
  KLS_METHOD_NAIVE = 0,
  /**
   * Chirp-z transform, O(p log p).
   */
  KLS_METHOD_BATCH = 1,
  /**
   * Generator-reindexed transform, O(p log p).
   */
  KLS_METHOD_RADER = 2,
} KlsMethod;

/**
 * The field F_p with its lookup tables.
 */
typedef struct KlsContext KlsContext;

/**
 * K_p(a) and psi_p(a) for a = 1..p-1, with the field they live in.
 */
typedef struct KlsTable KlsTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *kls_version(void);

/**
 * Message for the last failed call on this thread; empty if none. Valid
 * until the next failing call on this thread.
 */
const char *kls_last_error_message(void);

/**
 * 1 if `m` is prime, else 0.
 */
int32_t kls_is_prime(uint64_t m);

/**
 * Creates the field F_p. `with_dlog` nonzero also builds the discrete-log
 * table.
 */
enum KlsStatus kls_context_new(uint64_t p, int32_t with_dlog, struct KlsContext **out);

/**
 * Releases a context; null is ignored.
 */
void kls_context_free(struct KlsContext *ctx);

/**
 * The prime of a context, or 0 for null.
 */
uint64_t kls_context_prime(const struct KlsContext *ctx);

/**
 * Computes K_p(a) for all a and certifies the Weil bound. `method` is a
 * `KlsMethod` code.
 */
enum KlsStatus kls_table_compute(const struct KlsContext *ctx,
                                 uint32_t method,
                                 struct KlsTable **out);

/**
 * Releases a table; null is ignored.
 */
void kls_table_free(struct KlsTable *table);

/**
 * The prime of a table, or 0 for null.
 */
uint64_t kls_table_prime(const struct KlsTable *table);

/**
 * Number of entries, p - 1, or 0 for null.
 */
uintptr_t kls_table_len(const struct KlsTable *table);

/**
 * Borrowed pointer to K_p(1), ..., K_p(p - 1); valid while the table lives.
 */
const double *kls_table_values(const struct KlsTable *table);

/**
 * Borrowed pointer to psi_p(1), ..., psi_p(p - 1); valid while the table lives.
 */
const double *kls_table_angles(const struct KlsTable *table);

/**
 * K_p(a) for a in 1..p-1.
 */
enum KlsStatus kls_table_value(const struct KlsTable *table, uint64_t a, double *out);

/**
 * Writes the table in KLST format, atomically.
 */
enum KlsStatus kls_table_write(const struct KlsTable *table, const char *path);

/**
 * Reads a KLST file. `expected_p` of 0 accepts any prime.
 */
enum KlsStatus kls_table_read(const char *path, uint64_t expected_p, struct KlsTable **out);

/**
 * max_a |K_p(a)| / (2 sqrt p).
 */
enum KlsStatus kls_weil_ratio(const struct KlsTable *table, double *out);

/**
 * #{a : alpha <= psi_p(a) <= beta}.
 */
enum KlsStatus kls_window_count(const struct KlsTable *table,
                                double alpha,
                                double beta,
                                uint64_t *out);

/**
 * Sato-Tate measure of [alpha, beta].
 */
enum KlsStatus kls_sato_tate_measure(double alpha, double beta, double *out);

/**
 * Exact sup over beta of |#{psi <= beta} - p mu(0, beta)|.
 */
enum KlsStatus kls_niederreiter_deviation(const struct KlsTable *table, double *out);

/**
 * sum over a in the window of e_p(lambda a), as (re, im).
 */
enum KlsStatus kls_exp_sum(const struct KlsTable *table,
                           uint64_t lambda,
                           double alpha,
                           double beta,
                           double *out_re,
                           double *out_im);

/**
 * Ordered pairs (u, v) in U x V with u + v in the window. Elements are
 * reduced mod p, deduplicated, and must be nonzero.
 */
enum KlsStatus kls_sumset_count(const struct KlsTable *table,
                                const uint64_t *u,
                                uintptr_t u_len,
                                const uint64_t *v,
                                uintptr_t v_len,
                                double alpha,
                                double beta,
                                uint64_t *out);

/**
 * Nonlinearity of the sign function on n = floor(log2 p) bits.
 */
enum KlsStatus kls_nonlinearity(const struct KlsTable *table, uint64_t *out_nl, uint32_t *out_n);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KLOOSTAT_H */
