#ifndef INTCX_H
#define INTCX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by every function.
 */
typedef enum IcxStatus {
  ICX_STATUS_OK = 0,
  ICX_STATUS_NULL_POINTER = 1,
  ICX_STATUS_INVALID_ARGUMENT = 2,
  ICX_STATUS_OUT_OF_RANGE = 3,
  ICX_STATUS_IO = 4,
  ICX_STATUS_FORMAT = 5,
  ICX_STATUS_INCONSISTENT = 6,
  ICX_STATUS_BUFFER_TOO_SMALL = 7,
  ICX_STATUS_PARSE = 8,
  ICX_STATUS_PANIC = 9,
} IcxStatus;

typedef enum IcxStop {
  ICX_STOP_NICE = 0,
  ICX_STOP_BELOW_DIVISOR = 1,
  ICX_STOP_BUDGET = 2,
} IcxStop;

/**
 * Exact `f(n)` for `1 <= n <= limit`.
 */
typedef struct IcxTable IcxTable;

typedef struct IcxDbrSummary {
  uint64_t b;
  uint32_t i;
  uint32_t j;
  uint64_t dsum;
  uint64_t m0;
  uint64_t m1;
  uint64_t m2;
  double alpha;
  double cavg_ln;
  double cavg_log3;
} IcxDbrSummary;

typedef struct IcxExploreSummary {
  uint64_t bits;
  uint32_t iterations;
  enum IcxStop stop;
  /**
   * Upper bound on `f(n)`: division costs plus binary Horner on the last value.
   */
  uint64_t bound;
  uint64_t final_bits;
  uint64_t final_ones;
  uint32_t mod3;
  uint32_t mod5;
  uint32_t mod7;
  uint32_t mod11;
} IcxExploreSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *icx_last_error(void);

/**
 * Computes `f(1..=limit)` into a new handle.
 *
 * # Safety
 * `out` must be a valid pointer to write a handle into.
 */
enum IcxStatus icx_table_compute(uint64_t limit, struct IcxTable **out);

/**
 * Reads an ICX1 table file.
 *
 * # Safety
 * `path` must be a nul-terminated string and `out` a valid pointer.
 */
enum IcxStatus icx_table_load(const char *path, struct IcxTable **out);

/**
 * Writes `table` as an ICX1 file.
 *
 * # Safety
 * `table` must come from this library; `path` must be nul-terminated.
 */
enum IcxStatus icx_table_save(const struct IcxTable *table, const char *path);

/**
 * Stores `f(n)` in `out`.
 *
 * # Safety
 * `table` must come from this library; `out` must be valid.
 */
enum IcxStatus icx_table_get(const struct IcxTable *table, uint64_t n, uint8_t *out);

/**
 * Largest `n` covered, or 0 for a null handle.
 *
 * # Safety
 * `table` must be null or come from this library.
 */
uint64_t icx_table_limit(const struct IcxTable *table);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `table` must be null or an unfreed handle from this library.
 */
void icx_table_free(struct IcxTable *table);

/**
 * Writes a minimal expression for `n` as a nul-terminated string. `needed`
 * receives the buffer size required, terminator included; a short buffer
 * gives `BufferTooSmall` and leaves `buf` untouched.
 *
 * # Safety
 * `buf` must hold `len` bytes (or be null with `len == 0`); `needed` may be null.
 */
enum IcxStatus icx_witness(const struct IcxTable *table,
                           uint64_t n,
                           char *buf,
                           size_t len,
                           size_t *needed);

/**
 * D-hat row summary for the base `2^i 3^j`; `table` must cover the base.
 * m-values that do not fit 64 bits give `OutOfRange`.
 *
 * # Safety
 * `table` must come from this library; `out` must be valid.
 */
enum IcxStatus icx_dbr_summary(const struct IcxTable *table,
                               uint32_t i,
                               uint32_t j,
                               struct IcxDbrSummary *out);

/**
 * Steinerberger greedy upper bound `g(n)`.
 *
 * # Safety
 * `out` must be valid.
 */
enum IcxStatus icx_greedy(uint64_t n, uint32_t *out);

/**
 * Binary Horner constant per `log_3 n` for ones-fraction `p1`.
 *
 * # Safety
 * `out` must be valid.
 */
enum IcxStatus icx_guy_constant(double p1, double *out);

/**
 * Bernoulli KL divergence `D(p || q)` in nats.
 *
 * # Safety
 * `out` must be valid.
 */
enum IcxStatus icx_kl_bernoulli(double p, double q, double *out);

/**
 * Parses `expr` (for example `2^102-2^100-2`) and runs the strip-and-divide
 * chain with divisor `d` and threshold `t`.
 *
 * # Safety
 * `expr` must be nul-terminated; `out` must be valid.
 */
enum IcxStatus icx_explore(const char *expr,
                           uint64_t d,
                           double t,
                           uint32_t max_steps,
                           struct IcxExploreSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INTCX_H */
