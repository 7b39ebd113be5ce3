#ifndef CLUSTERED_HETNET_H
#define CLUSTERED_HETNET_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by every fallible function.
 */
typedef enum ChnStatus {
  CHN_STATUS_OK = 0,
  CHN_STATUS_NULL_POINTER = 1,
  CHN_STATUS_INVALID_UTF8 = 2,
  /**
   * The configuration failed to parse or validate.
   */
  CHN_STATUS_CONFIG = 3,
  /**
   * An argument is outside the domain of the operation.
   */
  CHN_STATUS_DOMAIN = 4,
  CHN_STATUS_NON_CONVERGENCE = 5,
  /**
   * The output buffer is shorter than required.
   */
  CHN_STATUS_BUFFER_TOO_SMALL = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  CHN_STATUS_PANIC = 7,
} ChnStatus;

/**
 * Opaque network handle.
 */
typedef struct ChnNetwork ChnNetwork;

/**
 * Coverage at one threshold.
 */
typedef struct ChnCoverage {
  double tau_db;
  double total;
  double lower_bound;
  double upper_bound;
  /**
   * Valid only when `has_ppp_limit` is true.
   */
  double ppp_limit;
  bool has_ppp_limit;
} ChnCoverage;

/**
 * Monte Carlo coverage estimate with its Wilson half-width.
 */
typedef struct ChnSimEstimate {
  double mean;
  double half_width;
  uint64_t trials;
  uint64_t seed;
} ChnSimEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses TOML configuration text into a new handle stored in `*out`.
 *
 * # Safety
 * `toml_text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ChnStatus chn_network_from_toml(const char *toml_text, struct ChnNetwork **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `net` must come from `chn_network_from_toml` and not be used afterwards.
 */
void chn_network_free(struct ChnNetwork *net);

/**
 * Number of Poisson tiers `K`; association arrays hold `K + 1` entries. Returns 0 for null.
 *
 * # Safety
 * `net` must be null or a live handle.
 */
size_t chn_network_num_tiers(const struct ChnNetwork *net);

/**
 * Coverage, bounds and independent-user limit at `tau_db`.
 *
 * # Safety
 * `net` must be a live handle and `out` a valid pointer.
 */
enum ChnStatus chn_coverage(const struct ChnNetwork *net, double tau_db, struct ChnCoverage *out);

/**
 * Writes association probabilities of tiers `0..=K` into `out[0..=K]`.
 *
 * # Safety
 * `out` must point to at least `len` doubles.
 */
enum ChnStatus chn_association(const struct ChnNetwork *net, double *out, size_t len);

/**
 * Monte Carlo estimate at `tau_db` using the handle's simulation settings
 * with `trials` and `seed` substituted.
 *
 * # Safety
 * `net` must be a live handle and `out` a valid pointer.
 */
enum ChnStatus chn_simulate(const struct ChnNetwork *net,
                            double tau_db,
                            uint64_t trials,
                            uint64_t seed,
                            struct ChnSimEstimate *out);

/**
 * Open-access interference factor `G(alpha, tau)` with `tau` linear.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ChnStatus chn_interference_factor_g(double alpha, double tau, double *out);

/**
 * Closed-access interference factor `H(alpha, tau)` with `tau` linear.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ChnStatus chn_closed_access_factor_h(double alpha, double tau, double *out);

/**
 * Message of the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next call into this library on the same thread.
 */
const char *chn_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *chn_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CLUSTERED_HETNET_H */
