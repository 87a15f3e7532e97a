#ifndef ENVLOCK_H
#define ENVLOCK_H

/* Generated by cbindgen; edit the Rust source instead. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status of a call. Mirrors the CLI exit codes, with 4 reserved for
 * boundary misuse (null pointers, non-UTF-8 input).
 */
typedef enum EnvlockStatus {
  EnvlockStatus_Ok = 0,
  EnvlockStatus_ProtocolRejection = 1,
  EnvlockStatus_InvariantViolation = 2,
  EnvlockStatus_InputError = 3,
  EnvlockStatus_BoundaryMisuse = 4,
} EnvlockStatus;

/**
 * An opaque parsed scenario.
 */
typedef struct EnvlockScenario EnvlockScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Release a string returned by any `out` parameter.
 */
void envlock_string_free(char *ptr);

/**
 * Library version as a static string; do not free.
 */
const char *envlock_version(void);

/**
 * Parse and validate a scenario JSON document. Returns null on failure
 * and, when `out_error` is non-null, a diagnostic string.
 */
struct EnvlockScenario *envlock_scenario_parse(const char *json, char **out_error);

void envlock_scenario_free(struct EnvlockScenario *handle);

/**
 * Override the seed of a parsed scenario.
 */
enum EnvlockStatus envlock_scenario_set_seed(struct EnvlockScenario *handle, uint64_t seed);

/**
 * Run a parsed scenario; `out_report` receives the report JSON.
 */
enum EnvlockStatus envlock_scenario_run(const struct EnvlockScenario *handle, char **out_report);

/**
 * One-shot convenience: parse and run in a single call.
 */
enum EnvlockStatus envlock_run_scenario_json(const char *json, char **out_report);

/**
 * Four-property audit of the account-based model for one account class
 * ("eoa" | "erc4337" | "eip7702"); `out_verdict` receives the verdict JSON.
 */
enum EnvlockStatus envlock_audit_ablm(const char *class_, char **out_verdict);

/**
 * Four-property audit of the envelope registry; bounded adversarial
 * search to `depth` operations, optionally against the build with an
 * unrestricted admin.
 */
enum EnvlockStatus envlock_audit_pslm(uintptr_t depth, bool violate_as7, char **out_verdict);

/**
 * Owner-only escape trace against an active restriction for one account
 * class; `out_trace` receives the trace JSON.
 */
enum EnvlockStatus envlock_ks_escape(const char *class_, char **out_trace);

/**
 * Evaluate a condition tree JSON against an oracle snapshot JSON.
 * `out_result` receives `{"result": bool, "cond_hash": hex}` on success.
 */
enum EnvlockStatus envlock_eval_tree(const char *tree_json,
                                     const char *snapshot_json,
                                     char **out_result);

/**
 * Per-environment cost and break-even table at an annual custody rate in
 * parts per million; `out_table` receives the rows as JSON.
 */
enum EnvlockStatus envlock_econ_table(uint64_t r_custody_ppm, bool aggregated, char **out_table);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENVLOCK_H */
