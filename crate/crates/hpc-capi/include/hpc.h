/* C interface to the hairpin-completion library. Generated by cbindgen. */

#ifndef HPC_H
#define HPC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every interface function.
 */
typedef enum HpcStatus {
  /**
   * Success; out-parameters are valid.
   */
  HPC_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  HPC_STATUS_NULL_ARGUMENT = 1,
  /**
   * An input string was not valid UTF-8.
   */
  HPC_STATUS_INVALID_UTF8 = 2,
  /**
   * The instance JSON was rejected; see `hpc_last_error`.
   */
  HPC_STATUS_INVALID_INSTANCE = 3,
  /**
   * A word contained tokens outside the instance alphabet.
   */
  HPC_STATUS_INVALID_WORD = 4,
  /**
   * The request exceeds a built-in size or length guard.
   */
  HPC_STATUS_UNSUPPORTED = 5,
  /**
   * Unexpected internal failure.
   */
  HPC_STATUS_INTERNAL = 6,
} HpcStatus;

/**
 * Opaque handle for a parsed instance.
 */
typedef struct HpcInstance HpcInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses an instance description (the same JSON format the CLI reads) and
 * returns an owned handle through `out`.
 *
 * # Safety
 * `json` must point to a NUL-terminated string and `out` to a writable
 * pointer slot. The returned handle must be released with
 * `hpc_instance_free`.
 */
enum HpcStatus hpc_instance_parse_json(const char *json, struct HpcInstance **out);

/**
 * Releases an instance handle. Passing null is a no-op.
 *
 * # Safety
 * `inst` must be null or a handle obtained from `hpc_instance_parse_json`
 * that has not been freed yet.
 */
void hpc_instance_free(struct HpcInstance *inst);

/**
 * Writes the canonical JSON rendering of the instance (completed transition
 * tables, sorted alphabet) through `out`.
 *
 * # Safety
 * `inst` must be a live handle and `out` a writable pointer slot; the
 * returned string must be released with `hpc_string_free`.
 */
enum HpcStatus hpc_instance_render_json(const struct HpcInstance *inst, char **out);

/**
 * Writes a JSON array with the normalization notes recorded while parsing
 * (for example completion of partial transition tables).
 *
 * # Safety
 * `inst` must be a live handle and `out` a writable pointer slot; the
 * returned string must be released with `hpc_string_free`.
 */
enum HpcStatus hpc_instance_notes_json(const struct HpcInstance *inst, char **out);

/**
 * Runs the regularity decision battery and writes the verdict report as
 * JSON. `fast_path` toggles the precomputed-table route inside the pumping
 * tests; both routes produce identical verdicts.
 *
 * # Safety
 * `inst` must be a live handle and `out` a writable pointer slot; the
 * returned string must be released with `hpc_string_free`.
 */
enum HpcStatus hpc_decide_json(const struct HpcInstance *inst, bool fast_path, char **out);

/**
 * Writes the unambiguous linear grammar for the completion as display text.
 *
 * # Safety
 * `inst` must be a live handle and `out` a writable pointer slot; the
 * returned string must be released with `hpc_string_free`.
 */
enum HpcStatus hpc_grammar_text(const struct HpcInstance *inst, char **out);

/**
 * Writes the growth report as JSON: growth classes and indicators for the
 * completion and both inputs, bound checks, and the exact generating
 * functions (null where a size guard refuses the computation).
 *
 * # Safety
 * `inst` must be a live handle and `out` a writable pointer slot; the
 * returned string must be released with `hpc_string_free`.
 */
enum HpcStatus hpc_growth_json(const struct HpcInstance *inst, double tolerance, char **out);

/**
 * Writes a JSON array with every completion word of length at most
 * `max_len`, rendered in alphabet tokens and sorted by length then
 * lexicographically. Lengths beyond the enumeration cap are refused.
 *
 * # Safety
 * `inst` must be a live handle and `out` a writable pointer slot; the
 * returned string must be released with `hpc_string_free`.
 */
enum HpcStatus hpc_enumerate_json(const struct HpcInstance *inst, uint32_t max_len, char **out);

/**
 * Tests whether `word` (alphabet tokens, e.g. "abA") belongs to the
 * completion, writing the answer through `is_member`.
 *
 * # Safety
 * `inst` must be a live handle, `word` a NUL-terminated string, and
 * `is_member` a writable bool slot.
 */
enum HpcStatus hpc_membership(const struct HpcInstance *inst, const char *word, bool *is_member);

/**
 * Releases a string returned by this library. Passing null is a no-op.
 *
 * # Safety
 * `s` must be null or a string obtained from this library that has not been
 * freed yet.
 */
void hpc_string_free(char *s);

/**
 * Writes a copy of the current thread's last error message (empty string if
 * no error has occurred).
 *
 * # Safety
 * `out` must be a writable pointer slot; the returned string must be
 * released with `hpc_string_free`.
 */
enum HpcStatus hpc_last_error(char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* HPC_H */
