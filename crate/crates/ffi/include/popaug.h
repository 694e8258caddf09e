#ifndef POPAUG_H
#define POPAUG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum PopaugStatus {
  POPAUG_STATUS_OK = 0,
  /**
   * The instance admits no popular matching, or no augmentation plan.
   */
  POPAUG_STATUS_NOT_FOUND = 1,
  POPAUG_STATUS_NULL_POINTER = 2,
  POPAUG_STATUS_INVALID_UTF8 = 3,
  POPAUG_STATUS_PARSE_ERROR = 4,
  POPAUG_STATUS_INVALID_ARGUMENT = 5,
  POPAUG_STATUS_LIMIT_EXCEEDED = 6,
  POPAUG_STATUS_INTERNAL = 7,
} PopaugStatus;

typedef enum PopaugAugmentMode {
  /**
   * Strict lists of length at most two.
   */
  POPAUG_AUGMENT_MODE_LENGTH2 = 0,
  /**
   * Exhaustive search over copy vectors.
   */
  POPAUG_AUGMENT_MODE_EXACT = 1,
} PopaugAugmentMode;

/**
 * A validated instance with a last-resort item for every person.
 */
typedef struct PopaugInstance PopaugInstance;

/**
 * A matching of the instance it was parsed against or solved for.
 */
typedef struct PopaugMatching PopaugMatching;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *popaug_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void popaug_string_free(char *s);

/**
 * Parses an instance from NUL-terminated UTF-8 text. Last-resort items are
 * added when the text does not enable them.
 *
 * # Safety
 * `text` must be null or NUL-terminated; `out` must be null or writable.
 */
enum PopaugStatus popaug_instance_parse(const char *text, struct PopaugInstance **out);

/**
 * Releases an instance. Null is ignored.
 *
 * # Safety
 * `inst` must be null or a handle from [`popaug_instance_parse`], not yet freed.
 */
void popaug_instance_free(struct PopaugInstance *inst);

/**
 * Number of people, or 0 for a null handle.
 *
 * # Safety
 * `inst` must be null or a live instance handle.
 */
size_t popaug_instance_num_people(const struct PopaugInstance *inst);

/**
 * Serializes an instance in the text format.
 *
 * # Safety
 * `inst` must be null or a live instance handle; `out` must be null or writable.
 */
enum PopaugStatus popaug_instance_to_string(const struct PopaugInstance *inst, char **out);

/**
 * Parses a matching of `inst` from `<person> -> <item>` lines.
 *
 * # Safety
 * Pointers must be null or valid as for [`popaug_instance_parse`].
 */
enum PopaugStatus popaug_matching_parse(const struct PopaugInstance *inst,
                                        const char *text,
                                        struct PopaugMatching **out);

/**
 * Releases a matching. Null is ignored.
 *
 * # Safety
 * `m` must be null or a matching handle from this library, not yet freed.
 */
void popaug_matching_free(struct PopaugMatching *m);

/**
 * Serializes `m` as a matching file of `inst`.
 *
 * # Safety
 * Handles must be null or live; `out` must be null or writable.
 */
enum PopaugStatus popaug_matching_to_string(const struct PopaugInstance *inst,
                                            const struct PopaugMatching *m,
                                            char **out);

/**
 * Computes a min-cost popular matching, of maximum cardinality among popular
 * matchings when `max_card` is set. Returns `NotFound` when none exists.
 *
 * # Safety
 * `inst` must be null or live; `out_matching` and `out_cost` must be null or writable.
 */
enum PopaugStatus popaug_min_cost_popular(const struct PopaugInstance *inst,
                                          bool max_card,
                                          struct PopaugMatching **out_matching,
                                          uint64_t *out_cost);

/**
 * Decides whether `m` is popular in `inst`.
 *
 * # Safety
 * Handles must be null or live; `out` must be null or writable.
 */
enum PopaugStatus popaug_is_popular(const struct PopaugInstance *inst,
                                    const struct PopaugMatching *m,
                                    bool *out);

/**
 * Computes a min-cost augmentation plan. The plan text has one
 * `<item> +<count>` line per item receiving copies, then `total <cost>`.
 * `max_states` bounds the exact search and is ignored in length-2 mode;
 * `perfect` requires exact mode. Returns `NotFound` when no plan exists.
 *
 * # Safety
 * `inst` must be null or live; `out_plan` and `out_cost` must be null or writable.
 */
enum PopaugStatus popaug_augment(const struct PopaugInstance *inst,
                                 enum PopaugAugmentMode mode,
                                 bool perfect,
                                 size_t max_states,
                                 char **out_plan,
                                 uint64_t *out_cost);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POPAUG_H */
