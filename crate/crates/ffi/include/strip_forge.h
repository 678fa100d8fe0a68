#ifndef STRIP_FORGE_H
#define STRIP_FORGE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SfAlgo {
  SfAlgo_Nfdh = 0,
  SfAlgo_Ffdh = 1,
  SfAlgo_Steinberg = 2,
  SfAlgo_Structured = 3,
  SfAlgo_Exact = 4,
} SfAlgo;

typedef enum SfStatus {
  SfStatus_Ok = 0,
  SfStatus_NullPointer = 1,
  SfStatus_InvalidArgument = 2,
  SfStatus_Parse = 3,
  SfStatus_Infeasible = 4,
  SfStatus_Panic = 5,
} SfStatus;

typedef struct SfInstance SfInstance;

typedef struct SfPacking SfPacking;

/**
 * A placed item; `item` is the index of the item in its instance.
 */
typedef struct SfPlacement {
  size_t item;
  int64_t x;
  int64_t y;
  bool rotated;
} SfPlacement;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *sf_last_error(void);

/**
 * A new empty instance, or null if `strip_width < 1`.
 */
struct SfInstance *sf_instance_new(int64_t strip_width);

/**
 * Appends an item; its id is its index.
 *
 * # Safety
 * `inst` must be null or a live handle from this library.
 */
enum SfStatus sf_instance_add_item(struct SfInstance *inst, int64_t width, int64_t height);

/**
 * Parses a `strip-v1` document into `*out`.
 *
 * # Safety
 * `json` must be null or a NUL-terminated string; `out` must be null or writable.
 */
enum SfStatus sf_instance_from_json(const char *json, struct SfInstance **out);

/**
 * # Safety
 * `inst` must be null or a handle not yet freed.
 */
void sf_instance_free(struct SfInstance *inst);

/**
 * Number of items; 0 for null.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
size_t sf_instance_len(const struct SfInstance *inst);

/**
 * `max(⌈area/W⌉, h_max)`; 0 for null or empty instances.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
int64_t sf_lower_bound(const struct SfInstance *inst);

/**
 * Packs the instance into `*out`.
 *
 * # Safety
 * `inst` must be null or a live handle; `out` must be null or writable.
 */
enum SfStatus sf_pack(const struct SfInstance *inst, enum SfAlgo algo, struct SfPacking **out);

/**
 * # Safety
 * `p` must be null or a handle not yet freed.
 */
void sf_packing_free(struct SfPacking *p);

/**
 * Packing height; 0 for null.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
int64_t sf_packing_height(const struct SfPacking *p);

/**
 * # Safety
 * `p` must be null or a live handle.
 */
size_t sf_packing_len(const struct SfPacking *p);

/**
 * Copies placement `k` into `*out`.
 *
 * # Safety
 * `p` must be null or a live handle; `out` must be null or writable.
 */
enum SfStatus sf_packing_get(const struct SfPacking *p, size_t k, struct SfPlacement *out);

/**
 * Counts violations of `p` against `inst` into `*violations`.
 *
 * # Safety
 * Handles must be null or live; `violations` must be null or writable.
 */
enum SfStatus sf_validate(const struct SfInstance *inst,
                          const struct SfPacking *p,
                          bool allow_rotation,
                          size_t *violations);

/**
 * The packing as a `pack-v1` document; release it with [`sf_string_free`].
 * Null on failure.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
char *sf_packing_to_json(const struct SfPacking *p);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void sf_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* STRIP_FORGE_H */
