#ifndef DEBFRESH_H
#define DEBFRESH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DfActivity {
  DF_ACTIVITY_MAJOR_CHANGE = 0,
  DF_ACTIVITY_MODERATELY_ACTIVE = 1,
  DF_ACTIVITY_LIGHTLY_ACTIVE = 2,
  DF_ACTIVITY_SEDENTARY = 3,
  DF_ACTIVITY_EXCLUDED_EPOCH_MISMATCH = 4,
} DfActivity;

typedef enum DfStatus {
  DF_STATUS_OK = 0,
  DF_STATUS_NULL_ARGUMENT = 1,
  DF_STATUS_INVALID_UTF8 = 2,
  DF_STATUS_PARSE_ERROR = 3,
  DF_STATUS_UNKNOWN_PACKAGE = 4,
  DF_STATUS_CONTRACT_VIOLATION = 5,
  DF_STATUS_INDEX_OUT_OF_RANGE = 6,
  DF_STATUS_PANIC = 7,
} DfStatus;

typedef enum DfVersionClass {
  DF_VERSION_CLASS_SEMANTIC = 0,
  DF_VERSION_CLASS_EXT_SEMANTIC = 1,
  DF_VERSION_CLASS_SEMI_SEMANTIC = 2,
  DF_VERSION_CLASS_DIST_NATIVE = 3,
  DF_VERSION_CLASS_MANUAL_MAP = 4,
  DF_VERSION_CLASS_UNKNOWN = 5,
} DfVersionClass;

/**
 * Opaque parsed release snapshot.
 */
typedef struct DfSnapshot DfSnapshot;

/**
 * Opaque list of NUL-terminated strings.
 */
typedef struct DfStringList DfStringList;

/**
 * Classified version. The numeric fields are zero and meaningless when
 * `version_class` is `DF_VERSION_CLASS_UNKNOWN`.
 */
typedef struct DfSemVersion {
  enum DfVersionClass version_class;
  uint64_t epoch;
  uint64_t major;
  uint64_t minor;
  uint64_t patch;
} DfSemVersion;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *df_last_error(void);

/**
 * dpkg ordering of two version strings: `*out` is -1, 0 or 1.
 *
 * # Safety
 * `a` and `b` must be NUL-terminated strings, `out` writable.
 */
enum DfStatus df_version_compare(const char *a, const char *b, int *out);

/**
 * Classifies `version` of `package` with the bundled manual rules.
 *
 * # Safety
 * `package` and `version` must be NUL-terminated strings, `out` writable.
 */
enum DfStatus df_classify(const char *package, const char *version, struct DfSemVersion *out);

/**
 * Activity label between two classified versions. Either side being
 * Unknown is `DF_STATUS_CONTRACT_VIOLATION`.
 *
 * # Safety
 * All pointers must be valid.
 */
enum DfStatus df_pvac(const struct DfSemVersion *a,
                      const struct DfSemVersion *b,
                      enum DfActivity *out);

/**
 * Weighted version delta from `packaged` to upstream `major.minor.patch`.
 *
 * # Safety
 * `packaged` must be valid and `out` writable.
 */
enum DfStatus df_libyear_delta(const struct DfSemVersion *packaged,
                               uint64_t major,
                               uint64_t minor,
                               uint64_t patch,
                               double *out);

/**
 * Parses a `Packages` index (plain or gzip) into a snapshot handle.
 *
 * # Safety
 * `data` must point to `len` readable bytes, `release_id` must be a
 * NUL-terminated string and `out` writable.
 */
enum DfStatus df_snapshot_parse(const uint8_t *data,
                                size_t len,
                                const char *release_id,
                                struct DfSnapshot **out);

/**
 * Number of packages with a stanza; 0 for NULL.
 *
 * # Safety
 * `snapshot` must be NULL or a live handle.
 */
size_t df_snapshot_len(const struct DfSnapshot *snapshot);

/**
 * Sorted dependency closure of `seed`, seed excluded.
 *
 * # Safety
 * `snapshot` must be a live handle, `seed` a NUL-terminated string and
 * `out` writable.
 */
enum DfStatus df_snapshot_closure(const struct DfSnapshot *snapshot,
                                  const char *seed,
                                  struct DfStringList **out);

/**
 * # Safety
 * `snapshot` must be NULL or a handle not yet freed.
 */
void df_snapshot_free(struct DfSnapshot *snapshot);

/**
 * # Safety
 * `list` must be NULL or a live handle.
 */
size_t df_string_list_len(const struct DfStringList *list);

/**
 * Borrowed item `index`; valid until the list is freed.
 *
 * # Safety
 * `list` must be a live handle and `out` writable.
 */
enum DfStatus df_string_list_get(const struct DfStringList *list, size_t index, const char **out);

/**
 * # Safety
 * `list` must be NULL or a handle not yet freed.
 */
void df_string_list_free(struct DfStringList *list);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DEBFRESH_H */
