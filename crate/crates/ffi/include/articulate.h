#ifndef ARTICULATE_H
#define ARTICULATE_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum ArtStatus {
  ART_STATUS_OK = 0,
  ART_STATUS_NULL_POINTER = 1,
  ART_STATUS_INVALID_UTF8 = 2,
  ART_STATUS_INVALID_JSON = 3,
  ART_STATUS_VALIDATION = 4,
  ART_STATUS_NOT_FOUND = 5,
  ART_STATUS_ENGINE = 6,
  ART_STATUS_INTERNAL = 7,
  ART_STATUS_PANIC = 8,
} ArtStatus;

/**
 * Opaque handle to an immutable catalog snapshot.
 */
typedef struct ArtCatalog ArtCatalog;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Loads every `*.json` file in directory `dir`.
 *
 * # Safety
 * `dir` must be a NUL-terminated string; `out` must be writable.
 */
enum ArtStatus art_catalog_open(const char *dir, struct ArtCatalog **out);

/**
 * Builds a catalog from one JSON catalog document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum ArtStatus art_catalog_from_json(const char *json, struct ArtCatalog **out);

/**
 * Releases a catalog. Null is ignored.
 *
 * # Safety
 * `catalog` must come from `art_catalog_open` or `art_catalog_from_json`
 * and must not be used afterwards.
 */
void art_catalog_free(struct ArtCatalog *catalog);

/**
 * Snapshot version of the catalog, or 0 for a null handle.
 *
 * # Safety
 * `catalog` must be null or a live handle.
 */
uint64_t art_catalog_version(const struct ArtCatalog *catalog);

/**
 * Audits a transcript against one program. `request` is
 * `{"program_id", "transcript", "policy"?}`.
 *
 * # Safety
 * Pointers must be valid; `out` receives a string for `art_string_free`.
 */
enum ArtStatus art_audit(const struct ArtCatalog *catalog, const char *request, char **out);

/**
 * What-if analysis. `request` is `{"transcript", "target_program_ids"?,
 * "constraints"?, "cost_model"?, "policy"?}`.
 *
 * # Safety
 * Pointers must be valid; `out` receives a string for `art_string_free`.
 */
enum ArtStatus art_whatif(const struct ArtCatalog *catalog, const char *request, char **out);

/**
 * Completion courses and plan. `request` is `{"program_id",
 * "transcript", "constraints"?, "policy"?}`.
 *
 * # Safety
 * Pointers must be valid; `out` receives a string for `art_string_free`.
 */
enum ArtStatus art_plan(const struct ArtCatalog *catalog, const char *request, char **out);

/**
 * Translates a transcript to `institution`.
 *
 * # Safety
 * Pointers must be valid; `out` receives a string for `art_string_free`.
 */
enum ArtStatus art_translate(const struct ArtCatalog *catalog,
                             const char *transcript,
                             const char *institution,
                             char **out);

/**
 * Pathways per university and statewide.
 *
 * # Safety
 * Both out pointers must be writable.
 */
enum ArtStatus art_count_pathways(uint32_t num_ccs,
                                  uint32_t programs_per_cc,
                                  uint32_t targets_per_program,
                                  uint32_t num_universities,
                                  uint64_t *out_per_university,
                                  uint64_t *out_statewide);

/**
 * National tuition-loss estimate from a JSON assumption set.
 *
 * # Safety
 * Pointers must be valid; `out` receives a string for `art_string_free`.
 */
enum ArtStatus art_estimate_loss(const char *assumptions, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and must not be used afterwards.
 */
void art_string_free(char *s);

/**
 * Message for the last failure on this thread, or null. Valid until the
 * next call into the library on the same thread.
 */
const char *art_last_error(void);

/**
 * Library version as a static string.
 */
const char *art_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ARTICULATE_H */
