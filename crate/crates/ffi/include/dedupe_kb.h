#ifndef DEDUPE_KB_H
#define DEDUPE_KB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result codes returned by every fallible function.
typedef enum DkbStatus {
  DKB_STATUS_OK = 0,
  DKB_STATUS_NULL_POINTER = 1,
  DKB_STATUS_INVALID_UTF8 = 2,
  DKB_STATUS_IO = 3,
  DKB_STATUS_INVALID_INPUT = 4,
  DKB_STATUS_INVALID_CONFIG = 5,
  DKB_STATUS_UNKNOWN_RECORD = 6,
  DKB_STATUS_OUT_OF_RANGE = 7,
  DKB_STATUS_INTERNAL = 8,
  DKB_STATUS_PANIC = 9,
} DkbStatus;

typedef enum DkbComparator {
  DKB_COMPARATOR_LEVENSHTEIN = 0,
  DKB_COMPARATOR_JARO_WINKLER = 1,
  DKB_COMPARATOR_EXACT = 2,
  DKB_COMPARATOR_NUMERIC = 3,
  DKB_COMPARATOR_GEOPOSITION = 4,
} DkbComparator;

// Opaque match configuration.
typedef struct DkbConfig DkbConfig;

// Opaque knowledge base.
typedef struct DkbKnowledgeBase DkbKnowledgeBase;

// Opaque link set. Strings handed out by [`dkb_links_get`] live as long as
// the handle.
typedef struct DkbLinkSet DkbLinkSet;

// One link as seen from C. Pointers are borrowed from the owning set.
typedef struct DkbLink {
  const char *a;
  const char *b;
  double probability;
} DkbLink;

typedef struct DkbReport {
  size_t tp;
  size_t fp;
  size_t fn_;
  double precision;
  double recall;
  double f_measure;
} DkbReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. Valid until the
// next `dkb_*` call on the same thread.
const char *dkb_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *dkb_version(void);

// The bundled default configuration.
//
// # Safety
// `out` must be a valid pointer to writable storage for a handle.
enum DkbStatus dkb_config_default(struct DkbConfig **out);

// Loads a JSON configuration file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum DkbStatus dkb_config_load(const char *path, struct DkbConfig **out);

// Parses a JSON configuration from memory.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum DkbStatus dkb_config_parse(const char *json, struct DkbConfig **out);

// Replaces the match threshold; must lie in `[0.5, 1]`.
//
// # Safety
// `config` must be a live handle.
enum DkbStatus dkb_config_set_threshold(struct DkbConfig *config, double threshold);

// # Safety
// `config` must be a live handle.
double dkb_config_threshold(const struct DkbConfig *config);

// # Safety
// `config` must be NULL or a handle not yet freed.
void dkb_config_free(struct DkbConfig *config);

// Loads a CSV knowledge base validated against `config`.
//
// # Safety
// `path` must be NUL-terminated, `config` live, `out` writable.
enum DkbStatus dkb_kb_load(const char *path,
                           const struct DkbConfig *config,
                           struct DkbKnowledgeBase **out);

// Number of records, or 0 for NULL.
//
// # Safety
// `kb` must be NULL or a live handle.
size_t dkb_kb_len(const struct DkbKnowledgeBase *kb);

// # Safety
// `kb` must be NULL or a handle not yet freed.
void dkb_kb_free(struct DkbKnowledgeBase *kb);

// Runs deduplication with `jobs` worker threads (0 is treated as 1).
// `candidate_pairs` may be NULL.
//
// # Safety
// `kb` and `config` must be live handles; `out` writable.
enum DkbStatus dkb_deduplicate(const struct DkbKnowledgeBase *kb,
                               const struct DkbConfig *config,
                               size_t jobs,
                               struct DkbLinkSet **out,
                               size_t *candidate_pairs);

// Scores a single pair of records by id.
//
// # Safety
// Handles must be live, ids NUL-terminated, outputs writable (`is_match`
// may be NULL).
enum DkbStatus dkb_compare_pair(const struct DkbKnowledgeBase *kb,
                                const struct DkbConfig *config,
                                const char *id_a,
                                const char *id_b,
                                double *probability,
                                bool *is_match);

// Reads a TSV links file.
//
// # Safety
// `path` must be NUL-terminated; `out` writable.
enum DkbStatus dkb_links_load(const char *path, struct DkbLinkSet **out);

// Writes a TSV links file, sorted, six decimals.
//
// # Safety
// `links` must be live; `path` NUL-terminated.
enum DkbStatus dkb_links_write(const struct DkbLinkSet *links, const char *path);

// # Safety
// `links` must be NULL or a live handle.
size_t dkb_links_len(const struct DkbLinkSet *links);

// Link at `index` in `(a, b)` order. The strings stay valid until the set
// is freed.
//
// # Safety
// `links` must be live; `out` writable.
enum DkbStatus dkb_links_get(const struct DkbLinkSet *links, size_t index, struct DkbLink *out);

// # Safety
// `links` must be NULL or a handle not yet freed.
void dkb_links_free(struct DkbLinkSet *links);

// Precision, recall and F-measure of `found` against `truth`.
//
// # Safety
// Both sets must be live; `out` writable.
enum DkbStatus dkb_evaluate(const struct DkbLinkSet *found,
                            const struct DkbLinkSet *truth,
                            struct DkbReport *out);

// Similarity of two cleaned values. Unparseable numeric or coordinate input
// returns `DKB_STATUS_INVALID_INPUT`.
//
// # Safety
// `a` and `b` must be NUL-terminated; `out` writable.
enum DkbStatus dkb_similarity(enum DkbComparator comparator,
                              const char *a,
                              const char *b,
                              double *out);

// Bayes combination of two probabilities.
//
// # Safety
// `out` must be writable.
enum DkbStatus dkb_combine_bayes(double p, double q, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DEDUPE_KB_H */
