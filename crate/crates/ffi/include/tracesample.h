#ifndef TRACESAMPLE_H
#define TRACESAMPLE_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum TsStatus {
  TS_STATUS_OK = 0,
  TS_STATUS_NULL_POINTER = 1,
  TS_STATUS_INVALID_UTF8 = 2,
  TS_STATUS_INVALID_ARGUMENT = 3,
  TS_STATUS_PARSE_ERROR = 4,
  TS_STATUS_EMPTY_DATASET = 5,
  TS_STATUS_OUT_OF_RANGE = 6,
  TS_STATUS_UNKNOWN_LABEL = 7,
  TS_STATUS_IO = 8,
  TS_STATUS_PANIC = 9,
} TsStatus;

typedef enum TsInputFormat {
  TS_INPUT_FORMAT_CSV = 0,
  TS_INPUT_FORMAT_NDJSON = 1,
} TsInputFormat;

typedef enum TsArrangement {
  TS_ARRANGEMENT_SHUFFLED = 0,
  TS_ARRANGEMENT_GROUPED = 1,
} TsArrangement;

typedef enum TsFormat {
  TS_FORMAT_MARKDOWN = 0,
  TS_FORMAT_CSV = 1,
  TS_FORMAT_JSON = 2,
} TsFormat;

typedef enum TsFamily {
  /*
   `parameter` is n; honours `with_replacement`.
   */
  TS_FAMILY_RANDOM = 0,
  /*
   `parameter` is the interval I.
   */
  TS_FAMILY_SYSTEMATIC = 1,
  /*
   `parameter` is n; interval floor(P / n).
   */
  TS_FAMILY_SYSTEMATIC_BY_COUNT = 2,
  /*
   `parameter` is the interval I applied within each class.
   */
  TS_FAMILY_STRATIFIED = 3,
  /*
   `parameter` is the per-class quota k.
   */
  TS_FAMILY_UNDER_OVER = 4,
} TsFamily;

/*
 A labeled record population and its class histogram.
 */
typedef struct TsDataset TsDataset;

/*
 The outcome of one sampler run.
 */
typedef struct TsSample TsSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or NULL after a success.
 The pointer stays valid until the next call on the same thread.
 */
const char *ts_last_error_message(void);

/*
 # Safety
 `s` must be NULL or a string returned by this library and not yet freed.
 */
void ts_string_free(char *s);

/*
 Parses `len` bytes of CSV or NDJSON records.

 # Safety
 `data` must point to `len` readable bytes; `label_column` must be a
 NUL-terminated string; `out` must be writable.
 */
enum TsStatus ts_dataset_parse(const uint8_t *data,
                               size_t len,
                               enum TsInputFormat format,
                               const char *label_column,
                               struct TsDataset **out);

/*
 Synthesizes a dataset from `label,count` lines.

 # Safety
 `histogram_spec` must be a NUL-terminated string; `out` must be writable.
 */
enum TsStatus ts_dataset_synthesize(const char *histogram_spec,
                                    uint64_t seed,
                                    enum TsArrangement arrangement,
                                    struct TsDataset **out);

/*
 # Safety
 `ds` must be NULL or a handle from this library that has not been freed.
 */
void ts_dataset_free(struct TsDataset *ds);

/*
 Record count P, or 0 for NULL.

 # Safety
 `ds` must be NULL or a live handle.
 */
size_t ts_dataset_population(const struct TsDataset *ds);

/*
 Number of classes L, or 0 for NULL.

 # Safety
 `ds` must be NULL or a live handle.
 */
size_t ts_dataset_class_count(const struct TsDataset *ds);

/*
 Copies the label of the record at 1-based `position`.

 # Safety
 `ds` must be a live handle; `out` must be writable.
 */
enum TsStatus ts_dataset_label(const struct TsDataset *ds, size_t position, char **out);

/*
 Renders the whole-dataset class report.

 # Safety
 `ds` must be a live handle; `out` must be writable.
 */
enum TsStatus ts_dataset_report(const struct TsDataset *ds,
                                enum TsFormat format,
                                size_t decimals,
                                char **out);

/*
 Runs one sampler over `ds`.

 # Safety
 `ds` must be a live handle; `out` must be writable.
 */
enum TsStatus ts_sample_run(const struct TsDataset *ds,
                            enum TsFamily family,
                            size_t parameter,
                            bool with_replacement,
                            uint64_t seed,
                            struct TsSample **out);

/*
 # Safety
 `s` must be NULL or a handle from this library that has not been freed.
 */
void ts_sample_free(struct TsSample *s);

/*
 Number of sampled entries, or 0 for NULL.

 # Safety
 `s` must be NULL or a live handle.
 */
size_t ts_sample_len(const struct TsSample *s);

/*
 Source position and synthetic flag of entry `index` (0-based).

 # Safety
 `s` must be a live handle; `source_position` and `synthetic` must be writable.
 */
enum TsStatus ts_sample_entry(const struct TsSample *s,
                              size_t index,
                              size_t *source_position,
                              bool *synthetic);

/*
 The sample as CSV (`source_position,label,synthetic`).

 # Safety
 `s` must be a live handle; `out` must be writable.
 */
enum TsStatus ts_sample_to_csv(const struct TsSample *s, char **out);

/*
 Per-class report of `s` against the histogram of `ds`.

 # Safety
 `ds` and `s` must be live handles; `out` must be writable.
 */
enum TsStatus ts_sample_report(const struct TsDataset *ds,
                               const struct TsSample *s,
                               enum TsFormat format,
                               size_t decimals,
                               char **out);

/*
 Missing-class count of `s` against the histogram of `ds`.

 # Safety
 `ds` and `s` must be live handles; `out` must be writable.
 */
enum TsStatus ts_sample_missing_classes(const struct TsDataset *ds,
                                        const struct TsSample *s,
                                        size_t *out);

/*
 Expected number of classes absent from a uniform random sample of size `n`.

 # Safety
 `ds` must be a live handle; `out` must be writable.
 */
enum TsStatus ts_expected_missing(const struct TsDataset *ds,
                                  uint64_t n,
                                  bool with_replacement,
                                  double *out);

/*
 Probability that a class of `count` records out of `population` is absent
 from a uniform random sample of size `n`.

 # Safety
 `out` must be writable.
 */
enum TsStatus ts_miss_probability(uint64_t population,
                                  uint64_t count,
                                  uint64_t n,
                                  bool with_replacement,
                                  double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRACESAMPLE_H */
