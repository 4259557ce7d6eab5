#include <stdio.h>
#include <string.h>
#include "tracesample.h"

#define CHECK(expr)                                                            \
  do {                                                                         \
    TsStatus st_ = (expr);                                                     \
    if (st_ != TS_STATUS_OK) {                                                 \
      const char *m_ = ts_last_error_message();                                \
      fprintf(stderr, "%s -> %d (%s)\n", #expr, (int)st_, m_ ? m_ : "");      \
      return 1;                                                                \
    }                                                                          \
  } while (0)

int main(void) {
  TsDataset *ds = NULL;
  TsSample *s = NULL;
  char *text = NULL;
  size_t missing = 0;
  double expected = 0.0;

  CHECK(ts_dataset_synthesize("TCP,60\nUDP,30\nDNS,10\n", 7, TS_ARRANGEMENT_SHUFFLED, &ds));
  if (ts_dataset_population(ds) != 100 || ts_dataset_class_count(ds) != 3) return 2;

  CHECK(ts_sample_run(ds, TS_FAMILY_STRATIFIED, 10, false, 0, &s));
  if (ts_sample_len(s) != 10) return 3;
  CHECK(ts_sample_missing_classes(ds, s, &missing));
  if (missing != 0) return 4;

  CHECK(ts_sample_report(ds, s, TS_FORMAT_CSV, 3, &text));
  if (strstr(text, "DNS") == NULL) return 5;
  ts_string_free(text);

  CHECK(ts_expected_missing(ds, 0, false, &expected));
  if (expected != 3.0) return 6;

  ts_sample_free(s);
  s = NULL;
  if (ts_sample_run(ds, TS_FAMILY_SYSTEMATIC, 0, false, 0, &s) != TS_STATUS_INVALID_ARGUMENT) return 7;
  if (ts_last_error_message() == NULL || s != NULL) return 8;

  ts_dataset_free(ds);
  puts("ok");
  return 0;
}
