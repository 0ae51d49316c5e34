// Copyright 2026 The stlid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


/* C interface to the stlid library. Every function returns a status code;
 * on failure stlid_last_error() describes the problem for the calling
 * thread. Handles are opaque and owned by the caller, who releases them
 * with the matching *_free function (NULL is accepted). */

#ifndef STLID_STLID_H_
#define STLID_STLID_H_

#include <stddef.h>
#include <stdint.h>

#if defined(STLID_BUILDING_LIBRARY)
#define STLID_API __attribute__((visibility("default")))
#else
#define STLID_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum stlid_status {
  STLID_OK = 0,
  STLID_ERR_ARGUMENT = 1,     /* NULL handle or bad argument */
  STLID_ERR_PARSE = 2,        /* malformed input file */
  STLID_ERR_CONSISTENCY = 3,  /* input files disagree */
  STLID_ERR_DATA = 4,         /* values violate a data invariant */
  STLID_ERR_CONFIG = 5,       /* invalid configuration */
  STLID_ERR_PRECONDITION = 6, /* operation outside its domain */
  STLID_ERR_DEGENERATE = 7,   /* estimator without information */
  STLID_ERR_IO = 8,
  STLID_ERR_INTERNAL = 9
} stlid_status;

typedef struct stlid_config stlid_config;
typedef struct stlid_dataset stlid_dataset;
typedef struct stlid_truth stlid_truth;
typedef struct stlid_run stlid_run;
typedef struct stlid_monitor stlid_monitor;
typedef struct stlid_report stlid_report;

STLID_API const char* stlid_version(void);
/* Message of the last failed call on this thread; "" after success. */
STLID_API const char* stlid_last_error(void);
STLID_API const char* stlid_status_name(stlid_status status);
/* Releases strings returned through char** out-parameters. */
STLID_API void stlid_string_free(char* s);

/* Configuration: flat key = value settings, defaults on creation. */
STLID_API stlid_status stlid_config_new(stlid_config** out);
STLID_API void stlid_config_free(stlid_config* config);
STLID_API stlid_status stlid_config_load_file(stlid_config* config, const char* path);
STLID_API stlid_status stlid_config_set(stlid_config* config, const char* key, const char* value);
STLID_API stlid_status stlid_config_get(const stlid_config* config, const char* key, char** out);
STLID_API stlid_status stlid_config_validate(const stlid_config* config);
/* Every key with its value, one "key = value" line each. */
STLID_API stlid_status stlid_config_format(const stlid_config* config, char** out);

/* Datasets and ground truth. */
STLID_API stlid_status stlid_dataset_load(const char* points_path, const char* series_path,
                                          double step_interval_minutes, stlid_dataset** out);
STLID_API stlid_status stlid_dataset_save(const stlid_dataset* dataset, const char* points_path,
                                          const char* series_path);
STLID_API void stlid_dataset_free(stlid_dataset* dataset);
STLID_API size_t stlid_dataset_num_points(const stlid_dataset* dataset);
STLID_API size_t stlid_dataset_num_steps(const stlid_dataset* dataset);
STLID_API int64_t stlid_dataset_start_step(const stlid_dataset* dataset);
STLID_API double stlid_dataset_step_interval(const stlid_dataset* dataset);

STLID_API stlid_status stlid_truth_load(const char* path, stlid_truth** out);
STLID_API stlid_status stlid_truth_save(const stlid_truth* truth, const char* path);
STLID_API void stlid_truth_free(stlid_truth* truth);
STLID_API size_t stlid_truth_num_regions(const stlid_truth* truth);

typedef struct stlid_region {
  const char* label; /* valid while the truth handle lives */
  double xmin, ymin, xmax, ymax;
  int64_t time_of_failure;
} stlid_region;

STLID_API stlid_status stlid_truth_region(const stlid_truth* truth, size_t index,
                                          stlid_region* out);

/* Synthetic creep scenario from the scenario.* keys of `config`. */
STLID_API stlid_status stlid_generate(const stlid_config* config, stlid_dataset** dataset,
                                      stlid_truth** truth);

/* Detection run. */
typedef struct stlid_detect_options {
  /* Stop after this step and dump scores for it only; ignored unless
   * has_at_step is nonzero. Must be at least start_step + 3. */
  int has_at_step;
  int64_t at_step;
  const char* scores_path; /* per-step score dump, or NULL */
  const char* events_path; /* event log, or NULL */
  const stlid_truth* truth; /* lead times per region, or NULL */
} stlid_detect_options;

typedef struct stlid_event {
  int64_t detection_step;
  int64_t point_id;
  double x, y;
  double st_lid;
} stlid_event;

typedef struct stlid_lead_time {
  const char* label; /* valid while the run handle lives */
  int64_t time_of_failure;
  int64_t steps;
  double minutes;
} stlid_lead_time;

STLID_API stlid_status stlid_detect(const stlid_dataset* dataset, const stlid_config* config,
                                    const stlid_detect_options* options, stlid_run** out);
STLID_API void stlid_run_free(stlid_run* run);
STLID_API size_t stlid_run_num_events(const stlid_run* run);
STLID_API stlid_status stlid_run_event(const stlid_run* run, size_t index, stlid_event* out);
STLID_API size_t stlid_run_num_lead_times(const stlid_run* run);
STLID_API stlid_status stlid_run_lead_time(const stlid_run* run, size_t index,
                                           stlid_lead_time* out);

/* Streaming replay, one step per call. */
typedef struct stlid_step_summary {
  int64_t step;
  int scored;      /* st-LID values exist at this step */
  int has_argmax;  /* a non-excluded point exists */
  int64_t argmax_id;
  double argmax_st_lid;
  size_t hits;
  int event; /* this step emitted the event */
  stlid_event event_info;
  int done; /* no step was consumed: the dataset is exhausted */
} stlid_step_summary;

STLID_API stlid_status stlid_monitor_new(const stlid_dataset* dataset, const stlid_config* config,
                                         stlid_monitor** out);
/* Continues from a state file written by stlid_monitor_save for the same
 * dataset and configuration. */
STLID_API stlid_status stlid_monitor_resume(const stlid_dataset* dataset,
                                            const stlid_config* config, const char* state_path,
                                            stlid_monitor** out);
STLID_API stlid_status stlid_monitor_step(stlid_monitor* monitor, stlid_step_summary* out);
STLID_API stlid_status stlid_monitor_save(const stlid_monitor* monitor, const char* state_path);
STLID_API int64_t stlid_monitor_next_step(const stlid_monitor* monitor);
/* Writes the event log (header plus at most one row). */
STLID_API stlid_status stlid_monitor_write_events(const stlid_monitor* monitor, const char* path);
STLID_API void stlid_monitor_free(stlid_monitor* monitor);

/* Method comparison. `methods` is a comma-separated subset of
 * kmeans,dbscan,lof,edq,slid,stlid; NULL or "" selects all. When
 * `baselines_path` is set, every baseline result is dumped there. */
typedef struct stlid_report_row {
  const char* method; /* valid while the report handle lives */
  const char* region;
  int has_precision;
  double precision;
  size_t correct, total;
  int64_t lead_time_steps;
  double lead_time_minutes;
  double median_step_seconds, max_step_seconds;
  size_t events;
} stlid_report_row;

STLID_API stlid_status stlid_benchmark(const stlid_dataset* dataset, const stlid_truth* truth,
                                       const stlid_config* config, const char* methods,
                                       const char* baselines_path, stlid_report** out);
STLID_API size_t stlid_method_count(void);
STLID_API const char* stlid_method_name(size_t index);
STLID_API void stlid_report_free(stlid_report* report);
STLID_API size_t stlid_report_num_rows(const stlid_report* report);
STLID_API stlid_status stlid_report_row_at(const stlid_report* report, size_t index,
                                           stlid_report_row* out);
STLID_API stlid_status stlid_report_write_csv(const stlid_report* report, const char* path);
STLID_API stlid_status stlid_report_table(const stlid_report* report, char** out);
/* "80 (3.3 hrs)" style lead time text. */
STLID_API stlid_status stlid_format_lead_time(int64_t steps, double minutes, char** out);

/* File schemas: points, series, truth, scores, events, report, baselines. */
STLID_API size_t stlid_schema_count(void);
STLID_API const char* stlid_schema_name(size_t index);
/* STLID_OK when `path` conforms; STLID_ERR_DATA with the first offending
 * line in stlid_last_error() otherwise. */
STLID_API stlid_status stlid_validate_file(const char* path, const char* schema);

#ifdef __cplusplus
}
#endif

#endif /* STLID_STLID_H_ */
