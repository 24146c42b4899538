/*
 * Copyright 2026 The PAIQA Toolkit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.

 */

/*
 * C interface to the PAIQA toolkit. All functions return a paiqa_status;
 * on failure the message is available from paiqa_context_last_error (or
 * paiqa_thread_last_error for calls without a context). Strings passed in
 * are UTF-8 and NUL-terminated; NULL marks an absent optional value.
 */

#ifndef PAIQA_PAIQA_H_
#define PAIQA_PAIQA_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PAIQA_API __declspec(dllexport)
#else
#define PAIQA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as process exit codes. */
typedef enum paiqa_status {
  PAIQA_OK = 0,
  PAIQA_ERR_INTERNAL = 1,
  PAIQA_ERR_VALIDATION = 2,
  PAIQA_ERR_EXTERNAL = 3,
  PAIQA_ERR_DATA = 4
} paiqa_status;

typedef struct paiqa_context paiqa_context;
typedef struct paiqa_rating_server paiqa_rating_server;

PAIQA_API const char* paiqa_version(void);
PAIQA_API const char* paiqa_thread_last_error(void);

/* 0 = warnings only, 1 = info, 2 = debug. Logs go to stderr. */
PAIQA_API void paiqa_set_verbosity(int level);

/* config_path may be NULL for commands that need no configuration. */
PAIQA_API paiqa_status paiqa_context_create(const char* config_path, paiqa_context** out);
PAIQA_API void paiqa_context_destroy(paiqa_context* ctx);
PAIQA_API const char* paiqa_context_last_error(const paiqa_context* ctx);
/* Gateway-backed commands write their request/reply transcript here. */
PAIQA_API paiqa_status paiqa_context_set_transcript(paiqa_context* ctx, const char* path);

typedef struct paiqa_synth_args {
  int n_samples;
  int n_raters;
  uint64_t seed;
  const char* outdir;
} paiqa_synth_args;
PAIQA_API paiqa_status paiqa_synth_corpus(paiqa_context* ctx, const paiqa_synth_args* args);

typedef struct paiqa_curate_args {
  const char* images;
  const char* detections;
  const char* edited;
  const char* out;
  const char* workdir;
} paiqa_curate_args;
PAIQA_API paiqa_status paiqa_curate(paiqa_context* ctx, const paiqa_curate_args* args);

typedef struct paiqa_replay_args {
  const char* samples;
  const char* script;
  const char* out;
  const char* db;
  const char* url;
} paiqa_replay_args;
PAIQA_API paiqa_status paiqa_replay_campaign(paiqa_context* ctx, const paiqa_replay_args* args);

typedef struct paiqa_clean_args {
  const char* ratings;
  const char* out;
  const char* report;
} paiqa_clean_args;
PAIQA_API paiqa_status paiqa_clean_ratings(paiqa_context* ctx, const paiqa_clean_args* args);

typedef struct paiqa_plot_args {
  const char* consensus;
  const char* samples;
  const char* outdir;
} paiqa_plot_args;
PAIQA_API paiqa_status paiqa_plot_stats(paiqa_context* ctx, const paiqa_plot_args* args);

typedef struct paiqa_subset_args {
  const char* consensus;
  const char* samples;
  int has_seed;
  uint64_t seed;
  int has_test_ratio;
  double test_ratio;
  const char* out;
} paiqa_subset_args;
PAIQA_API paiqa_status paiqa_build_subsets(paiqa_context* ctx, const paiqa_subset_args* args);

typedef struct paiqa_instruction_args {
  int stage;
  const char* splits;
  const char* consensus;
  const char* samples;
  int has_seed;
  uint64_t seed;
  const char* split; /* "train" (default) or "test"; stage 3 only */
  const char* out;
  const char* gold_out;
} paiqa_instruction_args;
PAIQA_API paiqa_status paiqa_build_instructions(paiqa_context* ctx,
                                                const paiqa_instruction_args* args);

typedef struct paiqa_scoring_args {
  const char* task; /* harmony, naturalness or overall */
  const char* splits;
  const char* samples;
  const char* endpoint;
  int has_seed;
  uint64_t seed;
  const char* regressor; /* "ols" (default) or "mean" */
  const char* out;
} paiqa_scoring_args;
PAIQA_API paiqa_status paiqa_evaluate_scoring(paiqa_context* ctx, const paiqa_scoring_args* args);

typedef struct paiqa_judge_args {
  const char* gold;
  const char* responses;
  const char* judge;
  int has_seed;
  uint64_t seed;
  const char* out;
} paiqa_judge_args;
PAIQA_API paiqa_status paiqa_evaluate_explanations(paiqa_context* ctx,
                                                   const paiqa_judge_args* args);

typedef struct paiqa_server_args {
  const char* samples;
  const char* db;         /* NULL = in memory */
  const char* host;       /* NULL = 127.0.0.1 */
  int port;               /* 0 = any free port */
  const char* asset_root; /* NULL = current directory */
} paiqa_server_args;
PAIQA_API paiqa_status paiqa_rating_server_create(paiqa_context* ctx,
                                                  const paiqa_server_args* args,
                                                  paiqa_rating_server** out);
PAIQA_API int paiqa_rating_server_port(const paiqa_rating_server* server);
/* Blocks until paiqa_rating_server_stop is called from another thread. */
PAIQA_API paiqa_status paiqa_rating_server_serve(paiqa_rating_server* server);
PAIQA_API void paiqa_rating_server_stop(paiqa_rating_server* server);
PAIQA_API void paiqa_rating_server_destroy(paiqa_rating_server* server);

/* Pure helpers. */
PAIQA_API paiqa_status paiqa_fuse(const double logits[5], double* out);
PAIQA_API paiqa_status paiqa_srcc(const double* x, const double* y, size_t n, double* out);
PAIQA_API paiqa_status paiqa_plcc(const double* x, const double* y, size_t n, double* out);

#ifdef __cplusplus
}
#endif

#endif /* PAIQA_PAIQA_H_ */
