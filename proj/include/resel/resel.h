/*
 * Copyright 2026 The resel Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface of the resel recovery-data selection engine.
 *
 * Every function returns a resel_status. On failure the message is available
 * from resel_last_error() on the calling thread until the next call. Strings
 * returned through char** out-parameters are owned by the caller and released
 * with resel_string_free().
 */

#ifndef RESEL_RESEL_H_
#define RESEL_RESEL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RESEL_API __declspec(dllexport)
#else
#define RESEL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum resel_status {
  RESEL_OK = 0,
  RESEL_ERR_INPUT = 2,
  RESEL_ERR_NUMERICAL = 3,
  RESEL_ERR_CONFIG = 4,
} resel_status;

typedef enum resel_stage {
  RESEL_STAGE_CLUSTER = 1,
  RESEL_STAGE_SCORE = 2,
  RESEL_STAGE_SELECT = 3,
  RESEL_STAGE_RUN = 4,
} resel_stage;

typedef enum resel_synth_form {
  RESEL_SYNTH_PROBABILITIES = 0,
  RESEL_SYNTH_PER_TOKEN_JSD = 1,
} resel_synth_form;

typedef struct resel_config resel_config;

RESEL_API const char* resel_version(void);
RESEL_API const char* resel_last_error(void);
RESEL_API void resel_string_free(char* s);

/* Configuration with default values. */
RESEL_API resel_status resel_config_new(resel_config** out);
/* Flat JSON document; missing keys keep their defaults. */
RESEL_API resel_status resel_config_load(const char* path, resel_config** out);
RESEL_API void resel_config_free(resel_config* config);
/* Sets one key from a JSON value such as "0.5", "[1,2]" or "null". */
RESEL_API resel_status resel_config_set(resel_config* config, const char* key,
                                        const char* json_value);
RESEL_API resel_status resel_config_to_json(const resel_config* config,
                                            char** out);
RESEL_API resel_status resel_config_fingerprint(const resel_config* config,
                                                char** out);

/*
 * Runs the pipeline up to `stage` and writes the stage artifacts into
 * out_dir. `divergences_path` may be NULL for RESEL_STAGE_CLUSTER. When
 * report_out is not NULL it receives the human-readable run report.
 */
RESEL_API resel_status resel_run(const resel_config* config,
                                 const char* corpus_path,
                                 const char* embeddings_path,
                                 const char* divergences_path,
                                 const char* out_dir, resel_stage stage,
                                 char** report_out);

/* Human-readable summary of any artifact file. */
RESEL_API resel_status resel_inspect(const char* path, char** out);

/* Synthetic blob dataset from a JSON spec ("{}" for defaults). */
RESEL_API resel_status resel_synth(const char* spec_json,
                                   resel_synth_form form, const char* out_dir);

/* Base-2 Jensen-Shannon divergence of two distributions of length n. */
RESEL_API resel_status resel_jsd(const double* p, const double* q, size_t n,
                                 double* out);

#ifdef __cplusplus
}
#endif

#endif /* RESEL_RESEL_H_ */
