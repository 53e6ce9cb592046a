// Copyright 2026 The SynGen Authors. All Rights Reserved.
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
// =============================================================================

/*
 * C interface to the SynGen library: dual-channel (semantic + dependency
 * graph) encoder with a pointer-network decoder for aspect-based sentiment
 * structure prediction.
 *
 * Every entry point returns a syngen_status. On failure a human-readable
 * message is available from syngen_last_error() on the calling thread until
 * the next call on that thread. Strings returned through char** out
 * parameters are owned by the caller and released with syngen_string_free().
 * Configuration and reports cross this boundary as JSON text.
 */

#ifndef SYNGEN_SYNGEN_H_
#define SYNGEN_SYNGEN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SYNGEN_BUILDING_LIBRARY)
#    define SYNGEN_API __declspec(dllexport)
#  else
#    define SYNGEN_API __declspec(dllimport)
#  endif
#else
#  define SYNGEN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum syngen_status {
  SYNGEN_OK = 0,
  SYNGEN_ERR_INVALID_ARGUMENT = 1,
  SYNGEN_ERR_DIMENSION = 2,
  SYNGEN_ERR_DEGENERATE_MASK = 3,
  SYNGEN_ERR_RANK = 4,
  SYNGEN_ERR_DETERMINISM = 5,
  SYNGEN_ERR_INCOMPLETE_BACKWARD = 6,
  SYNGEN_ERR_PARSE = 7,
  SYNGEN_ERR_VALIDATION = 8,
  SYNGEN_ERR_INCOMPLETE_GOLD = 9,
  SYNGEN_ERR_RANGE = 10,
  SYNGEN_ERR_CONFIGURATION = 11,
  SYNGEN_ERR_EMPTY_INPUT = 12,
  SYNGEN_ERR_PRECONDITION = 13,
  SYNGEN_ERR_ALIGNMENT = 14,
  SYNGEN_ERR_INCOMPATIBLE = 15,
  SYNGEN_ERR_DIVERGED = 16,
  SYNGEN_ERR_IO = 17,
  SYNGEN_ERR_INTERNAL = 18
} syngen_status;

typedef struct syngen_dataset syngen_dataset;
typedef struct syngen_model syngen_model;

/* Called once per finished epoch. f1 is NaN when not computed that epoch. */
typedef void (*syngen_epoch_callback)(void* user, size_t epoch, double loss, double f1);

SYNGEN_API const char* syngen_version(void);
SYNGEN_API const char* syngen_status_name(syngen_status status);
SYNGEN_API const char* syngen_last_error(void);
SYNGEN_API void syngen_string_free(char* s);

/* ---- datasets (JSON lines) -------------------------------------------- */

SYNGEN_API syngen_status syngen_dataset_load(const char* path, syngen_dataset** out);
SYNGEN_API syngen_status syngen_dataset_synthesize(size_t count, uint64_t seed,
                                                   syngen_dataset** out);
SYNGEN_API syngen_status syngen_dataset_save(const syngen_dataset* ds, const char* path);
SYNGEN_API size_t syngen_dataset_size(const syngen_dataset* ds);
SYNGEN_API void syngen_dataset_free(syngen_dataset* ds);

/* ---- configuration ---------------------------------------------------- */

/* Overlays overrides_json (may be NULL or "{}") on the defaults and returns
 * the fully resolved training configuration. */
SYNGEN_API syngen_status syngen_train_config_resolve(const char* overrides_json,
                                                     char** resolved_json);

/* ---- models ------------------------------------------------------------ */

/* Fresh model: vocabulary from `train`, architecture and seed from the
 * "model" section of the training configuration. */
SYNGEN_API syngen_status syngen_model_create(const syngen_dataset* train,
                                             const char* train_config_json,
                                             syngen_model** out);
SYNGEN_API syngen_status syngen_model_load(const char* path, syngen_model** out);
SYNGEN_API syngen_status syngen_model_save(const syngen_model* model, const char* path);
SYNGEN_API syngen_status syngen_model_config(const syngen_model* model, char** config_json);
SYNGEN_API void syngen_model_free(syngen_model* model);

/* ---- training and inference ------------------------------------------- */

/* dev, stats_csv_path, callback and stats_json may be NULL. */
SYNGEN_API syngen_status syngen_train(syngen_model* model, const syngen_dataset* train,
                                      const syngen_dataset* dev, const char* train_config_json,
                                      const char* stats_csv_path, syngen_epoch_callback callback,
                                      void* user, char** stats_json);

/* decode_options_json: {"task", "beam", "max_steps", "constrained"}. */
SYNGEN_API syngen_status syngen_evaluate(const syngen_model* model, const syngen_dataset* ds,
                                         const char* decode_options_json, char** report_json);

/* One JSON object per sentence:
 * {"sentence_id", "predictions", "malformed_frames", "score"}. */
SYNGEN_API syngen_status syngen_decode(const syngen_model* model, const syngen_dataset* ds,
                                       const char* decode_options_json, const char* output_path);

/* ---- diagnostics ------------------------------------------------------- */

/* options_json: {"ablation", "node_init", "task", "d", "seed", "epsilon"}.
 * Writes the worst relative error across every parameter. */
SYNGEN_API syngen_status syngen_gradcheck(const char* options_json, double* max_rel_err,
                                          char** report_json);

/* Test hook: corrupts one backward rule while non-zero. */
SYNGEN_API void syngen_set_break_gradient(int broken);

/* Writes ours/baseline/difference attention CSVs per sentence plus
 * gap_report.csv (Value, Rank, Prop) under out_dir. */
SYNGEN_API syngen_status syngen_analyze_attention(const syngen_model* ours,
                                                  const syngen_model* baseline,
                                                  const syngen_dataset* ds, const char* out_dir,
                                                  char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* SYNGEN_SYNGEN_H_ */
