/* Copyright 2026 The gcgat Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

/* C interface to the gcgat library.
 *
 * All objects are opaque handles created by gcgat_*_create/load functions and
 * released with the matching *_free function. Every fallible call returns a
 * gcgat_status; on failure gcgat_last_error() describes the error for the
 * calling thread. Strings returned through char** are released with
 * gcgat_string_free. Coordinates of predictions are in the target-centric
 * frame (target at the origin, heading along +x), in meters.
 */

#ifndef GCGAT_GCGAT_H_
#define GCGAT_GCGAT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GCGAT_API __declspec(dllexport)
#else
#define GCGAT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Values 2..6 double as the command-line exit codes. */
typedef enum gcgat_status {
  GCGAT_OK = 0,
  GCGAT_ERR_INTERNAL = 1,
  GCGAT_ERR_CONFIG = 2,
  GCGAT_ERR_NONFINITE_LOSS = 3,
  GCGAT_ERR_MISSING_GROUND_TRUTH = 4,
  GCGAT_ERR_INDEX_OUT_OF_RANGE = 5,
  GCGAT_ERR_HORIZON_MISMATCH = 6,
  GCGAT_ERR_IO = 7,
  GCGAT_ERR_PARSE = 8,
  GCGAT_ERR_FORMAT = 9,
  GCGAT_ERR_VERSION_MISMATCH = 10,
  GCGAT_ERR_SHAPE_MISMATCH = 11,
  GCGAT_ERR_LIMIT_EXCEEDED = 12,
  GCGAT_ERR_DEGENERATE_INPUT = 13,
  GCGAT_ERR_TARGET_OFF_GRAPH = 14,
  GCGAT_ERR_NON_POSITIVE_SCALE = 15,
  GCGAT_ERR_K_TOO_LARGE = 16,
  GCGAT_ERR_INVALID_ARGUMENT = 17
} gcgat_status;

typedef struct gcgat_config gcgat_config;         /* generator, model and training settings */
typedef struct gcgat_dataset gcgat_dataset;       /* list of scenes */
typedef struct gcgat_model gcgat_model;           /* trained model with optimizer state */
typedef struct gcgat_report gcgat_report;         /* evaluation metrics */
typedef struct gcgat_prediction gcgat_prediction; /* multimodal prediction of one scene */

/* Called once per training log record with a one-line JSON object. */
typedef void (*gcgat_log_fn)(const char* json_line, void* user);

GCGAT_API const char* gcgat_version(void);
GCGAT_API const char* gcgat_last_error(void);
GCGAT_API const char* gcgat_status_name(int status);
GCGAT_API void gcgat_string_free(char* s);

/* Configuration. JSON with optional "gen", "model" and "train" sections;
 * unknown keys fail with GCGAT_ERR_CONFIG. */
GCGAT_API int gcgat_config_default(gcgat_config** out);
GCGAT_API int gcgat_config_parse(const char* json_text, gcgat_config** out);
GCGAT_API int gcgat_config_load(const char* path, gcgat_config** out);
GCGAT_API int gcgat_config_to_json(const gcgat_config* cfg, char** out);
GCGAT_API void gcgat_config_free(gcgat_config* cfg);

/* Datasets. Files hold one scene per line. */
GCGAT_API int gcgat_dataset_generate(const gcgat_config* cfg, size_t count, uint64_t seed,
                                     gcgat_dataset** out);
GCGAT_API int gcgat_dataset_load(const char* path, gcgat_dataset** out);
GCGAT_API int gcgat_dataset_save(const gcgat_dataset* ds, const char* path);
GCGAT_API size_t gcgat_dataset_size(const gcgat_dataset* ds);
/* counts[0..3]: straight, curve, t_junction, crossroads. */
GCGAT_API int gcgat_dataset_topology_counts(const gcgat_dataset* ds, size_t counts[4]);
GCGAT_API void gcgat_dataset_free(gcgat_dataset* ds);

/* Models. gcgat_model_init gives the untrained initialization of cfg. */
GCGAT_API int gcgat_model_init(const gcgat_config* cfg, gcgat_model** out);
GCGAT_API int gcgat_model_save(const gcgat_model* model, const char* path);
GCGAT_API int gcgat_model_load(const char* path, gcgat_model** out);
GCGAT_API size_t gcgat_model_modes(const gcgat_model* model);
GCGAT_API size_t gcgat_model_future_steps(const gcgat_model* model);
GCGAT_API int64_t gcgat_model_step(const gcgat_model* model);
GCGAT_API void gcgat_model_free(gcgat_model* model);

/* Training. `resume` may be NULL; stop_after < 0 trains to cfg's step count;
 * `log` may be NULL. */
GCGAT_API int gcgat_train(const gcgat_config* cfg, const gcgat_dataset* train,
                          const gcgat_dataset* val, const gcgat_model* resume,
                          int64_t stop_after, gcgat_log_fn log, void* user, gcgat_model** out);

/* Four-row interactor ablation, as a whitespace-separated table. */
GCGAT_API int gcgat_ablate(const gcgat_config* cfg, const gcgat_dataset* train,
                           const gcgat_dataset* val, char** table_out);

/* Evaluation at K = 1, 5, 10. threads = 0 uses every core. */
GCGAT_API int gcgat_evaluate(const gcgat_model* model, const gcgat_dataset* ds, uint64_t seed,
                             size_t threads, gcgat_report** out);
/* Constant-velocity baseline with cfg's step duration. */
GCGAT_API int gcgat_evaluate_baseline(const gcgat_config* cfg, const gcgat_dataset* ds,
                                      gcgat_report** out);
/* metric: "min_ade", "min_fde" or "miss_rate". */
GCGAT_API int gcgat_report_get(const gcgat_report* r, const char* metric, size_t k, double* out);
GCGAT_API double gcgat_report_offroad_rate(const gcgat_report* r);
GCGAT_API size_t gcgat_report_scene_count(const gcgat_report* r);
GCGAT_API double gcgat_report_mean_inference_ms(const gcgat_report* r);
GCGAT_API int gcgat_report_to_json(const gcgat_report* r, char** out);
GCGAT_API int gcgat_report_save(const gcgat_report* r, const char* path);
GCGAT_API void gcgat_report_free(gcgat_report* r);

/* Prediction of scene `index` of the dataset. */
GCGAT_API int gcgat_predict(const gcgat_model* model, const gcgat_dataset* ds, size_t index,
                            uint64_t seed, gcgat_prediction** out);
GCGAT_API int gcgat_prediction_save(const gcgat_prediction* p, const char* path);
GCGAT_API int gcgat_prediction_load(const char* path, gcgat_prediction** out);
GCGAT_API size_t gcgat_prediction_modes(const gcgat_prediction* p);
GCGAT_API size_t gcgat_prediction_steps(const gcgat_prediction* p);
/* pi_out receives modes() values. */
GCGAT_API int gcgat_prediction_pi(const gcgat_prediction* p, double* pi_out);
/* Location and Laplace scale of mode k at step t; each output holds (x, y). */
GCGAT_API int gcgat_prediction_point(const gcgat_prediction* p, size_t k, size_t t,
                                     double mu_out[2], double b_out[2]);
GCGAT_API void gcgat_prediction_free(gcgat_prediction* p);

/* SVG drawing of scene `index` with a prediction. */
GCGAT_API int gcgat_plot_svg(const gcgat_dataset* ds, size_t index, const gcgat_prediction* p,
                             const char* path);

#ifdef __cplusplus
}
#endif

#endif  /* GCGAT_GCGAT_H_ */
