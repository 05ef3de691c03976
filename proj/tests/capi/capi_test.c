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

/* The C interface compiled as C: handles, status codes and error messages. */

#include <math.h>
#include <stdio.h>
#include <string.h>

#include "gcgat/gcgat.h"

static int failures = 0;

#define EXPECT(cond)                                                \
  do {                                                              \
    if (!(cond)) {                                                  \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                   \
    }                                                               \
  } while (0)

int main(void) {
  gcgat_config* cfg = NULL;
  gcgat_config* bad = NULL;
  gcgat_dataset* ds = NULL;
  gcgat_model* model = NULL;
  gcgat_prediction* pred = NULL;
  gcgat_report* report = NULL;
  double pi[16];
  double mu[2], b[2], value = 0.0, sum = 0.0;
  size_t k, counts[4];
  char* text = NULL;

  EXPECT(strlen(gcgat_version()) > 0);
  EXPECT(gcgat_config_parse("{\"gen\": {\"taoo\": 1}}", &bad) == GCGAT_ERR_CONFIG);
  EXPECT(bad == NULL);
  EXPECT(strstr(gcgat_last_error(), "taoo") != NULL);
  EXPECT(strcmp(gcgat_status_name(GCGAT_ERR_CONFIG), "ConfigError") == 0);

  EXPECT(gcgat_config_parse("{\"model\": {\"modes\": 4}}", &cfg) == GCGAT_OK);
  EXPECT(gcgat_config_to_json(cfg, &text) == GCGAT_OK);
  EXPECT(text != NULL && strstr(text, "\"modes\": 4") != NULL);
  gcgat_string_free(text);

  EXPECT(gcgat_dataset_generate(cfg, 5, 1, &ds) == GCGAT_OK);
  EXPECT(gcgat_dataset_size(ds) == 5);
  EXPECT(gcgat_dataset_topology_counts(ds, counts) == GCGAT_OK);
  EXPECT(counts[0] + counts[1] + counts[2] + counts[3] == 5);

  EXPECT(gcgat_model_init(cfg, &model) == GCGAT_OK);
  EXPECT(gcgat_model_modes(model) == 4);
  EXPECT(gcgat_model_step(model) == 0);
  EXPECT(gcgat_predict(model, ds, 2, 7, &pred) == GCGAT_OK);
  EXPECT(gcgat_prediction_modes(pred) == 4);
  EXPECT(gcgat_prediction_steps(pred) == gcgat_model_future_steps(model));
  EXPECT(gcgat_prediction_pi(pred, pi) == GCGAT_OK);
  for (k = 0; k < 4; ++k) sum += pi[k];
  EXPECT(fabs(sum - 1.0) < 1e-9);
  EXPECT(gcgat_prediction_point(pred, 0, 0, mu, b) == GCGAT_OK);
  EXPECT(b[0] > 0.0 && b[1] > 0.0);
  EXPECT(gcgat_prediction_point(pred, 4, 0, mu, b) == GCGAT_ERR_INDEX_OUT_OF_RANGE);

  EXPECT(gcgat_predict(model, ds, 5, 7, NULL) == GCGAT_ERR_INVALID_ARGUMENT);
  {
    gcgat_prediction* none = NULL;
    EXPECT(gcgat_predict(model, ds, 5, 7, &none) == GCGAT_ERR_INDEX_OUT_OF_RANGE);
    EXPECT(none == NULL);
  }

  EXPECT(gcgat_evaluate(model, ds, 0, 1, &report) == GCGAT_OK);
  EXPECT(gcgat_report_scene_count(report) == 5);
  EXPECT(gcgat_report_get(report, "min_ade", 5, &value) == GCGAT_OK && value >= 0.0);
  EXPECT(gcgat_report_get(report, "min_ade", 3, &value) == GCGAT_ERR_K_TOO_LARGE);
  EXPECT(gcgat_report_get(report, "bogus", 5, &value) == GCGAT_ERR_INVALID_ARGUMENT);

  EXPECT(gcgat_model_load("/nonexistent/model.ckpt", &model) == GCGAT_ERR_IO);

  gcgat_report_free(report);
  gcgat_prediction_free(pred);
  gcgat_model_free(model);
  gcgat_dataset_free(ds);
  gcgat_config_free(cfg);
  gcgat_config_free(NULL);
  if (failures == 0) printf("capi_test: all checks passed\n");
  return failures == 0 ? 0 : 1;
}
