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

#include "gcgat/gcgat.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "common/error.hpp"
#include "config/config_io.hpp"
#include "metrics/metrics.hpp"
#include "model/gcgat_model.hpp"
#include "model/prediction_io.hpp"
#include "scenekit/generator.hpp"
#include "scenekit/serialize.hpp"
#include "scenekit/transform.hpp"
#include "trainer/checkpoint.hpp"
#include "trainer/trainer.hpp"
#include "viz/svg_plot.hpp"

struct gcgat_config {
  gcgat::config::AppConfig value;
};

struct gcgat_dataset {
  std::vector<gcgat::scene::Scene> scenes;
};

struct gcgat_model {
  gcgat::trainer::Checkpoint checkpoint;
  gcgat::model::GcgatModel model;
};

struct gcgat_report {
  gcgat::metrics::MetricsReport value;
};

struct gcgat_prediction {
  gcgat::model::PredictionSet value;
};

namespace {

using gcgat::ErrorCode;

thread_local std::string last_error;

template <typename Fn>
int Guard(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return GCGAT_OK;
  } catch (const gcgat::Error& e) {
    last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return GCGAT_ERR_INTERNAL;
}

void NotNull(const void* p, const char* what) {
  gcgat::Require(p != nullptr, ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

gcgat_model* WrapCheckpoint(gcgat::trainer::Checkpoint ckpt) {
  auto model = gcgat::trainer::RestoreModel(ckpt);
  return new gcgat_model{std::move(ckpt), std::move(model)};
}

const gcgat::scene::Scene& SceneAt(const gcgat_dataset* ds, std::size_t index) {
  NotNull(ds, "dataset");
  gcgat::Require(index < ds->scenes.size(), ErrorCode::kIndexOutOfRange,
                 "scene index " + std::to_string(index) + " out of range (dataset has " +
                     std::to_string(ds->scenes.size()) + " scenes)");
  return ds->scenes[index];
}

}  // namespace

extern "C" {

const char* gcgat_version(void) { return "1.0.0"; }

const char* gcgat_last_error(void) { return last_error.c_str(); }

const char* gcgat_status_name(int status) {
  if (status == GCGAT_OK) return "Ok";
  if (status == GCGAT_ERR_INTERNAL) return "Internal";
  return gcgat::ErrorCodeName(static_cast<ErrorCode>(status));
}

void gcgat_string_free(char* s) { std::free(s); }

int gcgat_config_default(gcgat_config** out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = new gcgat_config{};
  });
}

int gcgat_config_parse(const char* json_text, gcgat_config** out) {
  return Guard([&] {
    NotNull(json_text, "json_text");
    NotNull(out, "out");
    *out = new gcgat_config{gcgat::config::ParseConfig(json_text)};
  });
}

int gcgat_config_load(const char* path, gcgat_config** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = new gcgat_config{gcgat::config::LoadConfig(path)};
  });
}

int gcgat_config_to_json(const gcgat_config* cfg, char** out) {
  return Guard([&] {
    NotNull(cfg, "config");
    NotNull(out, "out");
    *out = CopyString(gcgat::config::AppConfigToJson(cfg->value).dump(2));
  });
}

void gcgat_config_free(gcgat_config* cfg) { delete cfg; }

int gcgat_dataset_generate(const gcgat_config* cfg, size_t count, uint64_t seed,
                           gcgat_dataset** out) {
  return Guard([&] {
    NotNull(cfg, "config");
    NotNull(out, "out");
    *out = new gcgat_dataset{gcgat::scene::GenerateDataset(count, seed, cfg->value.gen)};
  });
}

int gcgat_dataset_load(const char* path, gcgat_dataset** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = new gcgat_dataset{gcgat::scene::LoadDataset(path)};
  });
}

int gcgat_dataset_save(const gcgat_dataset* ds, const char* path) {
  return Guard([&] {
    NotNull(ds, "dataset");
    NotNull(path, "path");
    gcgat::scene::SaveDataset(ds->scenes, path);
  });
}

size_t gcgat_dataset_size(const gcgat_dataset* ds) { return ds ? ds->scenes.size() : 0; }

int gcgat_dataset_topology_counts(const gcgat_dataset* ds, size_t counts[4]) {
  return Guard([&] {
    NotNull(ds, "dataset");
    NotNull(counts, "counts");
    for (int i = 0; i < 4; ++i) counts[i] = 0;
    for (const auto& s : ds->scenes) {
      const int t = static_cast<int>(s.meta.topology);
      if (t >= 0 && t < 4) ++counts[t];
    }
  });
}

void gcgat_dataset_free(gcgat_dataset* ds) { delete ds; }

int gcgat_model_init(const gcgat_config* cfg, gcgat_model** out) {
  return Guard([&] {
    NotNull(cfg, "config");
    NotNull(out, "out");
    const auto& c = cfg->value;
    c.model.Validate();
    auto model =
        gcgat::model::GcgatModel::Create(c.model, gcgat::trainer::InitSeed(c.train.seed));
    const auto state = gcgat::trainer::OptimizerState::Zeros(model.params());
    *out = WrapCheckpoint(gcgat::trainer::MakeCheckpoint(model, state, c.train.seed));
  });
}

int gcgat_model_save(const gcgat_model* model, const char* path) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(path, "path");
    gcgat::trainer::SaveCheckpoint(model->checkpoint, path);
  });
}

int gcgat_model_load(const char* path, gcgat_model** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = WrapCheckpoint(gcgat::trainer::LoadCheckpoint(path));
  });
}

size_t gcgat_model_modes(const gcgat_model* model) {
  return model ? model->checkpoint.model_config.modes : 0;
}

size_t gcgat_model_future_steps(const gcgat_model* model) {
  return model ? model->checkpoint.model_config.future_steps : 0;
}

int64_t gcgat_model_step(const gcgat_model* model) {
  return model ? model->checkpoint.optimizer.step : 0;
}

void gcgat_model_free(gcgat_model* model) { delete model; }

int gcgat_train(const gcgat_config* cfg, const gcgat_dataset* train, const gcgat_dataset* val,
                const gcgat_model* resume, int64_t stop_after, gcgat_log_fn log, void* user,
                gcgat_model** out) {
  return Guard([&] {
    NotNull(cfg, "config");
    NotNull(train, "train dataset");
    NotNull(val, "validation dataset");
    NotNull(out, "out");
    gcgat::trainer::FitOptions options;
    options.resume = resume ? &resume->checkpoint : nullptr;
    options.stop_after = stop_after;
    if (log) {
      options.on_log = [&](const gcgat::trainer::LogRecord& r) {
        log(gcgat::trainer::LogRecordToJson(r).c_str(), user);
      };
    }
    auto result = gcgat::trainer::Fit(train->scenes, val->scenes, cfg->value.model,
                                      cfg->value.train, options);
    *out = WrapCheckpoint(std::move(result.checkpoint));
  });
}

int gcgat_ablate(const gcgat_config* cfg, const gcgat_dataset* train, const gcgat_dataset* val,
                 char** table_out) {
  return Guard([&] {
    NotNull(cfg, "config");
    NotNull(train, "train dataset");
    NotNull(val, "validation dataset");
    NotNull(table_out, "table_out");
    const auto rows = gcgat::trainer::RunAblation(train->scenes, val->scenes, cfg->value.model,
                                                  cfg->value.train);
    *table_out = CopyString(gcgat::trainer::AblationTable(rows));
  });
}

int gcgat_evaluate(const gcgat_model* model, const gcgat_dataset* ds, uint64_t seed,
                   size_t threads, gcgat_report** out) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(ds, "dataset");
    NotNull(out, "out");
    gcgat::metrics::EvalConfig ec;
    ec.seed = seed;
    ec.threads = threads;
    *out = new gcgat_report{gcgat::metrics::EvaluateModel(model->model, ds->scenes, ec)};
  });
}

int gcgat_evaluate_baseline(const gcgat_config* cfg, const gcgat_dataset* ds,
                            gcgat_report** out) {
  return Guard([&] {
    NotNull(cfg, "config");
    NotNull(ds, "dataset");
    NotNull(out, "out");
    const double dt = cfg->value.gen.step_dt;
    const gcgat::metrics::Predictor baseline = [dt](const gcgat::scene::Scene& s, std::size_t) {
      return gcgat::metrics::ConstantVelocityPrediction(s, s.future->points.size(), dt);
    };
    *out = new gcgat_report{gcgat::metrics::Evaluate(ds->scenes, baseline)};
  });
}

int gcgat_report_get(const gcgat_report* r, const char* metric, size_t k, double* out) {
  return Guard([&] {
    NotNull(r, "report");
    NotNull(metric, "metric");
    NotNull(out, "out");
    const std::string m = metric;
    const std::map<std::size_t, double>* table = m == "min_ade"     ? &r->value.min_ade
                                                 : m == "min_fde"   ? &r->value.min_fde
                                                 : m == "miss_rate" ? &r->value.miss_rate
                                                                    : nullptr;
    gcgat::Require(table != nullptr, ErrorCode::kInvalidArgument, "unknown metric '" + m + "'");
    const auto it = table->find(k);
    gcgat::Require(it != table->end(), ErrorCode::kKTooLarge,
                   "report has no " + m + " at K=" + std::to_string(k));
    *out = it->second;
  });
}

double gcgat_report_offroad_rate(const gcgat_report* r) { return r ? r->value.offroad_rate : 0.0; }

size_t gcgat_report_scene_count(const gcgat_report* r) { return r ? r->value.scene_count : 0; }

double gcgat_report_mean_inference_ms(const gcgat_report* r) {
  return r ? r->value.mean_inference_ms : 0.0;
}

int gcgat_report_to_json(const gcgat_report* r, char** out) {
  return Guard([&] {
    NotNull(r, "report");
    NotNull(out, "out");
    *out = CopyString(gcgat::metrics::ReportToJson(r->value));
  });
}

int gcgat_report_save(const gcgat_report* r, const char* path) {
  return Guard([&] {
    NotNull(r, "report");
    NotNull(path, "path");
    std::ofstream f(path, std::ios::trunc);
    gcgat::Require(f.good(), ErrorCode::kIo, std::string("cannot write '") + path + "'");
    f << gcgat::metrics::ReportToJson(r->value) << '\n';
    gcgat::Require(f.good(), ErrorCode::kIo, std::string("failed writing '") + path + "'");
  });
}

void gcgat_report_free(gcgat_report* r) { delete r; }

int gcgat_predict(const gcgat_model* model, const gcgat_dataset* ds, size_t index, uint64_t seed,
                  gcgat_prediction** out) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(out, "out");
    const auto& s = SceneAt(ds, index);
    const auto tc = s.frame == gcgat::scene::Frame::kGlobal ? gcgat::scene::ToAgentFrame(s) : s;
    *out = new gcgat_prediction{model->model.Predict(tc, seed)};
  });
}

int gcgat_prediction_save(const gcgat_prediction* p, const char* path) {
  return Guard([&] {
    NotNull(p, "prediction");
    NotNull(path, "path");
    gcgat::model::SavePrediction(p->value, path);
  });
}

int gcgat_prediction_load(const char* path, gcgat_prediction** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = new gcgat_prediction{gcgat::model::LoadPrediction(path)};
  });
}

size_t gcgat_prediction_modes(const gcgat_prediction* p) { return p ? p->value.modes() : 0; }

size_t gcgat_prediction_steps(const gcgat_prediction* p) {
  return p && p->value.modes() ? p->value.steps() : 0;
}

int gcgat_prediction_pi(const gcgat_prediction* p, double* pi_out) {
  return Guard([&] {
    NotNull(p, "prediction");
    NotNull(pi_out, "pi_out");
    for (std::size_t k = 0; k < p->value.modes(); ++k) pi_out[k] = p->value.pi[k];
  });
}

int gcgat_prediction_point(const gcgat_prediction* p, size_t k, size_t t, double mu_out[2],
                           double b_out[2]) {
  return Guard([&] {
    NotNull(p, "prediction");
    gcgat::Require(k < p->value.modes() && t < p->value.steps(), ErrorCode::kIndexOutOfRange,
                   "mode or step out of range");
    for (std::size_t d = 0; d < 2; ++d) {
      if (mu_out) mu_out[d] = p->value.mu(k, t, d);
      if (b_out) b_out[d] = p->value.b(k, t, d);
    }
  });
}

void gcgat_prediction_free(gcgat_prediction* p) { delete p; }

int gcgat_plot_svg(const gcgat_dataset* ds, size_t index, const gcgat_prediction* p,
                   const char* path) {
  return Guard([&] {
    NotNull(p, "prediction");
    NotNull(path, "path");
    gcgat::viz::SaveSvg(SceneAt(ds, index), p->value, path);
  });
}

}  // extern "C"
