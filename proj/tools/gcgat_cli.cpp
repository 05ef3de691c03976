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

// gcgat command-line tool: generate, train, eval, predict, plot and ablate.
// Exit codes: 0 success, 2 config, 3 non-finite loss, 4 missing ground truth,
// 5 bad index, 6 horizon mismatch, 1 anything else.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "gcgat/gcgat.h"

namespace {

// Thrown by Check on a failed library call; carries the exit code.
struct Failure {
  int exit_code;
};

int ExitCodeFor(int status) {
  return status >= GCGAT_ERR_CONFIG && status <= GCGAT_ERR_HORIZON_MISMATCH ? status : 1;
}

void Check(int status, const std::string& context) {
  if (status == GCGAT_OK) return;
  std::cerr << "error: " << context << ": " << gcgat_status_name(status) << ": "
            << gcgat_last_error() << "\n";
  throw Failure{ExitCodeFor(status)};
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(ptr); }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};

using Config = Handle<gcgat_config, gcgat_config_free>;
using Dataset = Handle<gcgat_dataset, gcgat_dataset_free>;
using Model = Handle<gcgat_model, gcgat_model_free>;
using Report = Handle<gcgat_report, gcgat_report_free>;
using Prediction = Handle<gcgat_prediction, gcgat_prediction_free>;

void LoadConfigOrDefault(const std::string& path, Config& cfg) {
  if (path.empty()) {
    Check(gcgat_config_default(cfg.out()), "default config");
  } else {
    Check(gcgat_config_load(path.c_str(), cfg.out()), "config '" + path + "'");
  }
}

void LoadDataset(const std::string& path, Dataset& ds) {
  Check(gcgat_dataset_load(path.c_str(), ds.out()), "dataset '" + path + "'");
}

double Metric(const gcgat_report* r, const char* name, std::size_t k) {
  double v = 0.0;
  Check(gcgat_report_get(r, name, k, &v), name);
  return v;
}

void PrintReport(const std::string& label, const gcgat_report* r) {
  std::printf("%s scenes %zu", label.c_str(), gcgat_report_scene_count(r));
  for (std::size_t k : {1, 5, 10}) {
    double v = 0.0;
    if (gcgat_report_get(r, "min_ade", k, &v) == GCGAT_OK)
      std::printf(" min_ade_%zu %.4f min_fde_%zu %.4f miss_rate_%zu %.4f", k, v, k,
                  Metric(r, "min_fde", k), k, Metric(r, "miss_rate", k));
  }
  std::printf(" offroad_rate %.4f\n", gcgat_report_offroad_rate(r));
}

struct LogSink {
  std::ofstream file;
};

void WriteLog(const char* line, void* user) {
  auto* sink = static_cast<LogSink*>(user);
  sink->file << line << '\n';
  sink->file.flush();
  std::printf("%s\n", line);
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GC-GAT trajectory prediction"};
  app.require_subcommand(1);
  app.set_version_flag("--version", gcgat_version());

  std::string out, config_path, data, val, ckpt, resume, log_path, scene_file, pred, baseline;
  std::size_t scenes = 0, index = 0, threads = 0;
  std::uint64_t seed = 0;
  std::int64_t stop_after = -1;

  auto* gen = app.add_subcommand("generate", "Generate a synthetic dataset");
  gen->add_option("--out", out, "Dataset file to write")->required();
  gen->add_option("--scenes", scenes, "Number of scenes")->required();
  gen->add_option("--seed", seed, "Dataset seed");
  gen->add_option("--config", config_path, "Config file");

  auto* train = app.add_subcommand("train", "Train a model");
  train->add_option("--data", data, "Training dataset")->required();
  train->add_option("--val", val, "Validation dataset")->required();
  train->add_option("--config", config_path, "Config file");
  train->add_option("--out", out, "Checkpoint to write")->required();
  train->add_option("--log", log_path, "Training log (default: <out>.log)");
  train->add_option("--resume", resume, "Checkpoint to continue from");
  train->add_option("--stop-after", stop_after, "Stop after this many updates");

  auto* eval = app.add_subcommand("eval", "Evaluate a model or the baseline");
  eval->add_option("--data", data, "Dataset with ground truth")->required();
  auto* ckpt_opt = eval->add_option("--ckpt", ckpt, "Checkpoint");
  auto* base_opt = eval->add_option("--baseline", baseline, "Closed-form baseline")
                       ->check(CLI::IsMember({"constant_velocity"}));
  ckpt_opt->excludes(base_opt);
  eval->add_option("--config", config_path, "Config file (baseline step duration)");
  eval->add_option("--seed", seed, "Noise seed");
  eval->add_option("--threads", threads, "Worker threads (0: all cores)");
  eval->add_option("--out", out, "Report file to write")->required();

  auto* predict = app.add_subcommand("predict", "Predict one scene");
  predict->add_option("--scene-file", scene_file, "Dataset file")->required();
  predict->add_option("--index", index, "Scene index")->required();
  predict->add_option("--ckpt", ckpt, "Checkpoint")->required();
  predict->add_option("--seed", seed, "Noise seed");
  predict->add_option("--out", out, "Prediction file to write")->required();

  auto* plot = app.add_subcommand("plot", "Draw a scene and its prediction as SVG");
  plot->add_option("--scene-file", scene_file, "Dataset file")->required();
  plot->add_option("--index", index, "Scene index")->required();
  plot->add_option("--pred", pred, "Prediction file")->required();
  plot->add_option("--out", out, "SVG file to write")->required();

  auto* ablate = app.add_subcommand("ablate", "Train the four interactor ablations");
  ablate->add_option("--data", data, "Training dataset")->required();
  ablate->add_option("--val", val, "Validation dataset")->required();
  ablate->add_option("--config", config_path, "Config file");
  ablate->add_option("--out", out, "Table file to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      Config cfg;
      LoadConfigOrDefault(config_path, cfg);
      Dataset ds;
      Check(gcgat_dataset_generate(cfg.get(), scenes, seed, ds.out()), "generate");
      Check(gcgat_dataset_save(ds.get(), out.c_str()), "write '" + out + "'");
      std::size_t counts[4];
      Check(gcgat_dataset_topology_counts(ds.get(), counts), "topology counts");
      std::printf("generated %zu scenes: straight %zu, curve %zu, t_junction %zu, crossroads %zu\n",
                  gcgat_dataset_size(ds.get()), counts[0], counts[1], counts[2], counts[3]);
    } else if (*train) {
      Config cfg;
      LoadConfigOrDefault(config_path, cfg);
      Dataset train_ds, val_ds;
      LoadDataset(data, train_ds);
      LoadDataset(val, val_ds);
      Model start;
      if (!resume.empty()) Check(gcgat_model_load(resume.c_str(), start.out()), "resume");
      LogSink sink;
      if (log_path.empty()) log_path = out + ".log";
      sink.file.open(log_path, resume.empty() ? std::ios::trunc : std::ios::app);
      if (!sink.file) {
        std::cerr << "error: cannot write log '" << log_path << "'\n";
        return 1;
      }
      Model model;
      Check(gcgat_train(cfg.get(), train_ds.get(), val_ds.get(), start.get(), stop_after,
                        WriteLog, &sink, model.out()),
            "train");
      Check(gcgat_model_save(model.get(), out.c_str()), "write '" + out + "'");
      Report report;
      Check(gcgat_evaluate(model.get(), val_ds.get(), 0, 0, report.out()), "evaluate");
      PrintReport("final val step " + std::to_string(gcgat_model_step(model.get())), report.get());
    } else if (*eval) {
      if (ckpt.empty() && baseline.empty()) {
        std::cerr << "error: eval needs --ckpt or --baseline\n";
        return 2;
      }
      Dataset ds;
      LoadDataset(data, ds);
      Report report;
      if (!baseline.empty()) {
        Config cfg;
        LoadConfigOrDefault(config_path, cfg);
        Check(gcgat_evaluate_baseline(cfg.get(), ds.get(), report.out()), "evaluate");
      } else {
        Model model;
        Check(gcgat_model_load(ckpt.c_str(), model.out()), "checkpoint '" + ckpt + "'");
        Check(gcgat_evaluate(model.get(), ds.get(), seed, threads, report.out()), "evaluate");
      }
      Check(gcgat_report_save(report.get(), out.c_str()), "write '" + out + "'");
      PrintReport(baseline.empty() ? "model" : baseline, report.get());
      std::printf("mean inference time %.3f ms/scene\n",
                  gcgat_report_mean_inference_ms(report.get()));
    } else if (*predict) {
      Dataset ds;
      LoadDataset(scene_file, ds);
      Model model;
      Check(gcgat_model_load(ckpt.c_str(), model.out()), "checkpoint '" + ckpt + "'");
      Prediction p;
      Check(gcgat_predict(model.get(), ds.get(), index, seed, p.out()), "predict");
      Check(gcgat_prediction_save(p.get(), out.c_str()), "write '" + out + "'");
    } else if (*plot) {
      Dataset ds;
      LoadDataset(scene_file, ds);
      Prediction p;
      Check(gcgat_prediction_load(pred.c_str(), p.out()), "prediction '" + pred + "'");
      Check(gcgat_plot_svg(ds.get(), index, p.get(), out.c_str()), "plot");
    } else if (*ablate) {
      Config cfg;
      LoadConfigOrDefault(config_path, cfg);
      Dataset train_ds, val_ds;
      LoadDataset(data, train_ds);
      LoadDataset(val, val_ds);
      char* table = nullptr;
      Check(gcgat_ablate(cfg.get(), train_ds.get(), val_ds.get(), &table), "ablate");
      std::unique_ptr<char, void (*)(char*)> owned(table, gcgat_string_free);
      std::ofstream f(out, std::ios::trunc);
      f << table;
      if (!f) {
        std::cerr << "error: cannot write '" << out << "'\n";
        return 1;
      }
      std::printf("%s", table);
    }
  } catch (const Failure& f) {
    return f.exit_code;
  }
  return 0;
}
