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

#include "trainer/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "common/error.hpp"
#include "common/parallel.hpp"
#include "diffcore/rng.hpp"
#include "json.hpp"
#include "scenekit/transform.hpp"

namespace gcgat::trainer {

using diff::RngStream;

namespace {

enum StreamLabel : std::uint64_t { kInit = 1, kShuffle = 2, kNoise = 3, kValidation = 4 };

std::vector<scene::Scene> TargetCentric(std::span<const scene::Scene> scenes) {
  std::vector<scene::Scene> out;
  out.reserve(scenes.size());
  for (const auto& s : scenes) {
    Require(s.future.has_value(), ErrorCode::kMissingGroundTruth,
            "training scene has no ground-truth future");
    out.push_back(s.frame == scene::Frame::kGlobal ? scene::ToAgentFrame(s) : s);
  }
  return out;
}

bool AllFinite(const diff::Tensor& t) {
  return std::all_of(t.values().begin(), t.values().end(), [](double x) { return std::isfinite(x); });
}

double ValidationMinAde5(const model::GcgatModel& model, std::span<const scene::Scene> val,
                         const TrainConfig& cfg) {
  metrics::EvalConfig ec;
  ec.seed = RngStream::Derive(cfg.seed, kValidation);
  ec.ks = {5};
  ec.threads = cfg.threads;
  return metrics::EvaluateModel(model, val, ec).min_ade.at(5);
}

}  // namespace

void TrainConfig::Validate() const {
  Require(batch_size >= 1, ErrorCode::kConfig, "train.batch_size must be >= 1");
  Require(steps >= 0, ErrorCode::kConfig, "train.steps must be >= 0");
  Require(learning_rate >= 0.0, ErrorCode::kConfig, "train.learning_rate must be >= 0");
  Require(final_learning_rate >= 0.0, ErrorCode::kConfig,
          "train.final_learning_rate must be >= 0");
  Require(adam_beta1 >= 0.0 && adam_beta1 < 1.0, ErrorCode::kConfig,
          "train.adam_beta1 must be in [0, 1)");
  Require(adam_beta2 >= 0.0 && adam_beta2 < 1.0, ErrorCode::kConfig,
          "train.adam_beta2 must be in [0, 1)");
  Require(adam_eps > 0.0, ErrorCode::kConfig, "train.adam_eps must be > 0");
  Require(grad_clip_norm >= 0.0, ErrorCode::kConfig, "train.grad_clip_norm must be >= 0");
  Require(eval_every >= 1, ErrorCode::kConfig, "train.eval_every must be >= 1");
  Require(soft_target_temperature > 0.0, ErrorCode::kConfig,
          "train.soft_target_temperature must be > 0");
}

double LearningRate(const TrainConfig& cfg, std::int64_t step) {
  if (cfg.steps <= 0) return cfg.learning_rate;
  const double progress =
      std::clamp(static_cast<double>(step) / static_cast<double>(cfg.steps), 0.0, 1.0);
  return cfg.final_learning_rate + 0.5 * (cfg.learning_rate - cfg.final_learning_rate) *
                                       (1.0 + std::cos(std::numbers::pi * progress));
}

std::uint64_t InitSeed(std::uint64_t train_seed) { return RngStream::Derive(train_seed, kInit); }

std::vector<std::size_t> EpochOrder(std::size_t n, std::uint64_t seed, std::uint64_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RngStream rng(RngStream::Derive(RngStream::Derive(seed, kShuffle), epoch));
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.Below(i)]);
  return order;
}

Batch MakeBatch(std::span<const scene::Scene> scenes, std::span<const std::size_t> indices,
                const scene::PaddingLimits& limits) {
  Batch b;
  b.padding = {0, 0};
  for (std::size_t i : indices) {
    Require(i < scenes.size(), ErrorCode::kIndexOutOfRange, "batch index out of range");
    const auto& s = scenes[i];
    Require(s.frame == scene::Frame::kTargetCentric, ErrorCode::kInvalidArgument,
            "batches require target-centric scenes");
    Require(s.future.has_value(), ErrorCode::kMissingGroundTruth,
            "batch scene " + std::to_string(i) + " has no ground-truth future");
    Require(s.neighbors.size() <= limits.max_neighbors, ErrorCode::kLimitExceeded,
            "scene " + std::to_string(i) + " has " + std::to_string(s.neighbors.size()) +
                " neighbors, limit " + std::to_string(limits.max_neighbors));
    Require(s.graph.nodes.size() <= limits.max_nodes, ErrorCode::kLimitExceeded,
            "scene " + std::to_string(i) + " has " + std::to_string(s.graph.nodes.size()) +
                " lane nodes, limit " + std::to_string(limits.max_nodes));
    b.padding.max_neighbors = std::max(b.padding.max_neighbors, s.neighbors.size());
    b.padding.max_nodes = std::max(b.padding.max_nodes, s.graph.nodes.size());
  }
  b.padding.max_nodes = std::max<std::size_t>(b.padding.max_nodes, 1);
  for (std::size_t i : indices) {
    b.scene_indices.push_back(i);
    b.inputs.push_back(scene::EncodeFeatures(scenes[i], b.padding));
    b.futures.push_back(*scenes[i].future);
  }
  return b;
}

std::vector<Batch> MakeBatches(std::span<const scene::Scene> scenes, std::size_t batch_size,
                               std::uint64_t seed, const scene::PaddingLimits& limits,
                               std::uint64_t epoch) {
  Require(batch_size >= 1, ErrorCode::kInvalidArgument, "batch_size must be >= 1");
  const auto order = EpochOrder(scenes.size(), seed, epoch);
  std::vector<Batch> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t end = std::min(order.size(), start + batch_size);
    batches.push_back(
        MakeBatch(scenes, std::span<const std::size_t>(order).subspan(start, end - start), limits));
  }
  return batches;
}

objectives::LossBreakdown TrainStep(model::GcgatModel& model, OptimizerState& state,
                                    const Batch& batch, const TrainConfig& cfg) {
  const std::size_t n = batch.inputs.size();
  Require(n >= 1 && batch.futures.size() == n && batch.scene_indices.size() == n,
          ErrorCode::kInvalidArgument, "empty or inconsistent batch");
  const auto& mcfg = model.config();
  const std::int64_t step = state.step;
  const std::uint64_t step_seed =
      RngStream::Derive(RngStream::Derive(cfg.seed, kNoise), static_cast<std::uint64_t>(step));

  std::vector<objectives::LossTerms> terms(n);
  std::vector<std::vector<std::vector<double>>> grads(n);
  ParallelChunks(n, cfg.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto noise = model::ForwardNoise::Draw(
          mcfg, RngStream::Derive(step_seed, batch.scene_indices[i]));
      const auto gt = objectives::GroundTruthRow(batch.futures[i], mcfg.future_steps);
      diff::Binding binding(model.params());
      const auto out = model.Forward(binding, batch.inputs[i], noise);
      if (!AllFinite(out.pi.value()) || !AllFinite(out.mu.value()) || !AllFinite(out.b.value()))
        throw NonFiniteLossError(step, batch.scene_indices[i]);
      terms[i] = objectives::TotalLoss(out.pi, out.mu, out.b, gt, cfg.soft_target_temperature);
      if (!std::isfinite(terms[i].total.item())) {
        throw NonFiniteLossError(step, batch.scene_indices[i]);
      }
      diff::Backward(terms[i].total);
      grads[i] = diff::ZeroGradients(model.params());
      binding.AccumulateGradients(grads[i]);
    }
  });

  auto total = diff::ZeroGradients(model.params());
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = 0; p < total.size(); ++p)
      for (std::size_t j = 0; j < total[p].size(); ++j) total[p][j] += grads[i][p][j];
  for (auto& g : total)
    for (double& x : g) x *= inv;
  for (const auto& g : total)
    for (double x : g)
      Require(std::isfinite(x), ErrorCode::kNonFiniteLoss,
              "non-finite gradient at step " + std::to_string(step));

  ClipGlobalNorm(total, cfg.grad_clip_norm);
  AdamStep(model.params(), state, total, LearningRate(cfg, step), cfg.Hyper());
  RoundToSinglePrecision(model.params(), state);
  return objectives::Summarize(terms);
}

std::string LogRecordToJson(const LogRecord& r) {
  const nlohmann::json j = {{"step", r.step},     {"l_reg", r.l_reg},
                            {"l_cls", r.l_cls},   {"l_ade", r.l_ade},
                            {"total", r.total},   {"val_min_ade_5", r.val_min_ade_5}};
  return j.dump();
}

FitResult Fit(std::span<const scene::Scene> train, std::span<const scene::Scene> val,
              const model::ModelConfig& model_cfg, const TrainConfig& cfg,
              const FitOptions& options) {
  model_cfg.Validate();
  cfg.Validate();
  Require(!train.empty(), ErrorCode::kInvalidArgument, "training set is empty");
  Require(!val.empty(), ErrorCode::kInvalidArgument, "validation set is empty");
  const auto train_tc = TargetCentric(train);
  const auto val_tc = TargetCentric(val);

  model::GcgatModel model = model::GcgatModel::Create(model_cfg, InitSeed(cfg.seed));
  OptimizerState state = OptimizerState::Zeros(model.params());
  if (options.resume) {
    const Checkpoint& c = *options.resume;
    Require(c.model_config == model_cfg, ErrorCode::kConfig,
            "checkpoint model config differs from the requested one");
    Require(c.seed == cfg.seed, ErrorCode::kConfig,
            "checkpoint training seed differs from train.seed");
    model = RestoreModel(c);
    state = c.optimizer;
    Require(state.m.size() == model.params().size(), ErrorCode::kFormat,
            "checkpoint optimizer state does not match the model");
  }

  const std::int64_t last =
      options.stop_after >= 0 ? std::min(cfg.steps, options.stop_after) : cfg.steps;
  const std::size_t per_epoch = (train_tc.size() + cfg.batch_size - 1) / cfg.batch_size;
  std::uint64_t cached_epoch = ~std::uint64_t{0};
  std::vector<std::size_t> order;

  FitResult result;
  while (state.step < last) {
    const auto step = static_cast<std::uint64_t>(state.step);
    const std::uint64_t epoch = step / per_epoch;
    if (epoch != cached_epoch) {
      order = EpochOrder(train_tc.size(), cfg.seed, epoch);
      cached_epoch = epoch;
    }
    const std::size_t start = (step % per_epoch) * cfg.batch_size;
    const std::size_t count = std::min(cfg.batch_size, order.size() - start);
    const Batch batch = MakeBatch(
        train_tc, std::span<const std::size_t>(order).subspan(start, count), model_cfg.Limits());
    const auto losses = TrainStep(model, state, batch, cfg);

    if (state.step % cfg.eval_every == 0 || state.step == cfg.steps) {
      LogRecord r{state.step,     losses.l_reg, losses.l_cls,
                  losses.l_ade,   losses.total, ValidationMinAde5(model, val_tc, cfg)};
      result.log.push_back(r);
      if (options.on_log) options.on_log(r);
    }
  }
  result.checkpoint = MakeCheckpoint(model, state, cfg.seed);
  return result;
}

std::vector<AblationRow> RunAblation(std::span<const scene::Scene> train,
                                     std::span<const scene::Scene> val,
                                     const model::ModelConfig& base, const TrainConfig& cfg) {
  std::vector<AblationRow> rows;
  for (const model::AblationFlags flags :
       {model::AblationFlags{false, false}, model::AblationFlags{true, false},
        model::AblationFlags{false, true}, model::AblationFlags{true, true}}) {
    model::ModelConfig mc = base;
    mc.ablation = flags;
    const auto fit = Fit(train, val, mc, cfg);
    metrics::EvalConfig ec;
    ec.seed = RngStream::Derive(cfg.seed, kValidation);
    ec.threads = cfg.threads;
    rows.push_back({flags, metrics::EvaluateModel(RestoreModel(fit.checkpoint), val, ec)});
  }
  return rows;
}

std::string AblationTable(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << "goal_proposals cross_attention min_ade_5 min_fde_5 miss_rate_5 offroad_rate\n";
  for (const auto& r : rows) {
    auto at = [](const std::map<std::size_t, double>& m) {
      auto it = m.find(5);
      return it == m.end() ? std::nan("") : it->second;
    };
    out << (r.flags.use_goal_proposals ? 'T' : 'F') << ' '
        << (r.flags.use_cross_attention ? 'T' : 'F') << ' ' << at(r.report.min_ade) << ' '
        << at(r.report.min_fde) << ' ' << at(r.report.miss_rate) << ' '
        << r.report.offroad_rate << '\n';
  }
  return out.str();
}

}  // namespace gcgat::trainer
