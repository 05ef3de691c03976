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

// Deterministic mini-batch training of the GC-GAT model.
//
// All randomness is counter-based and derived from TrainConfig::seed: the
// initialization, the per-epoch shuffle, the per-(step, scene) forward noise
// and the validation noise. Per-scene gradients may be computed on worker
// threads; they are summed in batch order, so results do not depend on the
// thread count. Parameters and Adam moments are kept at single precision so a
// checkpoint captures the full training state.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "metrics/metrics.hpp"
#include "model/gcgat_model.hpp"
#include "objectives/losses.hpp"
#include "scenekit/features.hpp"
#include "scenekit/scene.hpp"
#include "trainer/checkpoint.hpp"
#include "trainer/optimizer.hpp"

namespace gcgat::trainer {

struct TrainConfig {
  std::size_t batch_size = 16;
  std::int64_t steps = 2000;
  double learning_rate = 1e-3;
  double final_learning_rate = 1e-4;  // cosine decay target
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double grad_clip_norm = 5.0;  // 0 disables clipping
  std::uint64_t seed = 0;
  std::int64_t eval_every = 200;
  double soft_target_temperature = 1.0;
  std::size_t threads = 1;  // 0 picks the hardware concurrency

  AdamHyper Hyper() const { return {adam_beta1, adam_beta2, adam_eps}; }
  // Throws kConfig on violated invariants.
  void Validate() const;
  bool operator==(const TrainConfig&) const = default;
};

// Cosine decay from learning_rate at step 0 towards final_learning_rate.
double LearningRate(const TrainConfig& cfg, std::int64_t step);

// Seed of the model initialization for a training seed.
std::uint64_t InitSeed(std::uint64_t train_seed);

struct Batch {
  std::vector<std::size_t> scene_indices;  // dataset positions
  std::vector<scene::ModelInputs> inputs;
  std::vector<scene::FuturePath> futures;
  scene::PaddingLimits padding;  // batch max of the real counts
};

// Dataset order of one epoch: a seeded permutation of [0, n).
std::vector<std::size_t> EpochOrder(std::size_t n, std::uint64_t seed, std::uint64_t epoch);

// Encodes the given scenes padded to their joint maximum neighbour and node
// counts. Throws LimitExceeded when a scene exceeds `limits`.
Batch MakeBatch(std::span<const scene::Scene> scenes, std::span<const std::size_t> indices,
                const scene::PaddingLimits& limits);

// One epoch of batches in shuffled order; the last batch may be short.
// Requires target-centric scenes with futures.
std::vector<Batch> MakeBatches(std::span<const scene::Scene> scenes, std::size_t batch_size,
                               std::uint64_t seed, const scene::PaddingLimits& limits,
                               std::uint64_t epoch = 0);

// Forward and backward over every scene of the batch, mean total loss, global
// norm clipping and one Adam update at step state.step. Throws
// NonFiniteLossError naming the dataset index of the offending scene; the
// model and the optimizer state are then left untouched.
objectives::LossBreakdown TrainStep(model::GcgatModel& model, OptimizerState& state,
                                    const Batch& batch, const TrainConfig& cfg);

struct LogRecord {
  std::int64_t step = 0;  // updates completed
  double l_reg = 0.0;
  double l_cls = 0.0;
  double l_ade = 0.0;
  double total = 0.0;
  double val_min_ade_5 = 0.0;
  bool operator==(const LogRecord&) const = default;
};

// One JSON object per line.
std::string LogRecordToJson(const LogRecord& record);

struct FitOptions {
  const Checkpoint* resume = nullptr;  // continue from this state
  std::int64_t stop_after = -1;        // stop once this many updates are done
  std::function<void(const LogRecord&)> on_log;
};

struct FitResult {
  Checkpoint checkpoint;
  std::vector<LogRecord> log;
};

// Trains for cfg.steps updates (or until stop_after), evaluating val minADE_5
// every eval_every updates and after the last one. Scenes in the global frame
// are moved to the target-centric frame first.
FitResult Fit(std::span<const scene::Scene> train, std::span<const scene::Scene> val,
              const model::ModelConfig& model_cfg, const TrainConfig& cfg,
              const FitOptions& options = {});

struct AblationRow {
  model::AblationFlags flags;
  metrics::MetricsReport report;
};

// Trains (goal proposals, cross-attention) in {F,F}, {T,F}, {F,T}, {T,T}
// with the same seeds and reports each on the validation set.
std::vector<AblationRow> RunAblation(std::span<const scene::Scene> train,
                                     std::span<const scene::Scene> val,
                                     const model::ModelConfig& base, const TrainConfig& cfg);

std::string AblationTable(const std::vector<AblationRow>& rows);

}  // namespace gcgat::trainer
