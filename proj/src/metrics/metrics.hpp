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

// nuScenes-style evaluation: minADE_K, minFDE_K, MissRate_{K,2m} and
// OffRoadRate, plus dataset aggregation and the constant-velocity baseline.
//
// Top-K modes are the K largest mixing coefficients (stable on ties, so the
// top-K sets are nested in K). Predictions and graphs must share a frame.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "model/gcgat_model.hpp"
#include "scenekit/scene.hpp"

namespace gcgat::metrics {

using model::PredictionSet;

inline constexpr double kMissThreshold = 2.0;  // m

// Indices of the k largest pi entries, largest first. Throws KTooLarge when
// k exceeds the mode count and InvalidArgument when k is 0.
std::vector<std::size_t> TopKModes(const std::vector<double>& pi, std::size_t k);

// Mean point-wise distance of one mode to the ground truth.
double ModeAde(const PredictionSet& pred, std::size_t mode, const scene::FuturePath& gt);
// Distance of one mode's final point to the final ground-truth point.
double ModeFde(const PredictionSet& pred, std::size_t mode, const scene::FuturePath& gt);
// Largest point-wise distance of one mode to the ground truth.
double ModeMaxDeviation(const PredictionSet& pred, std::size_t mode,
                        const scene::FuturePath& gt);

double MinAdeK(const PredictionSet& pred, const scene::FuturePath& gt, std::size_t k);
double MinFdeK(const PredictionSet& pred, const scene::FuturePath& gt, std::size_t k);

// True iff every top-k mode deviates by strictly more than `threshold`.
bool IsMiss(const PredictionSet& pred, const scene::FuturePath& gt, std::size_t k,
            double threshold = kMissThreshold);
double MissRateK(std::span<const PredictionSet> preds, std::span<const scene::FuturePath> gts,
                 std::size_t k, double threshold = kMissThreshold);

struct OffroadCount {
  std::size_t offroad = 0;
  std::size_t points = 0;
};

// Points farther than corridor_width / 2 from every centerline segment, over
// all modes or only the most likely one.
OffroadCount CountOffroad(const PredictionSet& pred, const scene::LaneGraph& graph,
                          bool all_modes = true);
double OffroadRate(std::span<const PredictionSet> preds,
                   std::span<const scene::LaneGraph> graphs, bool all_modes = true);

// Number of distinct successor chains holding a top-k endpoint. An endpoint
// belongs to the node of its nearest centerline point; nodes upstream of every
// branching node belong to no chain.
std::size_t OccupiedBranches(const PredictionSet& pred, const scene::LaneGraph& graph,
                             std::size_t k);

struct MetricsReport {
  std::map<std::size_t, double> min_ade;
  std::map<std::size_t, double> min_fde;
  std::map<std::size_t, double> miss_rate;
  double offroad_rate = 0.0;
  std::size_t scene_count = 0;
  double mean_inference_ms = 0.0;  // informational; excluded from equality
  bool operator==(const MetricsReport& o) const {
    return min_ade == o.min_ade && min_fde == o.min_fde && miss_rate == o.miss_rate &&
           offroad_rate == o.offroad_rate && scene_count == o.scene_count;
  }
};

struct EvalConfig {
  std::uint64_t seed = 0;
  std::vector<std::size_t> ks = {1, 5, 10};
  double miss_threshold = kMissThreshold;
  bool offroad_all_modes = true;
  std::size_t threads = 1;  // 0 picks the hardware concurrency
};

// Target-centric scene in, prediction out. `index` is the dataset position.
// Must be safe to call concurrently when threads > 1.
using Predictor = std::function<PredictionSet(const scene::Scene&, std::size_t index)>;

// Aggregates all metric families. Scenes in the global frame are moved to the
// target-centric frame first. K values above the prediction's mode count are
// evaluated with all modes. Throws MissingGroundTruth for an empty dataset or
// a scene without a future.
MetricsReport Evaluate(std::span<const scene::Scene> scenes, const Predictor& predictor,
                       const EvalConfig& cfg = {});

// Scene i is predicted with seed Derive(cfg.seed, i).
MetricsReport EvaluateModel(const model::GcgatModel& model, std::span<const scene::Scene> scenes,
                            const EvalConfig& cfg = {});

// One mode that holds the current speed along the current heading (the +x
// axis of the target-centric frame) for `steps` steps of `dt` seconds.
PredictionSet ConstantVelocityPrediction(const scene::Scene& agent_frame_scene,
                                         std::size_t steps, double dt);

std::string ReportToJson(const MetricsReport& report);
MetricsReport ReportFromJson(const std::string& text);

}  // namespace gcgat::metrics
