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

#include "metrics/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>

#include "common/error.hpp"
#include "common/parallel.hpp"
#include "diffcore/rng.hpp"
#include "json.hpp"
#include "scenekit/geometry.hpp"
#include "scenekit/transform.hpp"

namespace gcgat::metrics {

using nlohmann::json;

namespace {

void CheckHorizon(const PredictionSet& pred, const scene::FuturePath& gt) {
  Require(pred.mu.rank() == 3 && pred.steps() == gt.points.size() && !gt.points.empty(),
          ErrorCode::kHorizonMismatch, "prediction and ground truth horizons differ");
}

double PointDistance(const PredictionSet& pred, std::size_t mode, std::size_t t,
                     const scene::Point2& p) {
  return std::hypot(pred.mu(mode, t, 0) - p.x, pred.mu(mode, t, 1) - p.y);
}

template <typename Fn>
double MinOverTopK(const PredictionSet& pred, std::size_t k, Fn fn) {
  double best = INFINITY;
  for (std::size_t m : TopKModes(pred.pi, k)) best = std::min(best, fn(m));
  return best;
}


}  // namespace

std::vector<std::size_t> TopKModes(const std::vector<double>& pi, std::size_t k) {
  Require(k >= 1, ErrorCode::kInvalidArgument, "K must be >= 1");
  Require(k <= pi.size(), ErrorCode::kKTooLarge,
          "K = " + std::to_string(k) + " exceeds the " + std::to_string(pi.size()) + " predicted modes");
  std::vector<std::size_t> order(pi.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pi[a] > pi[b]; });
  order.resize(k);
  return order;
}

double ModeAde(const PredictionSet& pred, std::size_t mode, const scene::FuturePath& gt) {
  CheckHorizon(pred, gt);
  double sum = 0.0;
  for (std::size_t t = 0; t < gt.points.size(); ++t) sum += PointDistance(pred, mode, t, gt.points[t]);
  return sum / static_cast<double>(gt.points.size());
}

double ModeFde(const PredictionSet& pred, std::size_t mode, const scene::FuturePath& gt) {
  CheckHorizon(pred, gt);
  return PointDistance(pred, mode, gt.points.size() - 1, gt.points.back());
}

double ModeMaxDeviation(const PredictionSet& pred, std::size_t mode,
                        const scene::FuturePath& gt) {
  CheckHorizon(pred, gt);
  double worst = 0.0;
  for (std::size_t t = 0; t < gt.points.size(); ++t)
    worst = std::max(worst, PointDistance(pred, mode, t, gt.points[t]));
  return worst;
}

double MinAdeK(const PredictionSet& pred, const scene::FuturePath& gt, std::size_t k) {
  return MinOverTopK(pred, k, [&](std::size_t m) { return ModeAde(pred, m, gt); });
}

double MinFdeK(const PredictionSet& pred, const scene::FuturePath& gt, std::size_t k) {
  return MinOverTopK(pred, k, [&](std::size_t m) { return ModeFde(pred, m, gt); });
}

bool IsMiss(const PredictionSet& pred, const scene::FuturePath& gt, std::size_t k,
            double threshold) {
  for (std::size_t m : TopKModes(pred.pi, k))
    if (!(ModeMaxDeviation(pred, m, gt) > threshold)) return false;
  return true;
}

double MissRateK(std::span<const PredictionSet> preds, std::span<const scene::FuturePath> gts,
                 std::size_t k, double threshold) {
  Require(preds.size() == gts.size(), ErrorCode::kShapeMismatch,
          "predictions and ground truths are not aligned");
  Require(!preds.empty(), ErrorCode::kMissingGroundTruth, "no scenes to evaluate");
  std::size_t misses = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) misses += IsMiss(preds[i], gts[i], k, threshold);
  return static_cast<double>(misses) / static_cast<double>(preds.size());
}

OffroadCount CountOffroad(const PredictionSet& pred, const scene::LaneGraph& graph,
                          bool all_modes) {
  const auto segments = scene::CenterlineSegments(graph);
  Require(!segments.empty(), ErrorCode::kDegenerateInput, "lane graph has no centerline");
  const double half_width = graph.corridor_width / 2.0;
  std::vector<std::size_t> modes;
  if (all_modes) {
    modes.resize(pred.modes());
    std::iota(modes.begin(), modes.end(), 0);
  } else {
    modes = TopKModes(pred.pi, 1);
  }
  OffroadCount c;
  for (std::size_t m : modes) {
    for (std::size_t t = 0; t < pred.steps(); ++t) {
      const scene::Point2 p{pred.mu(m, t, 0), pred.mu(m, t, 1)};
      c.offroad += scene::CenterlineDistance(segments, p) > half_width;
      ++c.points;
    }
  }
  return c;
}

double OffroadRate(std::span<const PredictionSet> preds,
                   std::span<const scene::LaneGraph> graphs, bool all_modes) {
  Require(preds.size() == graphs.size(), ErrorCode::kShapeMismatch,
          "predictions and graphs are not aligned");
  OffroadCount total;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto c = CountOffroad(preds[i], graphs[i], all_modes);
    total.offroad += c.offroad;
    total.points += c.points;
  }
  return total.points ? static_cast<double>(total.offroad) / static_cast<double>(total.points) : 0.0;
}

std::size_t OccupiedBranches(const PredictionSet& pred, const scene::LaneGraph& graph,
                             std::size_t k) {
  const auto segments = scene::CenterlineSegments(graph);
  Require(!segments.empty(), ErrorCode::kDegenerateInput, "lane graph has no centerline");
  const auto labels = scene::BranchLabels(graph);
  std::set<int> chains;
  const std::size_t last = pred.steps() - 1;
  for (std::size_t m : TopKModes(pred.pi, std::min(k, pred.modes()))) {
    const auto near =
        scene::FindNearestSegment(segments, {pred.mu(m, last, 0), pred.mu(m, last, 1)});
    const auto& seg = segments[near.segment];
    const std::size_t node = near.t < 0.5 ? seg.from_node : seg.to_node;
    if (labels[node] >= 0) chains.insert(labels[node]);
  }
  return chains.size();
}

MetricsReport Evaluate(std::span<const scene::Scene> scenes, const Predictor& predictor,
                       const EvalConfig& cfg) {
  Require(!scenes.empty(), ErrorCode::kMissingGroundTruth, "no scenes to evaluate");
  Require(!cfg.ks.empty(), ErrorCode::kInvalidArgument, "no K values requested");
  for (std::size_t i = 0; i < scenes.size(); ++i)
    Require(scenes[i].future.has_value(), ErrorCode::kMissingGroundTruth,
            "scene " + std::to_string(i) + " has no ground-truth future");

  const std::size_t n = scenes.size();
  std::vector<scene::Scene> local(n);
  std::vector<PredictionSet> preds(n);
  std::vector<double> millis(n, 0.0);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      local[i] = scenes[i].frame == scene::Frame::kGlobal ? scene::ToAgentFrame(scenes[i]) : scenes[i];
      const auto start = std::chrono::steady_clock::now();
      preds[i] = predictor(local[i], i);
      millis[i] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
  };
  ParallelChunks(n, cfg.threads, work);

  MetricsReport r;
  r.scene_count = n;
  std::vector<scene::FuturePath> gts(n);
  std::vector<scene::LaneGraph> graphs(n);
  for (std::size_t i = 0; i < n; ++i) {
    gts[i] = *local[i].future;
    graphs[i] = local[i].graph;
  }
  for (std::size_t k : cfg.ks) {
    double ade = 0.0;
    double fde = 0.0;
    std::size_t misses = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t kk = std::min(k, preds[i].modes());
      ade += MinAdeK(preds[i], gts[i], kk);
      fde += MinFdeK(preds[i], gts[i], kk);
      misses += IsMiss(preds[i], gts[i], kk, cfg.miss_threshold);
    }
    r.min_ade[k] = ade / static_cast<double>(n);
    r.min_fde[k] = fde / static_cast<double>(n);
    r.miss_rate[k] = static_cast<double>(misses) / static_cast<double>(n);
  }
  r.offroad_rate = OffroadRate(preds, graphs, cfg.offroad_all_modes);
  r.mean_inference_ms = std::accumulate(millis.begin(), millis.end(), 0.0) / static_cast<double>(n);
  return r;
}

MetricsReport EvaluateModel(const model::GcgatModel& model, std::span<const scene::Scene> scenes,
                            const EvalConfig& cfg) {
  return Evaluate(
      scenes,
      [&](const scene::Scene& s, std::size_t i) {
        return model.Predict(s, diff::RngStream::Derive(cfg.seed, i));
      },
      cfg);
}

PredictionSet ConstantVelocityPrediction(const scene::Scene& agent_frame_scene,
                                         std::size_t steps, double dt) {
  Require(agent_frame_scene.frame == scene::Frame::kTargetCentric, ErrorCode::kInvalidArgument,
          "baseline expects a target-centric scene");
  Require(steps >= 1 && dt > 0.0, ErrorCode::kInvalidArgument, "baseline needs steps >= 1, dt > 0");
  const double v = agent_frame_scene.target.current().v;
  PredictionSet p;
  p.pi = {1.0};
  p.mu = diff::Tensor(std::vector<std::size_t>{1, steps, 2});
  p.b = diff::Tensor(std::vector<std::size_t>{1, steps, 2});
  for (std::size_t t = 0; t < steps; ++t) {
    p.mu(0, t, 0) = v * dt * static_cast<double>(t + 1);
    p.b(0, t, 0) = 1.0;
    p.b(0, t, 1) = 1.0;
  }
  p.goal_weights = diff::Tensor::Matrix(0, 0);
  return p;
}

std::string ReportToJson(const MetricsReport& report) {
  auto by_k = [](const std::map<std::size_t, double>& m) {
    json o = json::object();
    for (const auto& [k, v] : m) o[std::to_string(k)] = v;
    return o;
  };
  json j;
  j["min_ade_k"] = by_k(report.min_ade);
  j["min_fde_k"] = by_k(report.min_fde);
  j["miss_rate_k"] = by_k(report.miss_rate);
  j["offroad_rate"] = report.offroad_rate;
  j["scene_count"] = report.scene_count;
  j["mean_inference_ms"] = report.mean_inference_ms;
  return j.dump();
}

MetricsReport ReportFromJson(const std::string& text) {
  MetricsReport r;
  try {
    const json j = json::parse(text);
    auto by_k = [](const json& o) {
      std::map<std::size_t, double> m;
      for (const auto& [k, v] : o.items()) m[std::stoul(k)] = v.get<double>();
      return m;
    };
    r.min_ade = by_k(j.at("min_ade_k"));
    r.min_fde = by_k(j.at("min_fde_k"));
    r.miss_rate = by_k(j.at("miss_rate_k"));
    r.offroad_rate = j.at("offroad_rate").get<double>();
    r.scene_count = j.at("scene_count").get<std::size_t>();
    r.mean_inference_ms = j.value("mean_inference_ms", 0.0);
  } catch (const json::exception& e) {
    throw ParseError(1, "", e.what());
  } catch (const std::logic_error& e) {
    throw ParseError(1, "", e.what());
  }
  return r;
}

}  // namespace gcgat::metrics
