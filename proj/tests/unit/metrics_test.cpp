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

#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "diffcore/rng.hpp"
#include "doctest.h"
#include "metrics/metrics.hpp"
#include "scenekit/generator.hpp"
#include "scenekit/geometry.hpp"
#include "scenekit/transform.hpp"

namespace gcgat {
namespace {

using diff::Tensor;
using metrics::PredictionSet;

PredictionSet MakePrediction(std::size_t k, std::size_t f) {
  PredictionSet p;
  p.pi.assign(k, 1.0 / static_cast<double>(k));
  p.mu = Tensor(std::vector<std::size_t>{k, f, 2});
  p.b = Tensor(std::vector<std::size_t>{k, f, 2}, 1.0);
  p.goal_weights = Tensor::Matrix(0, 0);
  return p;
}

scene::FuturePath MakePath(std::size_t f, diff::RngStream& rng, double scale) {
  scene::FuturePath path;
  for (std::size_t t = 0; t < f; ++t) path.points.push_back({rng.Uniform(-scale, scale), rng.Uniform(-scale, scale)});
  return path;
}

// Random prediction around a ground truth; pi gets occasional exact ties.
PredictionSet RandomPrediction(std::size_t k, const scene::FuturePath& gt, diff::RngStream& rng,
                               double spread) {
  auto p = MakePrediction(k, gt.points.size());
  double z = 0.0;
  for (double& v : p.pi) z += v = rng.Bernoulli(0.3) ? 0.5 : rng.Uniform(0.0, 1.0);
  for (double& v : p.pi) v /= z;
  for (std::size_t m = 0; m < k; ++m)
    for (std::size_t t = 0; t < gt.points.size(); ++t) {
      p.mu(m, t, 0) = gt.points[t].x + rng.Uniform(-spread, spread);
      p.mu(m, t, 1) = gt.points[t].y + rng.Uniform(-spread, spread);
    }
  return p;
}

// Top-K by repeated selection of the largest remaining pi, lowest index on ties.
std::vector<std::size_t> OracleTopK(const std::vector<double>& pi, std::size_t k) {
  std::vector<bool> used(pi.size(), false);
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < k; ++r) {
    std::size_t best = pi.size();
    for (std::size_t i = 0; i < pi.size(); ++i)
      if (!used[i] && (best == pi.size() || pi[i] > pi[best])) best = i;
    used[best] = true;
    out.push_back(best);
  }
  return out;
}

double Dist(double ax, double ay, double bx, double by) {
  return std::sqrt((ax - bx) * (ax - bx) + (ay - by) * (ay - by));
}

double OracleMinAde(const PredictionSet& p, const scene::FuturePath& gt, std::size_t k) {
  double best = INFINITY;
  for (std::size_t m : OracleTopK(p.pi, k)) {
    double s = 0.0;
    for (std::size_t t = 0; t < gt.points.size(); ++t)
      s += Dist(p.mu(m, t, 0), p.mu(m, t, 1), gt.points[t].x, gt.points[t].y);
    best = std::min(best, s / static_cast<double>(gt.points.size()));
  }
  return best;
}

double OracleMinFde(const PredictionSet& p, const scene::FuturePath& gt, std::size_t k) {
  const std::size_t f = gt.points.size() - 1;
  double best = INFINITY;
  for (std::size_t m : OracleTopK(p.pi, k))
    best = std::min(best, Dist(p.mu(m, f, 0), p.mu(m, f, 1), gt.points[f].x, gt.points[f].y));
  return best;
}

bool OracleMiss(const PredictionSet& p, const scene::FuturePath& gt, std::size_t k) {
  for (std::size_t m : OracleTopK(p.pi, k)) {
    bool far = false;
    for (std::size_t t = 0; t < gt.points.size(); ++t)
      far = far || Dist(p.mu(m, t, 0), p.mu(m, t, 1), gt.points[t].x, gt.points[t].y) > 2.0;
    if (!far) return false;
  }
  return true;
}

// Point-to-segment distance by clamped projection, checked against both ends.
double OracleSegmentDistance(double px, double py, double ax, double ay, double bx, double by) {
  const double dx = bx - ax, dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  double u = len2 > 0.0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
  u = std::clamp(u, 0.0, 1.0);
  return std::min({Dist(px, py, ax + u * dx, ay + u * dy), Dist(px, py, ax, ay), Dist(px, py, bx, by)});
}

bool OracleInCorridor(const scene::LaneGraph& g, double x, double y) {
  double best = INFINITY;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& poses = g.nodes[i].poses;
    for (std::size_t j = 0; j + 1 < poses.size(); ++j)
      best = std::min(best, OracleSegmentDistance(x, y, poses[j].x, poses[j].y, poses[j + 1].x, poses[j + 1].y));
    if (poses.size() == 1) best = std::min(best, Dist(x, y, poses[0].x, poses[0].y));
  }
  for (const auto& [from, to] : g.successors) {
    const auto& a = g.nodes[*g.IndexOf(from)].poses.back();
    const auto& b = g.nodes[*g.IndexOf(to)].poses.front();
    best = std::min(best, OracleSegmentDistance(x, y, a.x, a.y, b.x, b.y));
  }
  return best <= g.corridor_width / 2.0;
}

TEST_CASE("top-k selection") {
  CHECK(metrics::TopKModes({0.1, 0.4, 0.4, 0.1}, 3) == std::vector<std::size_t>{1, 2, 0});
  CHECK_THROWS_AS(metrics::TopKModes({0.5, 0.5}, 3), Error);
  try {
    metrics::TopKModes({1.0}, 2);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kKTooLarge);
  }
  CHECK_THROWS_AS(metrics::TopKModes({1.0}, 0), Error);
}

TEST_CASE("displacement metrics closed forms") {
  diff::RngStream rng(1);
  const auto gt = MakePath(6, rng, 10.0);
  auto p = MakePrediction(3, 6);
  p.pi = {0.2, 0.7, 0.1};
  for (std::size_t t = 0; t < 6; ++t) {
    p.mu(1, t, 0) = gt.points[t].x;
    p.mu(1, t, 1) = gt.points[t].y;
  }
  CHECK(metrics::MinAdeK(p, gt, 1) == 0.0);
  CHECK(metrics::MinFdeK(p, gt, 1) == 0.0);
  CHECK_FALSE(metrics::IsMiss(p, gt, 1));

  auto single = MakePrediction(1, 6);
  for (std::size_t t = 0; t < 6; ++t) {
    single.mu(0, t, 0) = gt.points[t].x;
    single.mu(0, t, 1) = gt.points[t].y;
  }
  single.mu(0, 5, 1) += 3.0;
  CHECK(metrics::MinFdeK(single, gt, 1) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(metrics::MinAdeK(single, gt, 2), Error);

  scene::FuturePath short_gt = gt;
  short_gt.points.pop_back();
  try {
    metrics::MinAdeK(p, short_gt, 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kHorizonMismatch);
  }
}

TEST_CASE("miss boundary is strict") {
  scene::FuturePath gt;
  for (int t = 0; t < 4; ++t) gt.points.push_back({static_cast<double>(t), 0.0});
  auto p = MakePrediction(2, 4);
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t t = 0; t < 4; ++t) p.mu(m, t, 0) = static_cast<double>(t);
  p.mu(0, 3, 1) = 2.0;
  p.mu(1, 2, 1) = -2.0;
  CHECK_FALSE(metrics::IsMiss(p, gt, 2));
  p.mu(0, 3, 1) = 2.01;
  CHECK_FALSE(metrics::IsMiss(p, gt, 2));
  p.mu(1, 2, 1) = -2.01;
  CHECK(metrics::IsMiss(p, gt, 2));
  CHECK(metrics::IsMiss(p, gt, 1));
}

TEST_CASE("displacement metrics match brute-force oracles") {
  diff::RngStream rng(2);
  std::vector<PredictionSet> preds;
  std::vector<scene::FuturePath> gts;
  for (int i = 0; i < 100; ++i) {
    const std::size_t k = 1 + rng.Below(10);
    gts.push_back(MakePath(1 + rng.Below(12), rng, 20.0));
    preds.push_back(RandomPrediction(k, gts.back(), rng, rng.Uniform(0.5, 6.0)));
    for (std::size_t kk = 1; kk <= k; ++kk) {
      CHECK(std::abs(metrics::MinAdeK(preds.back(), gts.back(), kk) - OracleMinAde(preds.back(), gts.back(), kk)) < 1e-9);
      CHECK(std::abs(metrics::MinFdeK(preds.back(), gts.back(), kk) - OracleMinFde(preds.back(), gts.back(), kk)) < 1e-9);
      CHECK(metrics::IsMiss(preds.back(), gts.back(), kk) == OracleMiss(preds.back(), gts.back(), kk));
    }
  }
  std::size_t misses = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) misses += OracleMiss(preds[i], gts[i], 1);
  CHECK(std::abs(metrics::MissRateK(preds, gts, 1) - static_cast<double>(misses) / 100.0) < 1e-12);
}

TEST_CASE("metrics are monotone in K") {
  diff::RngStream rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto gt = MakePath(8, rng, 15.0);
    const auto p = RandomPrediction(10, gt, rng, 5.0);
    for (std::size_t k = 1; k < 10; ++k) {
      CHECK(metrics::MinAdeK(p, gt, k + 1) <= metrics::MinAdeK(p, gt, k));
      CHECK(metrics::MinFdeK(p, gt, k + 1) <= metrics::MinFdeK(p, gt, k));
      CHECK(metrics::IsMiss(p, gt, k + 1) <= metrics::IsMiss(p, gt, k));
    }
  }
}

TEST_CASE("offroad rate closed forms and oracle") {
  scene::GenConfig gen;
  gen.scene_topology = scene::Topology::kTJunction;
  const auto s = scene::ToAgentFrame(scene::GenerateScene(4, gen));
  const auto& g = s.graph;

  // Every prediction point on a lane pose.
  auto on = MakePrediction(2, 3);
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t t = 0; t < 3; ++t) {
      const auto& pose = g.nodes[(m + t) % g.nodes.size()].poses[t % g.nodes[0].poses.size()];
      on.mu(m, t, 0) = pose.x;
      on.mu(m, t, 1) = pose.y;
    }
  const PredictionSet on_arr[] = {on};
  const scene::LaneGraph g_arr[] = {g};
  CHECK(metrics::OffroadRate(on_arr, g_arr) == 0.0);

  // Far from every lane.
  auto off = on;
  double far_x = 0.0;
  for (const auto& n : g.nodes)
    for (const auto& pose : n.poses) far_x = std::max(far_x, pose.x);
  for (double& v : off.mu.values()) v = far_x + 10.0 * g.corridor_width;
  const PredictionSet off_arr[] = {off};
  CHECK(metrics::OffroadRate(off_arr, g_arr) == 1.0);

  diff::RngStream rng(5);
  std::vector<PredictionSet> preds;
  std::vector<scene::LaneGraph> graphs;
  std::size_t outside = 0;
  std::size_t outside_top = 0;
  std::size_t total = 0;
  std::size_t total_top = 0;
  for (int i = 0; i < 100; ++i) {
    scene::GenConfig cfg;
    const auto sc = scene::ToAgentFrame(scene::GenerateScene(100 + i, cfg));
    auto p = RandomPrediction(1 + rng.Below(6), *sc.future, rng, rng.Uniform(0.5, 6.0));
    const std::size_t top = metrics::TopKModes(p.pi, 1)[0];
    for (std::size_t m = 0; m < p.modes(); ++m)
      for (std::size_t t = 0; t < p.steps(); ++t) {
        const bool out = !OracleInCorridor(sc.graph, p.mu(m, t, 0), p.mu(m, t, 1));
        outside += out;
        ++total;
        if (m == top) {
          outside_top += out;
          ++total_top;
        }
      }
    preds.push_back(p);
    graphs.push_back(sc.graph);
  }
  const double rate = metrics::OffroadRate(preds, graphs);
  CHECK(std::abs(rate - static_cast<double>(outside) / static_cast<double>(total)) < 1e-9);
  CHECK(rate > 0.0);
  CHECK(rate < 1.0);
  CHECK(std::abs(metrics::OffroadRate(preds, graphs, false) -
                 static_cast<double>(outside_top) / static_cast<double>(total_top)) < 1e-9);
}

TEST_CASE("evaluation of a perfect predictor is all zero") {
  const auto scenes = scene::GenerateDataset(20, 3, scene::GenConfig{});
  auto perfect = [](const scene::Scene& s, std::size_t) {
    auto p = MakePrediction(3, s.future->points.size());
    p.pi = {0.8, 0.1, 0.1};
    for (std::size_t t = 0; t < p.steps(); ++t) {
      p.mu(0, t, 0) = s.future->points[t].x;
      p.mu(0, t, 1) = s.future->points[t].y;
      p.mu(1, t, 0) = 50.0;
      p.mu(2, t, 1) = 50.0;
    }
    return p;
  };
  const auto r = metrics::Evaluate(scenes, perfect);
  CHECK(r.scene_count == 20);
  for (std::size_t k : {1, 5, 10}) {
    CHECK(r.min_ade.at(k) == 0.0);
    CHECK(r.min_fde.at(k) == 0.0);
    CHECK(r.miss_rate.at(k) == 0.0);
  }
}

TEST_CASE("evaluation errors") {
  const std::vector<scene::Scene> none;
  auto dummy = [](const scene::Scene&, std::size_t) { return MakePrediction(1, 12); };
  try {
    metrics::Evaluate(none, dummy);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingGroundTruth);
  }
  auto scenes = scene::GenerateDataset(2, 3, scene::GenConfig{});
  scenes[1].future.reset();
  try {
    metrics::Evaluate(scenes, dummy);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingGroundTruth);
  }
}

TEST_CASE("constant-velocity baseline") {
  scene::GenConfig straight;
  straight.scene_topology = scene::Topology::kStraight;
  straight.noise_std = 0.0;
  straight.pedestrian_fraction = 0.0;
  const auto scenes = scene::GenerateDataset(30, 8, straight);
  auto baseline = [&](const scene::Scene& s, std::size_t) {
    return metrics::ConstantVelocityPrediction(s, straight.future_steps, straight.step_dt);
  };
  const auto r = metrics::Evaluate(scenes, baseline);
  CHECK(r.min_ade.at(1) < 0.05);
  CHECK(r.min_ade.at(5) == r.min_ade.at(1));

  scene::GenConfig tj;
  tj.scene_topology = scene::Topology::kTJunction;
  const auto branching = scene::GenerateDataset(50, 9, tj);
  const auto rb = metrics::Evaluate(branching, baseline);
  CHECK(rb.miss_rate.at(5) > 0.0);

  const auto single = metrics::ConstantVelocityPrediction(scene::ToAgentFrame(scenes[0]), 4, 0.5);
  const double v = scene::ToAgentFrame(scenes[0]).target.current().v;
  CHECK(single.modes() == 1);
  CHECK(single.mu(0, 3, 0) == doctest::Approx(4 * 0.5 * v));
  CHECK(single.mu(0, 3, 1) == 0.0);
}

TEST_CASE("model evaluation is deterministic and thread-count independent") {
  model::ModelConfig cfg;
  cfg.dim = 16;
  cfg.heads = 2;
  cfg.modes = 6;
  const auto m = model::GcgatModel::Create(cfg, 1);
  const auto scenes = scene::GenerateDataset(12, 21, scene::GenConfig{});
  metrics::EvalConfig ec;
  ec.seed = 5;
  const auto a = metrics::EvaluateModel(m, scenes, ec);
  ec.threads = 4;
  const auto b = metrics::EvaluateModel(m, scenes, ec);
  CHECK(a == b);
  // K = 10 exceeds the 6 modes and is evaluated with all of them.
  ec.ks = {6, 10};
  const auto clipped = metrics::EvaluateModel(m, scenes, ec);
  CHECK(clipped.min_ade.at(10) == clipped.min_ade.at(6));
  CHECK(clipped.min_ade.at(10) == a.min_ade.at(10));
  CHECK(a.min_ade.at(5) <= a.min_ade.at(1));
  CHECK(a.min_ade.at(10) <= a.min_ade.at(5));
  CHECK(a.miss_rate.at(10) <= a.miss_rate.at(5));
  CHECK(a.mean_inference_ms > 0.0);
}

TEST_CASE("report round trip") {
  metrics::MetricsReport r;
  r.min_ade = {{1, 1.25}, {5, 0.1 + 0.2}};
  r.min_fde = {{1, 3.5}, {5, 1.0 / 3.0}};
  r.miss_rate = {{1, 0.5}, {5, 0.25}};
  r.offroad_rate = 0.0312;
  r.scene_count = 200;
  r.mean_inference_ms = 1.5;
  const auto back = metrics::ReportFromJson(metrics::ReportToJson(r));
  CHECK(back == r);
  CHECK(back.mean_inference_ms == 1.5);
  CHECK(metrics::ReportToJson(r).find("\"min_ade_k\"") != std::string::npos);
  CHECK_THROWS_AS(metrics::ReportFromJson("{"), Error);
}

TEST_CASE("occupied branches") {
  scene::GenConfig tj;
  tj.scene_topology = scene::Topology::kTJunction;
  const auto s = scene::ToAgentFrame(scene::GenerateScene(2, tj));
  const auto labels = scene::BranchLabels(s.graph);
  // One mode ending on the last pose of each branch chain end.
  std::vector<std::size_t> ends;
  for (std::size_t i = 0; i < s.graph.nodes.size(); ++i)
    if (labels[i] >= 0 && s.graph.SuccessorIndices(i).empty()) ends.push_back(i);
  REQUIRE(ends.size() == 2);
  auto p = MakePrediction(3, 2);
  for (std::size_t m = 0; m < 2; ++m) {
    const auto& pose = s.graph.nodes[ends[m]].poses.back();
    p.mu(m, 1, 0) = pose.x;
    p.mu(m, 1, 1) = pose.y;
  }
  const auto& approach = s.graph.nodes[0].poses.front();
  p.mu(2, 1, 0) = approach.x;
  p.mu(2, 1, 1) = approach.y;
  p.pi = {0.3, 0.3, 0.4};
  CHECK(metrics::OccupiedBranches(p, s.graph, 3) == 2);
  CHECK(metrics::OccupiedBranches(p, s.graph, 2) == 1);
  CHECK(metrics::OccupiedBranches(p, s.graph, 1) == 0);
}

}  // namespace
}  // namespace gcgat
