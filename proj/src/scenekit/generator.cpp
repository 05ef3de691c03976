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

#include "scenekit/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "common/error.hpp"
#include "diffcore/rng.hpp"
#include "scenekit/geometry.hpp"
#include "scenekit/transform.hpp"

namespace gcgat::scene {

using diff::RngStream;

void GenConfig::Validate() const {
  auto positive = [](double v, const char* name) {
    Require(v > 0.0, ErrorCode::kConfig, std::string(name) + " must be positive");
  };
  positive(node_length, "node_length");
  Require(poses_per_node >= 2, ErrorCode::kConfig, "poses_per_node must be >= 2");
  positive(corridor_width, "corridor_width");
  positive(speed_min, "speed_min");
  positive(speed_max, "speed_max");
  Require(speed_min <= speed_max, ErrorCode::kConfig,
          "speed_min must not exceed speed_max");
  Require(noise_std >= 0.0, ErrorCode::kConfig, "noise_std must be >= 0");
  Require(history_steps >= 1, ErrorCode::kConfig, "history_steps must be >= 1");
  Require(future_steps >= 1, ErrorCode::kConfig, "future_steps must be >= 1");
  positive(step_dt, "step_dt");
  Require(max_neighbors >= 0, ErrorCode::kConfig, "max_neighbors must be >= 0");
  Require(pedestrian_fraction >= 0.0 && pedestrian_fraction <= 1.0,
          ErrorCode::kConfig, "pedestrian_fraction must be in [0, 1]");
  Require(stopline_fraction >= 0.0 && stopline_fraction <= 1.0, ErrorCode::kConfig,
          "stopline_fraction must be in [0, 1]");
  Require(approach_nodes >= 0 && branch_nodes >= 0, ErrorCode::kConfig,
          "node counts must be >= 0 (0 = automatic)");
}

namespace {

// Fraction of the horizon's travel distance that lies before the junction.
constexpr double kJunctionLeadMin = 0.1;
constexpr double kJunctionLeadMax = 0.4;

}  // namespace

int GenConfig::ResolvedApproachNodes() const {
  if (approach_nodes > 0) return approach_nodes;
  const double need = speed_max * step_dt * history_steps +
                      kJunctionLeadMax * speed_max * step_dt * future_steps +
                      node_length;
  return static_cast<int>(std::ceil(need / node_length));
}

int GenConfig::ResolvedBranchNodes() const {
  if (branch_nodes > 0) return branch_nodes;
  const double need = speed_max * step_dt * future_steps + node_length;
  return static_cast<int>(std::ceil(need / node_length));
}

namespace {

struct Pose {
  double x;
  double y;
  double theta;
};

// A branch leaves the junction at the origin heading +x, turns by `turn`
// radians on a circular arc of `radius` and then continues straight.
struct BranchShape {
  double turn = 0.0;
  double radius = 1.0;

  Pose At(double s) const {
    if (turn == 0.0) return {s, 0.0, 0.0};
    const double sign = turn > 0 ? 1.0 : -1.0;
    const double arc = radius * std::abs(turn);
    if (s <= arc) {
      const double phi = s / radius;
      return {radius * std::sin(phi), sign * radius * (1.0 - std::cos(phi)),
              sign * phi};
    }
    const Pose end = At(arc);
    return {end.x + (s - arc) * std::cos(turn), end.y + (s - arc) * std::sin(turn),
            turn};
  }

  double Curvature(double s) const {
    if (turn == 0.0 || s < 0.0 || s > radius * std::abs(turn)) return 0.0;
    return (turn > 0 ? 1.0 : -1.0) / radius;
  }
};

struct Layout {
  double approach_length = 0.0;
  std::vector<BranchShape> branches;

  // Route = approach then branch b; s measured from the approach start.
  Pose RouteAt(std::size_t b, double s) const {
    if (s < approach_length) return {s - approach_length, 0.0, 0.0};
    return branches[b].At(s - approach_length);
  }
  double RouteCurvature(std::size_t b, double s) const {
    if (s < approach_length) return 0.0;
    return branches[b].Curvature(s - approach_length);
  }
};

constexpr double kDeg = std::numbers::pi / 180.0;

Layout MakeLayout(Topology topology, double approach_length, RngStream& rng) {
  Layout layout;
  layout.approach_length = approach_length;
  switch (topology) {
    case Topology::kStraight:
      layout.branches.push_back({0.0, 1.0});
      break;
    case Topology::kCurve: {
      const double sign = rng.Bernoulli(0.5) ? 1.0 : -1.0;
      const double turn = rng.Uniform(30.0, 90.0) * kDeg;
      layout.branches.push_back({sign * turn, rng.Uniform(20.0, 40.0)});
      break;
    }
    case Topology::kTJunction:
      layout.branches.push_back({90.0 * kDeg, rng.Uniform(8.0, 14.0)});
      layout.branches.push_back({-90.0 * kDeg, rng.Uniform(8.0, 14.0)});
      break;
    case Topology::kCrossroads:
      layout.branches.push_back({90.0 * kDeg, rng.Uniform(8.0, 14.0)});
      layout.branches.push_back({0.0, 1.0});
      layout.branches.push_back({-90.0 * kDeg, rng.Uniform(8.0, 14.0)});
      break;
    case Topology::kMixed:
      Fail(ErrorCode::kInvalidArgument, "layout needs a concrete topology");
  }
  return layout;
}

// Arc-length stations whose poses are exactly `spacing` apart in the plane,
// starting at the junction. Chords along an arc are shorter than the arc, so
// each station is found by bisection on the distance to the previous pose.
std::vector<double> EquidistantStations(const BranchShape& shape, double spacing,
                                        std::size_t count) {
  std::vector<double> stations;
  stations.reserve(count);
  double s = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    if (i > 0) {
      const Pose from = shape.At(s);
      auto gap = [&](double t) {
        const Pose p = shape.At(t);
        return std::hypot(p.x - from.x, p.y - from.y) - spacing;
      };
      double lo = s + spacing * 0.5;
      double hi = s + spacing * 2.0;
      for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (gap(mid) < 0.0 ? lo : hi) = mid;
      }
      s = std::abs(gap(lo)) <= std::abs(gap(hi)) ? lo : hi;
    }
    stations.push_back(s);
  }
  return stations;
}

LaneGraph BuildGraph(const Layout& layout, const GenConfig& cfg, int approach_nodes,
                     int branch_nodes, RngStream& rng) {
  LaneGraph g;
  g.corridor_width = cfg.corridor_width;
  const double spacing = cfg.node_length / cfg.poses_per_node;
  std::int64_t next_id = 0;
  auto make_node = [&](auto&& pose_at, double start, double step) {
    LaneNode node;
    node.node_id = next_id++;
    for (int j = 0; j < cfg.poses_per_node; ++j) {
      const Pose p = pose_at(start + j * step);
      node.poses.push_back({p.x, p.y, WrapAngle(p.theta),
                            rng.Bernoulli(cfg.stopline_fraction)});
    }
    return node;
  };

  for (int n = 0; n < approach_nodes; ++n) {
    g.nodes.push_back(make_node(
        [&](double s) { return Pose{s - layout.approach_length, 0.0, 0.0}; },
        n * cfg.node_length, spacing));
    if (n > 0) g.successors.emplace_back(n - 1, n);
  }
  const std::int64_t approach_last = approach_nodes - 1;
  for (const BranchShape& shape : layout.branches) {
    const auto stations =
        EquidistantStations(shape, spacing, branch_nodes * cfg.poses_per_node);
    std::int64_t prev = approach_last;
    for (int n = 0; n < branch_nodes; ++n) {
      LaneNode node = make_node(
          [&](double j) {
            return shape.At(stations[n * cfg.poses_per_node +
                                     static_cast<std::size_t>(j)]);
          },
          0.0, 1.0);
      if (prev >= 0) g.successors.emplace_back(prev, node.node_id);
      prev = node.node_id;
      g.nodes.push_back(std::move(node));
    }
  }
  return g;
}

AgentTrack VehicleTrack(std::int64_t id, const Layout& layout, std::size_t branch,
                        double s_now, double speed, const GenConfig& cfg) {
  AgentTrack t;
  t.id = id;
  for (int k = 0; k <= cfg.history_steps; ++k) {
    const double s = s_now - (cfg.history_steps - k) * speed * cfg.step_dt;
    const Pose p = layout.RouteAt(branch, s);
    t.states.push_back({p.x, p.y, speed, 0.0,
                        speed * layout.RouteCurvature(branch, s), false});
    t.observed.push_back(true);
  }
  return t;
}

}  // namespace

Scene GenerateScene(std::uint64_t seed, const GenConfig& cfg) {
  cfg.Validate();
  RngStream rng(seed);
  Scene scene;
  scene.frame = Frame::kGlobal;
  scene.meta.seed = seed;

  Topology topology = cfg.scene_topology;
  if (topology == Topology::kMixed) {
    constexpr Topology kChoices[] = {Topology::kStraight, Topology::kCurve,
                                     Topology::kTJunction, Topology::kCrossroads};
    topology = kChoices[rng.Below(4)];
  }
  scene.meta.topology = topology;

  const int approach_nodes = cfg.ResolvedApproachNodes();
  const int branch_nodes = cfg.ResolvedBranchNodes();
  const double approach_length = approach_nodes * cfg.node_length;
  const Layout layout = MakeLayout(topology, approach_length, rng);
  scene.graph = BuildGraph(layout, cfg, approach_nodes, branch_nodes, rng);

  // Target on the approach, reaching the junction within the horizon.
  const double speed = rng.Uniform(cfg.speed_min, cfg.speed_max);
  const double travel = speed * cfg.step_dt * cfg.future_steps;
  const double lead = rng.Uniform(kJunctionLeadMin, kJunctionLeadMax) * travel;
  scene.target = VehicleTrack(0, layout, 0, approach_length - lead, speed, cfg);

  const int neighbor_count =
      static_cast<int>(rng.Below(static_cast<std::uint64_t>(cfg.max_neighbors) + 1));
  const double route_length = approach_length + branch_nodes * cfg.node_length;
  for (int i = 0; i < neighbor_count; ++i) {
    const std::int64_t id = i + 1;
    AgentTrack track;
    if (rng.Bernoulli(cfg.pedestrian_fraction)) {
      const auto& node = scene.graph.nodes[rng.Below(scene.graph.nodes.size())];
      const auto& pose = node.poses[rng.Below(node.poses.size())];
      const double side = rng.Bernoulli(0.5) ? 1.0 : -1.0;
      const double offset = side * (cfg.corridor_width / 2.0 + rng.Uniform(1.0, 3.0));
      const double px = pose.x - offset * std::sin(pose.theta);
      const double py = pose.y + offset * std::cos(pose.theta);
      const double dir = rng.Uniform(-std::numbers::pi, std::numbers::pi);
      const double walk = rng.Uniform(0.5, 1.5);
      track.id = id;
      for (int k = 0; k <= cfg.history_steps; ++k) {
        const double back = (cfg.history_steps - k) * walk * cfg.step_dt;
        track.states.push_back({px - back * std::cos(dir), py - back * std::sin(dir),
                                walk, 0.0, 0.0, true});
        track.observed.push_back(true);
      }
    } else {
      const std::size_t branch = rng.Below(layout.branches.size());
      const double s = rng.Uniform(0.0, 0.9 * route_length);
      const double v = rng.Uniform(cfg.speed_min, cfg.speed_max);
      track = VehicleTrack(id, layout, branch, s, v, cfg);
    }
    // Some agents enter the scene part-way through the history window.
    if (rng.Bernoulli(0.25)) {
      const auto hidden = 1 + rng.Below(static_cast<std::uint64_t>(cfg.history_steps));
      for (std::uint64_t k = 0; k < hidden; ++k) {
        track.states[k] = AgentState{};
        track.observed[k] = false;
      }
    }
    scene.neighbors.push_back(std::move(track));
  }

  const double angle = rng.Uniform(-std::numbers::pi, std::numbers::pi);
  const double tx = rng.Uniform(-200.0, 200.0);
  const double ty = rng.Uniform(-200.0, 200.0);
  scene = ApplyRigidTransform(scene, angle, tx, ty);

  scene.future = SimulateFuture(scene, cfg, RngStream::Derive(seed, 0x5eed));
  return scene;
}

FuturePath SimulateFuture(const Scene& scene, const GenConfig& cfg,
                          std::uint64_t seed) {
  const auto segments = CenterlineSegments(scene.graph);
  const auto& now = scene.target.current();
  const Point2 start{now.x, now.y};
  const NearestSegment nearest = FindNearestSegment(segments, start);
  if (nearest.distance > scene.graph.corridor_width) {
    Fail(ErrorCode::kTargetOffGraph,
         "target is " + std::to_string(nearest.distance) +
             " m from the nearest centerline");
  }

  RngStream rng(seed);
  const CenterlineSegment& seg = segments[nearest.segment];
  const Point2 origin{seg.a.x + nearest.t * (seg.b.x - seg.a.x),
                      seg.a.y + nearest.t * (seg.b.y - seg.a.y)};

  // Forward polyline from the projected position along the lane graph.
  std::vector<Point2> path{origin};
  auto push = [&](Point2 p) {
    if (p.x != path.back().x || p.y != path.back().y) path.push_back(p);
  };
  std::size_t node = seg.to_node;
  const auto& first_poses = scene.graph.nodes[node].poses;
  const std::size_t first_pose = seg.from_node == seg.to_node ? seg.pose + 1 : 0;
  for (std::size_t j = first_pose; j < first_poses.size(); ++j)
    push({first_poses[j].x, first_poses[j].y});

  const double step = now.v * cfg.step_dt;
  const double needed = step * cfg.future_steps;
  double length = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i)
    length += std::hypot(path[i].x - path[i - 1].x, path[i].y - path[i - 1].y);
  while (length < needed) {
    const auto succ = scene.graph.SuccessorIndices(node);
    if (succ.empty()) break;
    node = succ.size() == 1 ? succ[0] : succ[rng.Below(succ.size())];
    for (const auto& p : scene.graph.nodes[node].poses) {
      const Point2 prev = path.back();
      push({p.x, p.y});
      length += std::hypot(p.x - prev.x, p.y - prev.y);
    }
  }

  FuturePath future;
  std::size_t k = 0;          // current segment [path[k], path[k+1]]
  double covered = 0.0;       // arc length at path[k]
  for (int t = 1; t <= cfg.future_steps; ++t) {
    const double d = step * t;
    while (k + 2 < path.size()) {
      const double len = std::hypot(path[k + 1].x - path[k].x, path[k + 1].y - path[k].y);
      if (covered + len >= d) break;
      covered += len;
      ++k;
    }
    Point2 a = path[k];
    Point2 b = path.size() > k + 1 ? path[k + 1] : path[k];
    double dx = b.x - a.x;
    double dy = b.y - a.y;
    double len = std::hypot(dx, dy);
    if (len == 0.0) {
      // Degenerate single-point path: continue along the target heading.
      const double h = TargetHeading(scene);
      dx = std::cos(h);
      dy = std::sin(h);
      len = 1.0;
    }
    const double u = (d - covered) / len;
    const double ux = dx / len;
    const double uy = dy / len;
    const double lateral = cfg.noise_std > 0.0 ? cfg.noise_std * rng.Normal() : 0.0;
    future.points.push_back({a.x + u * dx - lateral * uy, a.y + u * dy + lateral * ux});
  }
  return future;
}

std::vector<Scene> GenerateDataset(std::size_t count, std::uint64_t seed,
                                   const GenConfig& cfg) {
  std::vector<Scene> scenes;
  scenes.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    scenes.push_back(GenerateScene(RngStream::Derive(seed, i), cfg));
  return scenes;
}

}  // namespace gcgat::scene
