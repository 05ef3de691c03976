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

#include "scenekit/scene.hpp"

#include <cmath>
#include <unordered_set>

#include "common/error.hpp"
#include "scenekit/geometry.hpp"

namespace gcgat::scene {

std::string TopologyName(Topology t) {
  switch (t) {
    case Topology::kStraight: return "straight";
    case Topology::kCurve: return "curve";
    case Topology::kTJunction: return "t_junction";
    case Topology::kCrossroads: return "crossroads";
    case Topology::kMixed: return "mixed";
  }
  return "straight";
}

std::optional<Topology> ParseTopology(const std::string& name) {
  for (Topology t : {Topology::kStraight, Topology::kCurve, Topology::kTJunction,
                     Topology::kCrossroads, Topology::kMixed}) {
    if (TopologyName(t) == name) return t;
  }
  return std::nullopt;
}

std::string FrameName(Frame f) {
  return f == Frame::kGlobal ? "global" : "target_centric";
}

std::optional<Frame> ParseFrame(const std::string& name) {
  if (name == "global") return Frame::kGlobal;
  if (name == "target_centric") return Frame::kTargetCentric;
  return std::nullopt;
}

std::optional<std::size_t> LaneGraph::IndexOf(std::int64_t node_id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].node_id == node_id) return i;
  return std::nullopt;
}

std::vector<std::size_t> LaneGraph::SuccessorIndices(std::size_t i) const {
  std::vector<std::size_t> out;
  const std::int64_t id = nodes.at(i).node_id;
  for (const auto& [from, to] : successors) {
    if (from != id) continue;
    if (auto j = IndexOf(to)) out.push_back(*j);
  }
  return out;
}

void ValidateScene(const Scene& scene) {
  const std::size_t steps = scene.target.states.size();
  Require(steps >= 2, ErrorCode::kShapeMismatch,
          "target track needs at least one history step plus the current step");
  auto check_track = [&](const AgentTrack& t, const std::string& who) {
    Require(t.states.size() == steps && t.observed.size() == steps,
            ErrorCode::kShapeMismatch, who + " track length differs from target");
    bool first = true;
    bool ped = false;
    for (std::size_t i = 0; i < steps; ++i) {
      if (!t.observed[i]) continue;
      if (first) {
        ped = t.states[i].is_pedestrian;
        first = false;
      }
      Require(t.states[i].is_pedestrian == ped, ErrorCode::kInvalidArgument,
              who + " changes agent type mid-track");
    }
  };
  check_track(scene.target, "target");
  Require(scene.target.observed.back(), ErrorCode::kInvalidArgument,
          "target must be observed at the current step");
  for (std::size_t i = 0; i < scene.neighbors.size(); ++i)
    check_track(scene.neighbors[i], "neighbor " + std::to_string(i));

  const auto& g = scene.graph;
  Require(!g.nodes.empty(), ErrorCode::kInvalidArgument, "lane graph has no nodes");
  Require(g.corridor_width > 0.0, ErrorCode::kInvalidArgument,
          "corridor width must be positive");
  const std::size_t poses = g.nodes.front().poses.size();
  Require(poses >= 1, ErrorCode::kShapeMismatch, "lane nodes need poses");
  std::unordered_set<std::int64_t> ids;
  for (const auto& n : g.nodes) {
    Require(n.poses.size() == poses, ErrorCode::kShapeMismatch,
            "lane nodes have differing pose counts");
    Require(ids.insert(n.node_id).second, ErrorCode::kInvalidArgument,
            "duplicate lane node id " + std::to_string(n.node_id));
  }
  for (const auto& [from, to] : g.successors) {
    Require(from != to, ErrorCode::kInvalidArgument, "lane graph self loop");
    Require(ids.contains(from) && ids.contains(to), ErrorCode::kInvalidArgument,
            "lane graph edge references a missing node");
  }
}

double TargetHeading(const Scene& scene) {
  const auto& t = scene.target;
  const std::size_t n = t.states.size();
  if (n >= 2 && t.observed[n - 1] && t.observed[n - 2]) {
    const double dx = t.states[n - 1].x - t.states[n - 2].x;
    const double dy = t.states[n - 1].y - t.states[n - 2].y;
    if (dx != 0.0 || dy != 0.0) return std::atan2(dy, dx);
  }
  // Stationary target: fall back to the direction of the nearest lane pose.
  double best = std::numeric_limits<double>::infinity();
  double heading = 0.0;
  const auto& c = t.current();
  for (const auto& node : scene.graph.nodes) {
    for (const auto& p : node.poses) {
      const double d = std::hypot(p.x - c.x, p.y - c.y);
      if (d < best) {
        best = d;
        heading = p.theta;
      }
    }
  }
  return heading;
}

}  // namespace gcgat::scene
