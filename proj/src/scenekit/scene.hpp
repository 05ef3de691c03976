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

// Scene data model: one prediction instance centred on a target agent.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gcgat::scene {

enum class Topology { kStraight, kCurve, kTJunction, kCrossroads, kMixed };
enum class Frame { kGlobal, kTargetCentric };

std::string TopologyName(Topology t);
std::optional<Topology> ParseTopology(const std::string& name);
std::string FrameName(Frame f);
std::optional<Frame> ParseFrame(const std::string& name);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

// One timestep of an agent: position (m), speed (m/s), acceleration (m/s^2),
// yaw rate (rad/s) and the pedestrian flag. These six values are the model's
// per-step agent features.
struct AgentState {
  double x = 0.0;
  double y = 0.0;
  double v = 0.0;
  double a = 0.0;
  double w = 0.0;
  bool is_pedestrian = false;
  bool operator==(const AgentState&) const = default;
};

// History plus current step; states.size() == history_steps + 1. Steps with
// observed[i] == false carry an all-zero state.
struct AgentTrack {
  std::int64_t id = 0;
  std::vector<AgentState> states;
  std::vector<bool> observed;
  bool operator==(const AgentTrack&) const = default;

  const AgentState& current() const { return states.back(); }
};

struct LanePose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  bool on_stop_or_crosswalk = false;
  bool operator==(const LanePose&) const = default;
};

// A fixed-length run of equidistant centerline poses.
struct LaneNode {
  std::int64_t node_id = 0;
  std::vector<LanePose> poses;
  bool operator==(const LaneNode&) const = default;
};

struct LaneGraph {
  std::vector<LaneNode> nodes;
  std::vector<std::pair<std::int64_t, std::int64_t>> successors;  // from -> to
  double corridor_width = 0.0;
  bool operator==(const LaneGraph&) const = default;

  // Index of a node id in `nodes`, or nullopt.
  std::optional<std::size_t> IndexOf(std::int64_t node_id) const;
  // successors of node index i, as node indices, in edge order
  std::vector<std::size_t> SuccessorIndices(std::size_t i) const;
};

struct FuturePath {
  std::vector<Point2> points;
  bool operator==(const FuturePath&) const = default;
};

struct SceneMeta {
  std::uint64_t seed = 0;
  Topology topology = Topology::kStraight;
  bool operator==(const SceneMeta&) const = default;
};

struct Scene {
  AgentTrack target;
  std::vector<AgentTrack> neighbors;
  LaneGraph graph;
  std::optional<FuturePath> future;
  Frame frame = Frame::kGlobal;
  SceneMeta meta;
  bool operator==(const Scene&) const = default;
};

// Throws ShapeMismatch/InvalidArgument when a scene breaks the data-model
// invariants (track lengths, pose counts, dangling edges, self loops).
void ValidateScene(const Scene& scene);

// Current heading of the target: direction of its last observed displacement,
// or the heading of the nearest lane pose when it has not moved.
double TargetHeading(const Scene& scene);

}  // namespace gcgat::scene
