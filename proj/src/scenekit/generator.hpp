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

// Synthetic lane-graph scenes with kinematic ground-truth futures.
//
// Every topology is an approach lane ending at a junction point followed by
// one or more branches (straight, a single curve, left/right for a T
// junction, left/straight/right for a crossroads). The target drives along
// the approach at constant speed and reaches the junction within the
// prediction horizon, so branching topologies have multimodal futures.

#pragma once

#include <cstdint>
#include <vector>

#include "scenekit/scene.hpp"

namespace gcgat::scene {

struct GenConfig {
  Topology scene_topology = Topology::kMixed;
  double node_length = 10.0;      // m
  int poses_per_node = 5;
  double corridor_width = 4.0;    // m
  double speed_min = 4.0;         // m/s
  double speed_max = 10.0;        // m/s
  double noise_std = 0.1;         // m, lateral noise on the future
  int history_steps = 4;
  int future_steps = 12;
  double step_dt = 0.5;           // s
  int max_neighbors = 4;
  double pedestrian_fraction = 0.25;
  double stopline_fraction = 0.05;
  // 0 picks a length that covers the horizon at speed_max.
  int approach_nodes = 0;
  int branch_nodes = 0;

  void Validate() const;
  int ResolvedApproachNodes() const;
  int ResolvedBranchNodes() const;
  bool operator==(const GenConfig&) const = default;
};

// Deterministic in (seed, cfg). Global frame; meta.topology is the concrete
// topology even when cfg asks for a mix.
Scene GenerateScene(std::uint64_t seed, const GenConfig& cfg);

// Ground-truth future: the target advances along the lane graph at its
// current speed, picking uniformly among successors at branch points, with
// N(0, noise_std) lateral offsets. Throws TargetOffGraph when the target is
// more than corridor_width from every centerline.
FuturePath SimulateFuture(const Scene& scene, const GenConfig& cfg,
                          std::uint64_t seed);

std::vector<Scene> GenerateDataset(std::size_t count, std::uint64_t seed,
                                   const GenConfig& cfg);

}  // namespace gcgat::scene
