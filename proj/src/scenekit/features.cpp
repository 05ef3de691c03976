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

#include "scenekit/features.hpp"

#include "common/error.hpp"

namespace gcgat::scene {

namespace {

void WriteState(const AgentState& s, double* dst) {
  dst[0] = s.x;
  dst[1] = s.y;
  dst[2] = s.v;
  dst[3] = s.a;
  dst[4] = s.w;
  dst[5] = s.is_pedestrian ? 1.0 : 0.0;
}

}  // namespace

ModelInputs EncodeFeatures(const Scene& scene, const PaddingLimits& limits) {
  Require(scene.frame == Frame::kTargetCentric, ErrorCode::kInvalidArgument,
          "features are computed in the target-centric frame");
  ValidateScene(scene);
  const std::size_t nbrs = scene.neighbors.size();
  const std::size_t nodes = scene.graph.nodes.size();
  if (nbrs > limits.max_neighbors) {
    Fail(ErrorCode::kLimitExceeded, std::to_string(nbrs) + " neighbors exceed N_max=" +
                                        std::to_string(limits.max_neighbors));
  }
  if (nodes > limits.max_nodes) {
    Fail(ErrorCode::kLimitExceeded, std::to_string(nodes) + " lane nodes exceed V_max=" +
                                        std::to_string(limits.max_nodes));
  }

  const std::size_t steps = scene.target.states.size();
  const std::size_t poses = scene.graph.nodes.front().poses.size();
  const std::size_t n_max = limits.max_neighbors;
  const std::size_t v_max = limits.max_nodes;

  ModelInputs in;
  in.target_feats = diff::Tensor({steps, kAgentFeatures});
  for (std::size_t t = 0; t < steps; ++t)
    if (scene.target.observed[t])
      WriteState(scene.target.states[t], in.target_feats.raw() + t * kAgentFeatures);

  in.nbr_feats = diff::Tensor({n_max, steps, kAgentFeatures});
  in.nbr_mask.assign(n_max, 0);
  for (std::size_t i = 0; i < nbrs; ++i) {
    in.nbr_mask[i] = 1;
    const auto& track = scene.neighbors[i];
    for (std::size_t t = 0; t < steps; ++t)
      if (track.observed[t])
        WriteState(track.states[t],
                   in.nbr_feats.raw() + (i * steps + t) * kAgentFeatures);
  }

  in.node_feats = diff::Tensor({v_max, poses, kPoseFeatures});
  in.node_mask.assign(v_max, 0);
  for (std::size_t v = 0; v < nodes; ++v) {
    in.node_mask[v] = 1;
    const auto& node = scene.graph.nodes[v];
    for (std::size_t p = 0; p < poses; ++p) {
      double* dst = in.node_feats.raw() + (v * poses + p) * kPoseFeatures;
      dst[0] = node.poses[p].x;
      dst[1] = node.poses[p].y;
      dst[2] = node.poses[p].theta;
      dst[3] = node.poses[p].on_stop_or_crosswalk ? 1.0 : 0.0;
    }
  }

  in.adjacency_mask.assign(v_max * v_max, 0);
  for (const auto& [from, to] : scene.graph.successors) {
    const auto i = scene.graph.IndexOf(from);
    const auto j = scene.graph.IndexOf(to);
    if (i && j) in.adjacency_mask[*i * v_max + *j] = 1;
  }
  return in;
}

}  // namespace gcgat::scene
