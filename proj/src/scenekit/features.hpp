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

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "diffcore/tensor.hpp"
#include "scenekit/scene.hpp"

namespace gcgat::scene {

inline constexpr std::size_t kAgentFeatures = 6;  // x, y, v, a, w, pedestrian
inline constexpr std::size_t kPoseFeatures = 4;   // x, y, theta, stop/crosswalk

struct PaddingLimits {
  std::size_t max_neighbors = 16;
  std::size_t max_nodes = 64;
};

// Fixed-shape model inputs. Real entities occupy the leading rows; padded rows
// are zero and masked out. Masks hold one byte (0/1) per entry.
struct ModelInputs {
  diff::Tensor target_feats;  // [h+1, 6]
  diff::Tensor nbr_feats;     // [N_max, h+1, 6]
  std::vector<std::uint8_t> nbr_mask;        // [N_max]
  diff::Tensor node_feats;    // [V_max, P, 4]
  std::vector<std::uint8_t> node_mask;       // [V_max]
  std::vector<std::uint8_t> adjacency_mask;  // [V_max * V_max], i -> j at i*V+j

  std::size_t steps() const { return target_feats.dim(0); }
  std::size_t max_neighbors() const { return nbr_mask.size(); }
  std::size_t max_nodes() const { return node_mask.size(); }
  std::size_t poses_per_node() const { return node_feats.dim(1); }
  bool operator==(const ModelInputs&) const = default;
};

// Requires a target-centric scene. Throws LimitExceeded when the scene has
// more neighbors or lane nodes than the padded capacity.
ModelInputs EncodeFeatures(const Scene& scene, const PaddingLimits& limits);

}  // namespace gcgat::scene
