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
#include <string>

#include "scenekit/features.hpp"

namespace gcgat::model {

struct AblationFlags {
  bool use_goal_proposals = true;
  bool use_cross_attention = true;
  bool operator==(const AblationFlags&) const = default;
};

struct ModelConfig {
  std::size_t dim = 32;           // D
  std::size_t modes = 10;         // K
  std::size_t heads = 4;
  std::size_t gat_layers = 2;
  double tau = 1.0;               // Gumbel-Softmax temperature
  double sigma_z = 0.2;           // std of the latent noise z
  std::size_t goal_samples = 0;   // S; 0 means S = K
  std::size_t future_steps = 12;  // f
  std::size_t latent_dim = 8;     // width of z
  double position_scale = 10.0;   // m; inputs are divided by it, mu multiplied
  std::size_t max_neighbors = 16; // N_max
  std::size_t max_nodes = 64;     // V_max
  AblationFlags ablation;

  std::size_t ResolvedGoalSamples() const { return goal_samples ? goal_samples : modes; }
  scene::PaddingLimits Limits() const { return {max_neighbors, max_nodes}; }
  // Throws kConfig on violated invariants.
  void Validate() const;
  bool operator==(const ModelConfig&) const = default;
};

}  // namespace gcgat::model
