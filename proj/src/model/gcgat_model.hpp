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

// The GC-GAT network.
//
//   encoder     per-context MLP + GRU for the target, the neighbours and the
//               lane nodes; lane nodes attend over neighbours; GAT rounds over
//               the successor graph.
//   interactor  target-to-lane and target-to-agent attention, Gumbel-Softmax
//               goal proposals over lane nodes, K mode embeddings refined by
//               four cross-attention blocks (target, neighbours, lanes, goals).
//   decoder     mixing coefficients from the mode encodings; a GRU unrolled
//               over the horizon per mode, with Laplace location/scale heads.
//               The location head emits per-step displacements that are
//               summed into positions.
//
// Padded rows are dropped before any computation (the masks select the real
// entities), so padding can never leak into an output or a gradient.

#pragma once

#include <cstdint>
#include <vector>

#include "diffcore/layers.hpp"
#include "diffcore/params.hpp"
#include "model/model_config.hpp"
#include "scenekit/features.hpp"
#include "scenekit/scene.hpp"

namespace gcgat::model {

// All randomness of one forward pass, drawn up front so that a forward pass is
// a deterministic function of (inputs, parameters, noise).
struct ForwardNoise {
  diff::Tensor gumbel;  // [S, V_max] standard Gumbel; column i belongs to node slot i
  diff::Tensor latent;  // [K, latent_dim] standard normal, scaled by sigma_z in use

  static ForwardNoise Draw(const ModelConfig& cfg, std::uint64_t seed);
  // Same shapes, all zero: no latent noise and un-perturbed goal logits.
  static ForwardNoise Zero(const ModelConfig& cfg);
};

struct Encodings {
  diff::Var h_target;  // [1, D]
  diff::Var h_nbr;     // [n, D] real neighbours only
  diff::Var h_lane;    // [v, D] real nodes only
  std::vector<std::size_t> nbr_slots;   // padded slot of each h_nbr row
  std::vector<std::size_t> node_slots;  // padded slot of each h_lane row
  std::size_t max_neighbors = 0;
  std::size_t max_nodes = 0;
};

struct GoalProposal {
  diff::Var goal_weights;  // [S, v] over real nodes
  diff::Var h_goal;        // [S, 2D]; invalid when goal proposals are ablated
};

struct InteractOutput {
  diff::Var k_enc;          // [K, D]
  diff::Var h_target_ctx;   // [1, D] (h_target ⊕ Atn_t2l ⊕ Atn_t2a, projected)
  GoalProposal goals;
};

// Differentiable outputs of one scene.
struct ForwardOutput {
  diff::Var pi;  // [1, K]
  diff::Var mu;  // [K, 2f] meters, column 2t + d
  diff::Var b;   // [K, 2f] meters, > 0
  diff::Tensor goal_weights;  // [S, V_max], zero on padded slots
};

// Plain-value prediction of one scene.
struct PredictionSet {
  std::vector<double> pi;    // [K]
  diff::Tensor mu;           // [K, f, 2]
  diff::Tensor b;            // [K, f, 2]
  diff::Tensor goal_weights; // [S, V_max]

  std::size_t modes() const { return pi.size(); }
  std::size_t steps() const { return mu.dim(1); }
  bool operator==(const PredictionSet&) const = default;
};

PredictionSet ToPredictionSet(const ForwardOutput& out, std::size_t future_steps);

class GcgatModel {
 public:
  // Registers and initializes every parameter from `seed`. Parameter values
  // are stored at single precision (rounded), matching the checkpoint format.
  static GcgatModel Create(const ModelConfig& cfg, std::uint64_t seed);

  const ModelConfig& config() const noexcept { return cfg_; }
  diff::ParameterStore& params() noexcept { return store_; }
  const diff::ParameterStore& params() const noexcept { return store_; }

  Encodings Encode(diff::Binding& b, const scene::ModelInputs& in) const;
  InteractOutput Interact(diff::Binding& b, const Encodings& enc,
                          const ForwardNoise& noise) const;
  ForwardOutput Decode(diff::Binding& b, const InteractOutput& ctx,
                       const ForwardNoise& noise) const;
  ForwardOutput Forward(diff::Binding& b, const scene::ModelInputs& in,
                        const ForwardNoise& noise) const;

  // Target-centric scene in, prediction out; deterministic in (scene, seed).
  PredictionSet Predict(const scene::Scene& scene, std::uint64_t seed) const;
  PredictionSet Predict(const scene::ModelInputs& in, const ForwardNoise& noise) const;

 private:
  struct Layers {
    diff::Mlp target_mlp;
    diff::Mlp nbr_mlp;
    diff::Mlp lane_mlp;
    diff::Gru target_gru;
    diff::Gru nbr_gru;
    diff::Gru lane_gru;
    diff::MultiHeadAttention n2l;
    diff::Linear lane_proj;
    std::vector<diff::GatLayer> gat;

    diff::MultiHeadAttention t2l;
    diff::MultiHeadAttention t2a;
    diff::Mlp goal_mlp;
    diff::Linear target_proj;
    std::size_t mode_embedding = 0;
    diff::MultiHeadAttention cross_target;
    diff::MultiHeadAttention cross_nbr;
    diff::MultiHeadAttention cross_lane;
    diff::MultiHeadAttention cross_goal;
    diff::LayerNorm norm_target;
    diff::LayerNorm norm_nbr;
    diff::LayerNorm norm_lane;
    diff::LayerNorm norm_goal;
    diff::Linear goal_inject;  // only used without cross-attention

    diff::Mlp pi_mlp;
    diff::Gru dec_gru;
    diff::Mlp mu_mlp;
    diff::Mlp b_mlp;
  };

  ModelConfig cfg_;
  diff::ParameterStore store_;
  Layers l_;
};

}  // namespace gcgat::model
