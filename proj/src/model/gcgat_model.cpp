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

#include "model/gcgat_model.hpp"

#include <array>

#include "common/error.hpp"
#include "diffcore/rng.hpp"

namespace gcgat::model {

using diff::Binding;
using diff::Tensor;
using diff::Var;

void ModelConfig::Validate() const {
  Require(dim >= 1, ErrorCode::kConfig, "model.dim must be >= 1");
  Require(heads >= 1 && dim % heads == 0, ErrorCode::kConfig,
          "model.dim must be divisible by model.heads");
  Require(modes >= 2, ErrorCode::kConfig, "model.modes must be >= 2");
  Require(tau > 0.0, ErrorCode::kConfig, "model.tau must be > 0");
  Require(sigma_z >= 0.0, ErrorCode::kConfig, "model.sigma_z must be >= 0");
  Require(future_steps >= 1, ErrorCode::kConfig, "model.future_steps must be >= 1");
  Require(latent_dim >= 1, ErrorCode::kConfig, "model.latent_dim must be >= 1");
  Require(position_scale > 0.0, ErrorCode::kConfig, "model.position_scale must be > 0");
  Require(max_nodes >= 1, ErrorCode::kConfig, "model.max_nodes must be >= 1");
}

ForwardNoise ForwardNoise::Draw(const ModelConfig& cfg, std::uint64_t seed) {
  ForwardNoise n;
  diff::RngStream gumbel(diff::RngStream::Derive(seed, 1));
  n.gumbel = diff::DrawGumbelNoise(cfg.ResolvedGoalSamples(), cfg.max_nodes, gumbel);
  diff::RngStream latent(diff::RngStream::Derive(seed, 2));
  n.latent = Tensor::Matrix(cfg.modes, cfg.latent_dim);
  for (double& v : n.latent.values()) v = latent.Normal();
  return n;
}

ForwardNoise ForwardNoise::Zero(const ModelConfig& cfg) {
  return {Tensor::Matrix(cfg.ResolvedGoalSamples(), cfg.max_nodes),
          Tensor::Matrix(cfg.modes, cfg.latent_dim)};
}

namespace {

constexpr double kMinScale = 1e-3;

std::vector<std::size_t> SetIndices(const std::vector<std::uint8_t>& mask) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) out.push_back(i);
  return out;
}

// Packs the real sequences of a padded [slots, T, F] tensor into one [T*n, F]
// matrix with row t*n + i holding step t of sequence i, scaling feature c by
// scale[c].
Tensor PackSequences(const Tensor& padded, const std::vector<std::size_t>& slots,
                     std::span<const double> scale) {
  const std::size_t steps = padded.dim(1);
  const std::size_t feats = padded.dim(2);
  const std::size_t n = slots.size();
  Tensor out = Tensor::Matrix(steps * n, feats);
  for (std::size_t t = 0; t < steps; ++t)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < feats; ++c)
        out(t * n + i, c) = padded(slots[i], t, c) * scale[c];
  return out;
}

// MLP over all packed rows, then a GRU whose step t consumes rows t*n..t*n+n.
Var EncodeSequences(Binding& b, const diff::Mlp& mlp, const diff::Gru& gru,
                    const Tensor& packed, std::size_t steps) {
  const std::size_t n = packed.rows() / steps;
  const Var gx = gru.ProjectInput(b, mlp.Forward(b, diff::Constant(packed)));
  Var h = diff::Zeros(n, gru.hidden);
  for (std::size_t t = 0; t < steps; ++t) h = gru.Step(b, diff::SliceRows(gx, t * n, n), h);
  return h;
}

Var Concat(std::initializer_list<Var> parts) {
  return diff::ConcatCols(std::span<const Var>(parts.begin(), parts.size()));
}

// [2f, 2f] with entry (2s + d, 2t + d) = 1 for s <= t: right-multiplying a
// row of per-step (x, y) displacements yields cumulative positions.
Var RunningSum(std::size_t f) {
  Tensor u = Tensor::Matrix(2 * f, 2 * f);
  for (std::size_t t = 0; t < f; ++t)
    for (std::size_t s = 0; s <= t; ++s)
      for (std::size_t d = 0; d < 2; ++d) u(2 * s + d, 2 * t + d) = 1.0;
  return diff::Constant(std::move(u));
}

}  // namespace

GcgatModel GcgatModel::Create(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.Validate();
  GcgatModel m;
  m.cfg_ = cfg;
  diff::RngStream rng(seed);
  auto& s = m.store_;
  auto& l = m.l_;
  const std::size_t d = cfg.dim;
  const std::size_t h = cfg.heads;
  const std::array<std::size_t, 3> agent_widths{scene::kAgentFeatures, d, d};
  const std::array<std::size_t, 3> pose_widths{scene::kPoseFeatures, d, d};

  l.target_mlp = diff::Mlp::Create(s, "enc.target_mlp", agent_widths, rng);
  l.target_gru = diff::Gru::Create(s, "enc.target_gru", d, d, rng);
  l.nbr_mlp = diff::Mlp::Create(s, "enc.nbr_mlp", agent_widths, rng);
  l.nbr_gru = diff::Gru::Create(s, "enc.nbr_gru", d, d, rng);
  l.lane_mlp = diff::Mlp::Create(s, "enc.lane_mlp", pose_widths, rng);
  l.lane_gru = diff::Gru::Create(s, "enc.lane_gru", d, d, rng);
  l.n2l = diff::MultiHeadAttention::Create(s, "enc.n2l", d, d, d, h, rng);
  l.lane_proj = diff::Linear::Create(s, "enc.lane_proj", 2 * d, d, rng);
  for (std::size_t i = 0; i < cfg.gat_layers; ++i)
    l.gat.push_back(diff::GatLayer::Create(s, "enc.gat" + std::to_string(i), d, rng));

  l.t2l = diff::MultiHeadAttention::Create(s, "int.t2l", d, d, d, h, rng);
  l.t2a = diff::MultiHeadAttention::Create(s, "int.t2a", d, d, d, h, rng);
  const bool goals = cfg.ablation.use_goal_proposals;
  const bool cross = cfg.ablation.use_cross_attention;
  if (goals) {
    const std::array<std::size_t, 3> goal_widths{2 * d, d, 1};
    l.goal_mlp = diff::Mlp::Create(s, "int.goal_mlp", goal_widths, rng, false);
  }
  l.target_proj = diff::Linear::Create(s, "int.target_proj", 3 * d, d, rng);
  l.mode_embedding =
      s.Add("int.mode_embedding", diff::NormalInit(cfg.modes, d, 1.0, rng));
  if (cross) {
    l.cross_target = diff::MultiHeadAttention::Create(s, "int.cross_target", d, d, d, h, rng);
    l.norm_target = diff::LayerNorm::Create(s, "int.norm_target", d);
    l.cross_nbr = diff::MultiHeadAttention::Create(s, "int.cross_nbr", d, d, d, h, rng);
    l.norm_nbr = diff::LayerNorm::Create(s, "int.norm_nbr", d);
    l.cross_lane = diff::MultiHeadAttention::Create(s, "int.cross_lane", d, d, d, h, rng);
    l.norm_lane = diff::LayerNorm::Create(s, "int.norm_lane", d);
    if (goals) {
      l.cross_goal =
          diff::MultiHeadAttention::Create(s, "int.cross_goal", d, 2 * d, d, h, rng);
      l.norm_goal = diff::LayerNorm::Create(s, "int.norm_goal", d);
    }
  } else {
    l.norm_target = diff::LayerNorm::Create(s, "int.norm", d);
    if (goals) l.goal_inject = diff::Linear::Create(s, "int.goal_inject", 2 * d, d, rng);
  }

  const std::array<std::size_t, 3> pi_widths{d, d, 1};
  l.pi_mlp = diff::Mlp::Create(s, "dec.pi_mlp", pi_widths, rng, false);
  l.dec_gru = diff::Gru::Create(s, "dec.gru", 2 * d + cfg.latent_dim, d, rng);
  const std::array<std::size_t, 3> head_widths{d, d, 2};
  l.mu_mlp = diff::Mlp::Create(s, "dec.mu_mlp", head_widths, rng);
  l.b_mlp = diff::Mlp::Create(s, "dec.b_mlp", head_widths, rng);

  for (auto& p : s.all())
    for (double& v : p.value.values()) v = static_cast<double>(static_cast<float>(v));
  return m;
}

Encodings GcgatModel::Encode(Binding& b, const scene::ModelInputs& in) const {
  const std::size_t steps = in.steps();
  Require(in.target_feats.rank() == 2 && in.target_feats.cols() == scene::kAgentFeatures,
          ErrorCode::kShapeMismatch, "target features must be [h+1, 6]");
  Require(in.nbr_feats.rank() == 3 && in.nbr_feats.dim(0) == in.max_neighbors() &&
              (in.max_neighbors() == 0 || in.nbr_feats.dim(1) == steps),
          ErrorCode::kShapeMismatch, "neighbor features must be [N_max, h+1, 6]");
  Require(in.node_feats.rank() == 3 && in.node_feats.dim(0) == in.max_nodes() &&
              in.adjacency_mask.size() == in.max_nodes() * in.max_nodes(),
          ErrorCode::kShapeMismatch, "lane inputs must be [V_max, P, 4] and [V_max, V_max]");

  const double inv = 1.0 / cfg_.position_scale;
  const std::array<double, scene::kAgentFeatures> agent_scale{inv, inv, inv, 1.0, 1.0, 1.0};
  const std::array<double, scene::kPoseFeatures> pose_scale{inv, inv, 1.0, 1.0};

  Encodings enc;
  enc.max_neighbors = in.max_neighbors();
  enc.max_nodes = in.max_nodes();
  enc.nbr_slots = SetIndices(in.nbr_mask);
  enc.node_slots = SetIndices(in.node_mask);
  const std::size_t n = enc.nbr_slots.size();
  const std::size_t v = enc.node_slots.size();
  Require(v >= 1, ErrorCode::kDegenerateInput, "scene has no lane nodes");

  const Tensor target = in.target_feats.Reshaped({1, steps, scene::kAgentFeatures});
  enc.h_target = EncodeSequences(b, l_.target_mlp, l_.target_gru,
                                 PackSequences(target, {0}, agent_scale), steps);
  enc.h_nbr = n == 0 ? diff::Zeros(0, cfg_.dim)
                     : EncodeSequences(b, l_.nbr_mlp, l_.nbr_gru,
                                       PackSequences(in.nbr_feats, enc.nbr_slots, agent_scale),
                                       steps);
  const std::size_t poses = in.poses_per_node();
  Var lane = EncodeSequences(b, l_.lane_mlp, l_.lane_gru,
                             PackSequences(in.node_feats, enc.node_slots, pose_scale), poses);

  // Lane nodes query the neighbour encodings.
  const Var n2l = l_.n2l.Forward(b, lane, enc.h_nbr, enc.h_nbr, {});
  lane = l_.lane_proj.Forward(b, Concat({lane, n2l}));

  diff::Mask adjacency(v * v, 0);
  for (std::size_t i = 0; i < v; ++i)
    for (std::size_t j = 0; j < v; ++j)
      adjacency[i * v + j] =
          in.adjacency_mask[enc.node_slots[i] * in.max_nodes() + enc.node_slots[j]];
  const diff::Mask all_real(v, 1);
  for (const auto& gat : l_.gat) lane = gat.Forward(b, lane, adjacency, all_real);
  enc.h_lane = lane;
  return enc;
}

InteractOutput GcgatModel::Interact(Binding& b, const Encodings& enc,
                                    const ForwardNoise& noise) const {
  const std::size_t v = enc.node_slots.size();
  const std::size_t samples = cfg_.ResolvedGoalSamples();
  InteractOutput out;

  const Var t2l = l_.t2l.Forward(b, enc.h_target, enc.h_lane, enc.h_lane, {});
  const Var t2a = l_.t2a.Forward(b, enc.h_target, enc.h_nbr, enc.h_nbr, {});

  if (cfg_.ablation.use_goal_proposals) {
    Require(noise.gumbel.rows() == samples && noise.gumbel.cols() >= enc.max_nodes,
            ErrorCode::kShapeMismatch, "Gumbel noise must be [S, V_max]");
    Tensor g = Tensor::Matrix(samples, v);
    for (std::size_t s = 0; s < samples; ++s)
      for (std::size_t i = 0; i < v; ++i) g(s, i) = noise.gumbel(s, enc.node_slots[i]);
    const Var logits = diff::Transpose(
        l_.goal_mlp.Forward(b, Concat({diff::RepeatRows(enc.h_target, v), enc.h_lane})));
    out.goals.goal_weights = diff::GumbelSoftmax(logits, g, cfg_.tau, {});
    const Var weighted = diff::MatMul(out.goals.goal_weights, enc.h_lane);
    out.goals.h_goal = Concat({diff::RepeatRows(t2l, samples), weighted});
  } else {
    out.goals.goal_weights =
        diff::Constant(Tensor::Matrix(samples, v, 1.0 / static_cast<double>(v)));
  }

  out.h_target_ctx = l_.target_proj.Forward(b, Concat({enc.h_target, t2l, t2a}));
  const Var k_emb = diff::AddRow(b.Get(l_.mode_embedding), out.h_target_ctx);

  if (!cfg_.ablation.use_cross_attention) {
    Var x = k_emb;
    if (cfg_.ablation.use_goal_proposals) {
      std::vector<std::size_t> rows(cfg_.modes);
      for (std::size_t k = 0; k < cfg_.modes; ++k) rows[k] = k % samples;
      x = diff::Add(x, l_.goal_inject.Forward(b, diff::GatherRows(out.goals.h_goal, rows)));
    }
    out.k_enc = l_.norm_target.Forward(b, x);
    return out;
  }

  auto block = [&](const Var& q, const diff::MultiHeadAttention& mha,
                   const diff::LayerNorm& norm, const Var& kv) {
    return norm.Forward(b, diff::Add(q, mha.Forward(b, q, kv, kv, {})));
  };
  Var x = block(k_emb, l_.cross_target, l_.norm_target, out.h_target_ctx);
  x = block(x, l_.cross_nbr, l_.norm_nbr, enc.h_nbr);
  x = block(x, l_.cross_lane, l_.norm_lane, enc.h_lane);
  if (cfg_.ablation.use_goal_proposals)
    x = block(x, l_.cross_goal, l_.norm_goal, out.goals.h_goal);
  out.k_enc = x;
  return out;
}

ForwardOutput GcgatModel::Decode(Binding& b, const InteractOutput& ctx,
                                 const ForwardNoise& noise) const {
  const std::size_t k = cfg_.modes;
  const std::size_t f = cfg_.future_steps;
  Require(noise.latent.rows() == k && noise.latent.cols() == cfg_.latent_dim,
          ErrorCode::kShapeMismatch, "latent noise must be [K, latent_dim]");
  ForwardOutput out;
  out.pi = diff::SoftmaxRows(diff::Transpose(l_.pi_mlp.Forward(b, ctx.k_enc)));

  Tensor z = noise.latent;
  for (double& e : z.values()) e *= cfg_.sigma_z;
  const Var input =
      Concat({diff::RepeatRows(ctx.h_target_ctx, k), diff::Constant(std::move(z)), ctx.k_enc});
  const Var gx = l_.dec_gru.ProjectInput(b, input);
  Var h = diff::Zeros(k, cfg_.dim);
  std::vector<Var> states;
  states.reserve(f);
  for (std::size_t t = 0; t < f; ++t) {
    h = l_.dec_gru.Step(b, gx, h);
    states.push_back(h);
  }
  const Var stacked = diff::ConcatRows(states);  // row t*K + k
  std::vector<std::size_t> order(k * f);         // -> row k*f + t
  for (std::size_t m = 0; m < k; ++m)
    for (std::size_t t = 0; t < f; ++t) order[m * f + t] = t * k + m;
  // The location head emits per-step displacements; mu is their running sum.
  const Var step = diff::Scale(l_.mu_mlp.Forward(b, stacked), cfg_.position_scale);
  const Var scale = diff::AddScalar(diff::Softplus(l_.b_mlp.Forward(b, stacked)), kMinScale);
  out.mu = diff::MatMul(diff::Reshape(diff::GatherRows(step, order), k, 2 * f), RunningSum(f));
  out.b = diff::Reshape(diff::GatherRows(scale, order), k, 2 * f);
  return out;
}

ForwardOutput GcgatModel::Forward(Binding& b, const scene::ModelInputs& in,
                                  const ForwardNoise& noise) const {
  const Encodings enc = Encode(b, in);
  const InteractOutput ctx = Interact(b, enc, noise);
  ForwardOutput out = Decode(b, ctx, noise);
  const Var& w = ctx.goals.goal_weights;
  out.goal_weights = Tensor::Matrix(w.rows(), enc.max_nodes);
  for (std::size_t s = 0; s < w.rows(); ++s)
    for (std::size_t i = 0; i < enc.node_slots.size(); ++i)
      out.goal_weights(s, enc.node_slots[i]) = w(s, i);
  return out;
}

PredictionSet ToPredictionSet(const ForwardOutput& out, std::size_t future_steps) {
  PredictionSet p;
  const std::size_t k = out.pi.cols();
  p.pi.assign(out.pi.value().values().begin(), out.pi.value().values().end());
  p.mu = out.mu.value().Reshaped({k, future_steps, 2});
  p.b = out.b.value().Reshaped({k, future_steps, 2});
  p.goal_weights = out.goal_weights;
  return p;
}

PredictionSet GcgatModel::Predict(const scene::ModelInputs& in,
                                  const ForwardNoise& noise) const {
  Binding b(store_, false);
  return ToPredictionSet(Forward(b, in, noise), cfg_.future_steps);
}

PredictionSet GcgatModel::Predict(const scene::Scene& scene, std::uint64_t seed) const {
  return Predict(scene::EncodeFeatures(scene, cfg_.Limits()), ForwardNoise::Draw(cfg_, seed));
}

}  // namespace gcgat::model
