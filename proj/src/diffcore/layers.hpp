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

// Differentiable building blocks. Each layer only stores indices into a
// ParameterStore; forward passes resolve them through a Binding, so one layer
// object can serve any number of concurrent graphs.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "diffcore/params.hpp"
#include "diffcore/rng.hpp"
#include "diffcore/var.hpp"

namespace gcgat::diff {

inline constexpr double kMlpLeakySlope = 0.1;
inline constexpr double kGatScoreSlope = 0.2;

// uniform(-1/sqrt(fan_in), 1/sqrt(fan_in))
Tensor UniformInit(std::size_t rows, std::size_t cols, std::size_t fan_in,
                   RngStream& rng);
// normal(0, std)
Tensor NormalInit(std::size_t rows, std::size_t cols, double std, RngStream& rng);

// Mask helpers: masks are stored as one byte per entry.
using Mask = std::vector<std::uint8_t>;
std::size_t CountSet(std::span<const std::uint8_t> mask);
Var MaskColumn(std::span<const std::uint8_t> mask);  // [n,1] of 0/1

struct Linear {
  std::size_t weight = 0;  // [in, out]
  std::size_t bias = 0;    // [1, out]
  std::size_t in = 0;
  std::size_t out = 0;
  bool has_bias = true;

  static Linear Create(ParameterStore& store, const std::string& name,
                       std::size_t in, std::size_t out, RngStream& rng,
                       bool has_bias = true);
  Var Forward(Binding& b, const Var& x) const;
};

// Affine/leaky-ReLU stack; the last layer is linear. Heads whose outputs feed
// a softmax over rows drop the last bias (`last_bias = false`), since a shared
// shift of all logits does not change the result.
struct Mlp {
  std::vector<Linear> layers;

  static Mlp Create(ParameterStore& store, const std::string& name,
                    std::span<const std::size_t> widths, RngStream& rng,
                    bool last_bias = true);
  Var Forward(Binding& b, const Var& x) const;
  std::size_t in() const { return layers.front().in; }
  std::size_t out() const { return layers.back().out; }
};

struct GruOutput {
  std::vector<Var> states;  // one [B, H] per step
  Var last;                 // == states.back()
};

// Standard GRU (update gate, reset gate applied to the hidden projection,
// tanh candidate). Rows are independent sequences.
struct Gru {
  std::size_t w_x = 0;  // [in, 3H]
  std::size_t w_h = 0;  // [H, 3H]
  std::size_t b_x = 0;  // [1, 3H]
  std::size_t b_h = 0;  // [1, 3H]
  std::size_t in = 0;
  std::size_t hidden = 0;

  static Gru Create(ParameterStore& store, const std::string& name,
                    std::size_t in, std::size_t hidden, RngStream& rng);

  // Input projection x W + b for one step, [B, 3H].
  Var ProjectInput(Binding& b, const Var& x) const;
  // One recurrence step from a precomputed input projection.
  Var Step(Binding& b, const Var& gx, const Var& h) const;
  GruOutput Forward(Binding& b, std::span<const Var> inputs, const Var& h0) const;
};

struct LayerNorm {
  std::size_t gamma = 0;
  std::size_t beta = 0;
  std::size_t dim = 0;

  static LayerNorm Create(ParameterStore& store, const std::string& name,
                          std::size_t dim);
  Var Forward(Binding& b, const Var& x) const;
};

// Scaled dot-product attention with `heads` heads and an output projection.
// Masked keys get zero weight; if every key is masked the result is all zero.
struct MultiHeadAttention {
  Linear query;
  Linear key;
  Linear value;
  Linear output;
  std::size_t heads = 1;
  std::size_t dim = 0;

  static MultiHeadAttention Create(ParameterStore& store, const std::string& name,
                                   std::size_t query_dim, std::size_t key_dim,
                                   std::size_t dim, std::size_t heads,
                                   RngStream& rng);
  Var Forward(Binding& b, const Var& q, const Var& k, const Var& v,
              std::span<const std::uint8_t> key_mask) const;
};

// Single-head graph attention layer. adjacency[i * V + j] != 0 means an edge
// i -> j; node j aggregates over its in-neighbours and itself.
struct GatLayer {
  std::size_t weight = 0;   // [D, D]
  std::size_t att_src = 0;  // [D, 1]
  std::size_t att_dst = 0;  // [D, 1]
  std::size_t bias = 0;     // [1, D]
  std::size_t dim = 0;

  static GatLayer Create(ParameterStore& store, const std::string& name,
                         std::size_t dim, RngStream& rng);
  Var Forward(Binding& b, const Var& x, std::span<const std::uint8_t> adjacency,
              std::span<const std::uint8_t> node_mask) const;
};

// Draws Gumbel(0,1) noise for `rows` samples over `cols` categories.
Tensor DrawGumbelNoise(std::size_t rows, std::size_t cols, RngStream& rng);

// softmax((logits + noise) / tau) per row over unmasked entries. `logits` is
// [1, V] (broadcast) or [S, V]; `noise` is [S, V] and is treated as constant.
Var GumbelSoftmax(const Var& logits, const Tensor& noise, double tau,
                  std::span<const std::uint8_t> mask);
Var GumbelSoftmax(const Var& logits, double tau,
                  std::span<const std::uint8_t> mask, RngStream& rng);

}  // namespace gcgat::diff
