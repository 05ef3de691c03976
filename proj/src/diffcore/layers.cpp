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

#include "diffcore/layers.hpp"

#include <algorithm>
#include <cmath>

namespace gcgat::diff {

Tensor UniformInit(std::size_t rows, std::size_t cols, std::size_t fan_in,
                   RngStream& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1)));
  Tensor t = Tensor::Matrix(rows, cols);
  for (double& v : t.values()) v = rng.Uniform(-bound, bound);
  return t;
}

Tensor NormalInit(std::size_t rows, std::size_t cols, double std, RngStream& rng) {
  Tensor t = Tensor::Matrix(rows, cols);
  for (double& v : t.values()) v = std * rng.Normal();
  return t;
}

std::size_t CountSet(std::span<const std::uint8_t> mask) {
  return static_cast<std::size_t>(
      std::count_if(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; }));
}

Var MaskColumn(std::span<const std::uint8_t> mask) {
  Tensor t = Tensor::Matrix(mask.size(), 1);
  for (std::size_t i = 0; i < mask.size(); ++i) t(i, 0) = mask[i] ? 1.0 : 0.0;
  return Constant(std::move(t));
}

// --- Linear / MLP -------------------------------------------------------------

Linear Linear::Create(ParameterStore& store, const std::string& name,
                      std::size_t in, std::size_t out, RngStream& rng,
                      bool has_bias) {
  Linear l;
  l.in = in;
  l.out = out;
  l.has_bias = has_bias;
  l.weight = store.Add(name + ".weight", UniformInit(in, out, in, rng));
  if (has_bias) l.bias = store.Add(name + ".bias", UniformInit(1, out, in, rng));
  return l;
}

Var Linear::Forward(Binding& b, const Var& x) const {
  Require(x.cols() == in, ErrorCode::kShapeMismatch,
          "Linear expects " + std::to_string(in) + " input features, got " +
              std::to_string(x.cols()));
  Var y = MatMul(x, b.Get(weight));
  return has_bias ? AddRow(y, b.Get(bias)) : y;
}

Mlp Mlp::Create(ParameterStore& store, const std::string& name,
                std::span<const std::size_t> widths, RngStream& rng,
                bool last_bias) {
  Require(widths.size() >= 2, ErrorCode::kShapeMismatch,
          "an MLP needs at least input and output widths");
  Mlp m;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const bool bias = last_bias || i + 2 < widths.size();
    m.layers.push_back(Linear::Create(store, name + "." + std::to_string(i),
                                      widths[i], widths[i + 1], rng, bias));
  }
  return m;
}

Var Mlp::Forward(Binding& b, const Var& x) const {
  Var h = x;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    h = layers[i].Forward(b, h);
    if (i + 1 < layers.size()) h = LeakyRelu(h, kMlpLeakySlope);
  }
  return h;
}

// --- GRU ----------------------------------------------------------------------

Gru Gru::Create(ParameterStore& store, const std::string& name, std::size_t in,
                std::size_t hidden, RngStream& rng) {
  Gru g;
  g.in = in;
  g.hidden = hidden;
  g.w_x = store.Add(name + ".w_x", UniformInit(in, 3 * hidden, in, rng));
  g.w_h = store.Add(name + ".w_h", UniformInit(hidden, 3 * hidden, hidden, rng));
  g.b_x = store.Add(name + ".b_x", UniformInit(1, 3 * hidden, in, rng));
  g.b_h = store.Add(name + ".b_h", UniformInit(1, 3 * hidden, hidden, rng));
  return g;
}

Var Gru::ProjectInput(Binding& b, const Var& x) const {
  Require(x.cols() == in, ErrorCode::kShapeMismatch, "GRU input width mismatch");
  return AddRow(MatMul(x, b.Get(w_x)), b.Get(b_x));
}

Var Gru::Step(Binding& b, const Var& gx, const Var& h) const {
  Require(h.cols() == hidden, ErrorCode::kShapeMismatch, "GRU state width mismatch");
  Var gh = AddRow(MatMul(h, b.Get(w_h)), b.Get(b_h));
  return GruCell(gx, gh, h);
}

GruOutput Gru::Forward(Binding& b, std::span<const Var> inputs, const Var& h0) const {
  Require(!inputs.empty(), ErrorCode::kShapeMismatch, "GRU needs T >= 1");
  GruOutput result;
  Var h = h0;
  for (const Var& x : inputs) {
    h = Step(b, ProjectInput(b, x), h);
    result.states.push_back(h);
  }
  result.last = h;
  return result;
}

// --- LayerNorm ------------------------------------------------------------------

LayerNorm LayerNorm::Create(ParameterStore& store, const std::string& name,
                            std::size_t dim) {
  LayerNorm n;
  n.dim = dim;
  n.gamma = store.Add(name + ".gamma", Tensor::Matrix(1, dim, 1.0));
  n.beta = store.Add(name + ".beta", Tensor::Matrix(1, dim, 0.0));
  return n;
}

Var LayerNorm::Forward(Binding& b, const Var& x) const {
  return LayerNormRows(x, b.Get(gamma), b.Get(beta), 1e-5);
}

// --- Attention ------------------------------------------------------------------

MultiHeadAttention MultiHeadAttention::Create(ParameterStore& store,
                                              const std::string& name,
                                              std::size_t query_dim,
                                              std::size_t key_dim, std::size_t dim,
                                              std::size_t heads, RngStream& rng) {
  Require(heads >= 1 && dim % heads == 0, ErrorCode::kShapeMismatch,
          "attention width must be divisible by the head count");
  MultiHeadAttention a;
  a.dim = dim;
  a.heads = heads;
  a.query = Linear::Create(store, name + ".q", query_dim, dim, rng);
  // A key bias adds the same q.b to every score of a query, which the softmax
  // cancels; it would be a parameter with an identically zero gradient.
  a.key = Linear::Create(store, name + ".k", key_dim, dim, rng, false);
  a.value = Linear::Create(store, name + ".v", key_dim, dim, rng);
  a.output = Linear::Create(store, name + ".o", dim, dim, rng);
  return a;
}

Var MultiHeadAttention::Forward(Binding& b, const Var& q, const Var& k,
                                const Var& v,
                                std::span<const std::uint8_t> key_mask) const {
  Require(k.rows() == v.rows(), ErrorCode::kShapeMismatch,
          "keys and values must have the same row count");
  Require(key_mask.empty() || key_mask.size() == k.rows(),
          ErrorCode::kShapeMismatch, "key mask length must equal key count");
  if (k.rows() == 0 || (!key_mask.empty() && CountSet(key_mask) == 0))
    return Zeros(q.rows(), dim);

  const Var qp = query.Forward(b, q);
  const Var kp = key.Forward(b, k);
  const Var vp = value.Forward(b, v);
  const std::size_t head_dim = dim / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

  std::vector<Var> per_head;
  per_head.reserve(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    const Var qh = SliceCols(qp, h * head_dim, head_dim);
    const Var kh = SliceCols(kp, h * head_dim, head_dim);
    const Var vh = SliceCols(vp, h * head_dim, head_dim);
    const Var scores = Scale(MatMulTransposed(qh, kh), scale);
    const Var weights = MaskedSoftmaxRows(scores, key_mask);
    per_head.push_back(MatMul(weights, vh));
  }
  const Var merged = heads == 1 ? per_head[0] : ConcatCols(per_head);
  return output.Forward(b, merged);
}

// --- GAT ------------------------------------------------------------------------

GatLayer GatLayer::Create(ParameterStore& store, const std::string& name,
                          std::size_t dim, RngStream& rng) {
  GatLayer g;
  g.dim = dim;
  g.weight = store.Add(name + ".weight", UniformInit(dim, dim, dim, rng));
  g.att_src = store.Add(name + ".att_src", UniformInit(dim, 1, dim, rng));
  g.att_dst = store.Add(name + ".att_dst", UniformInit(dim, 1, dim, rng));
  g.bias = store.Add(name + ".bias", UniformInit(1, dim, dim, rng));
  return g;
}

Var GatLayer::Forward(Binding& b, const Var& x,
                      std::span<const std::uint8_t> adjacency,
                      std::span<const std::uint8_t> node_mask) const {
  const std::size_t n = x.rows();
  Require(x.cols() == dim, ErrorCode::kShapeMismatch, "GAT input width mismatch");
  Require(adjacency.size() == n * n && node_mask.size() == n,
          ErrorCode::kShapeMismatch, "GAT adjacency/mask do not match node count");

  // attend[i * n + j]: may node i aggregate from node j
  Mask attend(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!node_mask[i]) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (!node_mask[j]) continue;
      if (i == j || adjacency[j * n + i]) attend[i * n + j] = 1;
    }
  }

  const Var wh = MatMul(x, b.Get(weight));
  const Var src = MatMul(wh, b.Get(att_src));  // [n,1]
  const Var dst = MatMul(wh, b.Get(att_dst));  // [n,1]
  const Var scores = LeakyRelu(AddOuter(dst, Transpose(src)), kGatScoreSlope);
  const Var alpha = MaskedSoftmaxRows(scores, attend);
  const Var out = LeakyRelu(AddRow(MatMul(alpha, wh), b.Get(bias)), kMlpLeakySlope);
  return MulColumn(out, MaskColumn(node_mask));
}

// --- Gumbel-Softmax -------------------------------------------------------------

Tensor DrawGumbelNoise(std::size_t rows, std::size_t cols, RngStream& rng) {
  Tensor t = Tensor::Matrix(rows, cols);
  for (double& v : t.values()) v = rng.Gumbel();
  return t;
}

Var GumbelSoftmax(const Var& logits, const Tensor& noise, double tau,
                  std::span<const std::uint8_t> mask) {
  Require(tau > 0.0, ErrorCode::kInvalidArgument, "Gumbel-Softmax needs tau > 0");
  Require(noise.rank() == 2 && noise.cols() == logits.cols(),
          ErrorCode::kShapeMismatch, "Gumbel noise width must match logits");
  Require(mask.empty() || mask.size() == logits.cols(), ErrorCode::kShapeMismatch,
          "Gumbel-Softmax mask length must match logits");
  Require(logits.cols() > 0 && (mask.empty() || CountSet(mask) > 0),
          ErrorCode::kDegenerateInput, "Gumbel-Softmax over an all-masked set");
  const std::size_t samples = noise.rows();
  Var base = logits;
  if (logits.rows() == 1 && samples != 1) base = RepeatRows(logits, samples);
  Require(base.rows() == samples, ErrorCode::kShapeMismatch,
          "Gumbel noise rows must match logits rows");
  const Var perturbed = Scale(Add(base, Constant(noise)), 1.0 / tau);
  return MaskedSoftmaxRows(perturbed, mask);
}

Var GumbelSoftmax(const Var& logits, double tau, std::span<const std::uint8_t> mask,
                  RngStream& rng) {
  return GumbelSoftmax(logits, DrawGumbelNoise(logits.rows(), logits.cols(), rng),
                       tau, mask);
}

}  // namespace gcgat::diff
