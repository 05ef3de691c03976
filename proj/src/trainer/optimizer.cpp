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

#include "trainer/optimizer.hpp"

#include <cmath>
#include <span>

#include "common/error.hpp"

namespace gcgat::trainer {

namespace {

void RoundSpan(std::span<double> values) {
  for (double& x : values) x = static_cast<double>(static_cast<float>(x));
}

}  // namespace

OptimizerState OptimizerState::Zeros(const diff::ParameterStore& store) {
  OptimizerState s;
  for (const auto& p : store.all()) {
    s.m.emplace_back(p.value.shape());
    s.v.emplace_back(p.value.shape());
  }
  return s;
}

void AdamStep(diff::ParameterStore& store, OptimizerState& state,
              const std::vector<std::vector<double>>& grads, double lr, const AdamHyper& hyper) {
  Require(grads.size() == store.size() && state.m.size() == store.size() &&
              state.v.size() == store.size(),
          ErrorCode::kShapeMismatch, "optimizer state does not match the parameters");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(hyper.beta1, t);
  const double c2 = 1.0 - std::pow(hyper.beta2, t);
  for (std::size_t i = 0; i < store.size(); ++i) {
    auto& p = store[i];
    if (!p.trainable) continue;
    auto theta = p.value.values();
    auto m = state.m[i].values();
    auto v = state.v[i].values();
    Require(grads[i].size() == theta.size() && m.size() == theta.size() &&
                v.size() == theta.size(),
            ErrorCode::kShapeMismatch, "gradient shape mismatch for '" + p.name + "'");
    for (std::size_t j = 0; j < theta.size(); ++j) {
      const double g = grads[i][j];
      m[j] = hyper.beta1 * m[j] + (1.0 - hyper.beta1) * g;
      v[j] = hyper.beta2 * v[j] + (1.0 - hyper.beta2) * g * g;
      theta[j] -= lr * (m[j] / c1) / (std::sqrt(v[j] / c2) + hyper.eps);
    }
  }
}

double ClipGlobalNorm(std::vector<std::vector<double>>& grads, double max_norm) {
  double sq = 0.0;
  for (const auto& g : grads)
    for (double x : g) sq += x * x;
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto& g : grads)
      for (double& x : g) x *= scale;
  }
  return norm;
}

void RoundToSinglePrecision(diff::ParameterStore& store, OptimizerState& state) {
  for (auto& p : store.all()) RoundSpan(p.value.values());
  for (auto& t : state.m) RoundSpan(t.values());
  for (auto& t : state.v) RoundSpan(t.values());
}

}  // namespace gcgat::trainer
