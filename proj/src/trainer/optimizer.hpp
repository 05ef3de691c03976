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

// Adam with bias correction and global-norm gradient clipping.

#pragma once

#include <cstdint>
#include <vector>

#include "diffcore/params.hpp"
#include "diffcore/tensor.hpp"

namespace gcgat::trainer {

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First and second moments shaped like the parameters, plus the number of
// updates applied so far.
struct OptimizerState {
  std::vector<diff::Tensor> m;
  std::vector<diff::Tensor> v;
  std::int64_t step = 0;

  static OptimizerState Zeros(const diff::ParameterStore& store);
  bool operator==(const OptimizerState&) const = default;
};

// One bias-corrected Adam update of every trainable parameter, in fp64:
//   m = b1 m + (1 - b1) g,  v = b2 v + (1 - b2) g^2,
//   theta -= lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps).
// Increments state.step (t is the incremented value).
void AdamStep(diff::ParameterStore& store, OptimizerState& state,
              const std::vector<std::vector<double>>& grads, double lr, const AdamHyper& hyper);

// Rescales all gradients so their joint L2 norm is at most max_norm. Returns
// the norm before clipping. max_norm <= 0 disables clipping.
double ClipGlobalNorm(std::vector<std::vector<double>>& grads, double max_norm);

// Rounds parameters and moments to single precision, the checkpoint format.
void RoundToSinglePrecision(diff::ParameterStore& store, OptimizerState& state);

}  // namespace gcgat::trainer
