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

// Training objective: winner-takes-all Laplace NLL + soft-target mode
// classification + minADE, with unit weights.
//
// Shapes follow the model outputs: mu and b are [K, 2f] with column 2t + d,
// pi is [1, K], and the ground truth is a [1, 2f] row.

#pragma once

#include <cstddef>
#include <vector>

#include "diffcore/var.hpp"
#include "scenekit/scene.hpp"

namespace gcgat::objectives {

inline constexpr double kProbabilityFloor = 1e-12;

// [1, 2f] row (x0, y0, x1, y1, ...). Throws HorizonMismatch when the path
// does not have `steps` points.
diff::Tensor GroundTruthRow(const scene::FuturePath& path, std::size_t steps);

// Per-mode mean Euclidean displacement, [K].
std::vector<double> ModeAde(const diff::Tensor& mu, const diff::Tensor& gt);

// argmin_k sum_t ||mu_kt - y_t||; ties go to the lowest index.
std::size_t WinnerMode(const diff::Tensor& mu, const diff::Tensor& gt);

// Mean over timesteps of sum_d [log(2 b) + |y - mu| / b] for mode m_star.
// Throws NonPositiveScale if any scale is <= 0.
diff::Var LaplaceNll(const diff::Var& mu, const diff::Var& b, const diff::Tensor& gt,
                     std::size_t m_star);

// softmax(-ADE_k / temperature) over modes.
std::vector<double> SoftTargets(const diff::Tensor& mu, const diff::Tensor& gt,
                                double temperature);

// Per-mode mean displacement as a [K, 1] differentiable column.
diff::Var ModeAdeVar(const diff::Var& mu, const diff::Tensor& gt);

// sum_k -target_k log(max(pi_k, 1e-12)) with targets = SoftTargets(mu); the
// targets are differentiable in mu.
diff::Var SoftTargetCrossEntropy(const diff::Var& pi, const diff::Var& mu,
                                 const diff::Tensor& gt, double temperature);

// min over modes of the mean displacement (the value, not the index).
diff::Var MinAdeLoss(const diff::Var& mu, const diff::Tensor& gt);

struct LossTerms {
  diff::Var l_reg;
  diff::Var l_cls;
  diff::Var l_ade;
  diff::Var total;
  std::size_t winner_mode = 0;
};

LossTerms TotalLoss(const diff::Var& pi, const diff::Var& mu, const diff::Var& b,
                    const diff::Tensor& gt, double temperature = 1.0);

// Batch-mean values of the loss terms.
struct LossBreakdown {
  double l_reg = 0.0;
  double l_cls = 0.0;
  double l_ade = 0.0;
  double total = 0.0;
  std::vector<std::size_t> winner_modes;  // one per scene
};

// Mean of per-scene terms; throws InvalidArgument on an empty batch.
LossBreakdown Summarize(const std::vector<LossTerms>& per_scene);

}  // namespace gcgat::objectives
