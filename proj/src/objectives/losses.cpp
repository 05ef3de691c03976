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

#include "objectives/losses.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace gcgat::objectives {

using diff::Tensor;
using diff::Var;

namespace {

void CheckShapes(const Tensor& mu, const Tensor& gt) {
  Require(gt.rank() == 2 && gt.rows() == 1 && mu.rank() == 2 && mu.cols() == gt.cols() &&
              gt.cols() % 2 == 0 && gt.cols() > 0,
          ErrorCode::kHorizonMismatch, "prediction and ground truth horizons differ");
}

// Row k: per-timestep displacement sums.
std::vector<double> ModeDisplacementSums(const Tensor& mu, const Tensor& gt) {
  CheckShapes(mu, gt);
  const std::size_t steps = gt.cols() / 2;
  std::vector<double> out(mu.rows(), 0.0);
  for (std::size_t k = 0; k < mu.rows(); ++k)
    for (std::size_t t = 0; t < steps; ++t)
      out[k] += std::hypot(mu(k, 2 * t) - gt(0, 2 * t), mu(k, 2 * t + 1) - gt(0, 2 * t + 1));
  return out;
}

}  // namespace

Tensor GroundTruthRow(const scene::FuturePath& path, std::size_t steps) {
  Require(path.points.size() == steps, ErrorCode::kHorizonMismatch,
          "ground truth has " + std::to_string(path.points.size()) +
              " points, model horizon is " + std::to_string(steps));
  Tensor row = Tensor::Matrix(1, 2 * steps);
  for (std::size_t t = 0; t < steps; ++t) {
    row(0, 2 * t) = path.points[t].x;
    row(0, 2 * t + 1) = path.points[t].y;
  }
  return row;
}

std::vector<double> ModeAde(const Tensor& mu, const Tensor& gt) {
  auto sums = ModeDisplacementSums(mu, gt);
  const double steps = static_cast<double>(gt.cols() / 2);
  for (double& s : sums) s /= steps;
  return sums;
}

std::size_t WinnerMode(const Tensor& mu, const Tensor& gt) {
  const auto sums = ModeDisplacementSums(mu, gt);
  return static_cast<std::size_t>(std::min_element(sums.begin(), sums.end()) - sums.begin());
}

Var LaplaceNll(const Var& mu, const Var& b, const Tensor& gt, std::size_t m_star) {
  CheckShapes(mu.value(), gt);
  Require(b.rows() == mu.rows() && b.cols() == mu.cols(), ErrorCode::kShapeMismatch,
          "scale and location shapes differ");
  Require(m_star < mu.rows(), ErrorCode::kIndexOutOfRange, "winner mode out of range");
  for (double v : b.value().values())
    Require(v > 0.0, ErrorCode::kNonPositiveScale, "Laplace scale must be positive");
  const Var mu_m = diff::SliceRows(mu, m_star, 1);
  const Var b_m = diff::SliceRows(b, m_star, 1);
  const Var residual = diff::Abs(diff::Sub(diff::Constant(gt), mu_m));
  const Var per_dim = diff::Add(diff::Log(diff::Scale(b_m, 2.0)), diff::Div(residual, b_m));
  return diff::Scale(diff::Sum(per_dim), 2.0 / static_cast<double>(gt.cols()));
}

std::vector<double> SoftTargets(const Tensor& mu, const Tensor& gt, double temperature) {
  Require(temperature > 0.0, ErrorCode::kInvalidArgument, "soft-target temperature must be > 0");
  const auto ade = ModeAde(mu, gt);
  const double best = *std::min_element(ade.begin(), ade.end());
  std::vector<double> w(ade.size());
  double z = 0.0;
  for (std::size_t k = 0; k < ade.size(); ++k) z += w[k] = std::exp(-(ade[k] - best) / temperature);
  for (double& v : w) v /= z;
  return w;
}

Var ModeAdeVar(const Var& mu, const Tensor& gt) {
  CheckShapes(mu.value(), gt);
  const std::size_t modes = mu.rows();
  const std::size_t steps = gt.cols() / 2;
  const Var delta = diff::SubRow(mu, diff::Constant(gt));
  const Var dist = diff::Reshape(diff::RowNorms(diff::Reshape(delta, modes * steps, 2)), modes, steps);
  return diff::Scale(diff::SumCols(dist), 1.0 / static_cast<double>(steps));
}

Var SoftTargetCrossEntropy(const Var& pi, const Var& mu, const Tensor& gt, double temperature) {
  Require(temperature > 0.0, ErrorCode::kInvalidArgument, "soft-target temperature must be > 0");
  Require(pi.rows() == 1 && pi.cols() == mu.rows(), ErrorCode::kShapeMismatch,
          "pi must be [1, K]");
  const Var targets =
      diff::SoftmaxRows(diff::Scale(diff::Transpose(ModeAdeVar(mu, gt)), -1.0 / temperature));
  return diff::Scale(diff::Sum(diff::Mul(targets, diff::LogClamped(pi, kProbabilityFloor))), -1.0);
}

Var MinAdeLoss(const Var& mu, const Tensor& gt) {
  const std::size_t best = WinnerMode(mu.value(), gt);
  const std::size_t steps = gt.cols() / 2;
  const Var delta = diff::Sub(diff::SliceRows(mu, best, 1), diff::Constant(gt));
  return diff::Scale(diff::Sum(diff::RowNorms(diff::Reshape(delta, steps, 2))),
                     1.0 / static_cast<double>(steps));
}

LossTerms TotalLoss(const Var& pi, const Var& mu, const Var& b, const Tensor& gt,
                    double temperature) {
  LossTerms t;
  t.winner_mode = WinnerMode(mu.value(), gt);
  t.l_reg = LaplaceNll(mu, b, gt, t.winner_mode);
  t.l_cls = SoftTargetCrossEntropy(pi, mu, gt, temperature);
  t.l_ade = MinAdeLoss(mu, gt);
  t.total = diff::Add(diff::Add(t.l_reg, t.l_cls), t.l_ade);
  return t;
}

LossBreakdown Summarize(const std::vector<LossTerms>& per_scene) {
  Require(!per_scene.empty(), ErrorCode::kInvalidArgument, "empty batch");
  LossBreakdown out;
  for (const auto& t : per_scene) {
    out.l_reg += t.l_reg.item();
    out.l_cls += t.l_cls.item();
    out.l_ade += t.l_ade.item();
    out.total += t.total.item();
    out.winner_modes.push_back(t.winner_mode);
  }
  const double n = static_cast<double>(per_scene.size());
  out.l_reg /= n;
  out.l_cls /= n;
  out.l_ade /= n;
  out.total /= n;
  return out;
}

}  // namespace gcgat::objectives
