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

// Reverse-mode differentiation over rank-2 matrices.
//
// Every op allocates a graph node holding its forward value, the parents it
// was computed from and a closure that pushes the node's gradient into the
// parents. Nodes are numbered at creation, so a descending id order over the
// reachable set is a valid reverse topological order. A graph is owned by the
// Var handles pointing into it; distinct graphs share no state and may be
// built and differentiated on different threads.

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "diffcore/tensor.hpp"

namespace gcgat::diff {

struct Node {
  Tensor value;  // always rank 2
  std::vector<double> grad;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;
  std::uint64_t id = 0;
  bool requires_grad = false;

  std::size_t rows() const { return value.rows(); }
  std::size_t cols() const { return value.cols(); }

  std::vector<double>& EnsureGrad() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
    return grad;
  }
};

class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  bool valid() const noexcept { return node_ != nullptr; }
  std::size_t rows() const { return node_->rows(); }
  std::size_t cols() const { return node_->cols(); }
  std::size_t size() const { return node_->value.size(); }

  const Tensor& value() const { return node_->value; }
  double operator()(std::size_t r, std::size_t c) const {
    return node_->value(r, c);
  }
  // Scalar value of a 1x1 var.
  double item() const;

  bool requires_grad() const { return node_->requires_grad; }
  // Gradient after Backward(); zeros if nothing flowed into this node.
  std::vector<double> grad() const;

  Node& node() const { return *node_; }
  const std::shared_ptr<Node>& node_ptr() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

// Leaf constructors.
Var Constant(Tensor value);
Var Leaf(Tensor value, bool requires_grad = true);
Var Zeros(std::size_t rows, std::size_t cols);

// Seeds d(root)/d(root) = 1 for a 1x1 root and propagates to every node that
// requires a gradient.
void Backward(const Var& root);

// --- Linear algebra -------------------------------------------------------
Var MatMul(const Var& a, const Var& b);            // [m,k] x [k,n]
Var MatMulTransposed(const Var& a, const Var& b);  // [m,k] x [n,k]^T
Var Transpose(const Var& a);

// --- Elementwise and broadcasting ------------------------------------------
Var Add(const Var& a, const Var& b);
Var Sub(const Var& a, const Var& b);
Var Mul(const Var& a, const Var& b);
Var Div(const Var& a, const Var& b);
Var Scale(const Var& a, double factor);
Var AddScalar(const Var& a, double offset);
Var AddRow(const Var& a, const Var& row);     // a[r,c] + row[1,c]
Var SubRow(const Var& a, const Var& row);     // a[r,c] - row[1,c]
Var MulColumn(const Var& a, const Var& col);  // a[r,c] * col[r,1]
Var AddOuter(const Var& col, const Var& row); // col[r,1] + row[1,c] -> [r,c]
Var RepeatRows(const Var& row, std::size_t count);

Var LeakyRelu(const Var& a, double slope);
Var Tanh(const Var& a);
Var Sigmoid(const Var& a);
Var Softplus(const Var& a);
Var Exp(const Var& a);
Var Log(const Var& a);
// log(max(a, floor)); gradient is zero where a is below the floor.
Var LogClamped(const Var& a, double floor);
Var Abs(const Var& a);
Var Square(const Var& a);

// --- Structure ---------------------------------------------------------------
Var ConcatCols(std::span<const Var> parts);
Var ConcatRows(std::span<const Var> parts);
Var SliceRows(const Var& a, std::size_t begin, std::size_t count);
Var SliceCols(const Var& a, std::size_t begin, std::size_t count);
Var GatherRows(const Var& a, std::span<const std::size_t> indices);
// Places row i of `a` at row indices[i] of a zero [rows, a.cols] matrix.
Var ScatterRows(const Var& a, std::span<const std::size_t> indices,
                std::size_t rows);
Var Reshape(const Var& a, std::size_t rows, std::size_t cols);

// --- Reductions ----------------------------------------------------------------
Var Sum(const Var& a);       // -> [1,1]
Var Mean(const Var& a);      // -> [1,1]
Var SumRows(const Var& a);   // column sums -> [1,c]
Var SumCols(const Var& a);   // row sums -> [r,1]
Var RowNorms(const Var& a);  // Euclidean norm of each row -> [r,1]

// --- Normalization ----------------------------------------------------------------
// Row softmax; entries with mask == 0 get weight exactly 0, and a row with no
// unmasked entry is all zero. `mask` is [r,c] or a single [1,c] row broadcast
// over rows; an empty span means nothing is masked.
Var MaskedSoftmaxRows(const Var& a, std::span<const std::uint8_t> mask);
Var SoftmaxRows(const Var& a);
Var LayerNormRows(const Var& a, const Var& gamma, const Var& beta,
                  double eps = 1e-5);

// Fused GRU gating. `gx` = x W + b_x and `gh` = h U + b_h, both [B, 3H] laid
// out as [update | reset | candidate]; `h` is [B, H].
Var GruCell(const Var& gx, const Var& gh, const Var& h);

}  // namespace gcgat::diff
