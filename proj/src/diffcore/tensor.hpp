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
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "common/error.hpp"

namespace gcgat::diff {

// Dense row-major array of doubles. Plain data: no gradient bookkeeping.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0)
      : shape_(std::move(shape)), data_(ElementCount(shape_), fill) {}

  Tensor(std::vector<std::size_t> shape, std::vector<double> values)
      : shape_(std::move(shape)), data_(std::move(values)) {
    Require(data_.size() == ElementCount(shape_), ErrorCode::kShapeMismatch,
            "tensor value count does not match shape");
  }

  static Tensor Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) {
    return Tensor({rows, cols}, fill);
  }

  static Tensor RowVector(std::vector<double> values) {
    const std::size_t n = values.size();
    return Tensor({1, n}, std::move(values));
  }

  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  // Matrix views; only meaningful for rank-2 tensors.
  std::size_t rows() const { return shape_.at(0); }
  std::size_t cols() const { return shape_.at(1); }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * shape_[1] + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * shape_[1] + c];
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }
  double* raw() noexcept { return data_.data(); }
  const double* raw() const noexcept { return data_.data(); }

  // Same values, new shape with the same element count.
  Tensor Reshaped(std::vector<std::size_t> shape) const {
    return Tensor(std::move(shape), data_);
  }

  bool operator==(const Tensor& other) const = default;

  static std::size_t ElementCount(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           std::multiplies<>());
  }

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

std::string ShapeString(const std::vector<std::size_t>& shape);

}  // namespace gcgat::diff
