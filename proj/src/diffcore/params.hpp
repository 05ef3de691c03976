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
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "diffcore/tensor.hpp"
#include "diffcore/var.hpp"

namespace gcgat::diff {

struct Parameter {
  std::string name;
  Tensor value;
  bool trainable = true;
};

// Named parameters in registration order. The order is part of the checkpoint
// identity, so models must register deterministically.
class ParameterStore {
 public:
  std::size_t Add(std::string name, Tensor value, bool trainable = true);

  std::size_t size() const noexcept { return params_.size(); }
  Parameter& operator[](std::size_t i) { return params_[i]; }
  const Parameter& operator[](std::size_t i) const { return params_[i]; }
  std::optional<std::size_t> Find(const std::string& name) const;
  const Parameter& Get(const std::string& name) const;

  std::vector<Parameter>& all() noexcept { return params_; }
  const std::vector<Parameter>& all() const noexcept { return params_; }

  // Total number of scalar entries over trainable parameters.
  std::size_t TrainableCount() const;

  bool operator==(const ParameterStore& other) const;

 private:
  std::vector<Parameter> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

// A per-graph view of a parameter store. Each parameter becomes a leaf var the
// first time it is requested; gradients are read back after Backward().
class Binding {
 public:
  explicit Binding(const ParameterStore& store, bool track_gradients = true)
      : store_(&store), leaves_(store.size()), track_(track_gradients) {}

  Var Get(std::size_t index);

  // grads[i] += d(root)/d(param i) for every parameter touched by the graph.
  // `grads` must hold one correctly sized vector per parameter.
  void AccumulateGradients(std::vector<std::vector<double>>& grads) const;

 private:
  const ParameterStore* store_;
  std::vector<Var> leaves_;
  bool track_;
};

// Zero-initialized gradient buffers shaped like the store.
std::vector<std::vector<double>> ZeroGradients(const ParameterStore& store);

}  // namespace gcgat::diff
