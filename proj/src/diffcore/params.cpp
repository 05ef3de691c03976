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

#include "diffcore/params.hpp"

namespace gcgat::diff {

std::size_t ParameterStore::Add(std::string name, Tensor value, bool trainable) {
  Require(!index_.contains(name), ErrorCode::kInvalidArgument,
          "duplicate parameter name '" + name + "'");
  Require(value.rank() == 2, ErrorCode::kShapeMismatch,
          "parameter '" + name + "' must be rank 2");
  const std::size_t id = params_.size();
  index_.emplace(name, id);
  params_.push_back({std::move(name), std::move(value), trainable});
  return id;
}

std::optional<std::size_t> ParameterStore::Find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const Parameter& ParameterStore::Get(const std::string& name) const {
  auto id = Find(name);
  Require(id.has_value(), ErrorCode::kInvalidArgument,
          "unknown parameter '" + name + "'");
  return params_[*id];
}

std::size_t ParameterStore::TrainableCount() const {
  std::size_t n = 0;
  for (const auto& p : params_)
    if (p.trainable) n += p.value.size();
  return n;
}

bool ParameterStore::operator==(const ParameterStore& other) const {
  if (params_.size() != other.params_.size()) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto& a = params_[i];
    const auto& b = other.params_[i];
    if (a.name != b.name || a.trainable != b.trainable || !(a.value == b.value))
      return false;
  }
  return true;
}

Var Binding::Get(std::size_t index) {
  Var& leaf = leaves_.at(index);
  if (!leaf.valid()) {
    const Parameter& p = (*store_)[index];
    leaf = Leaf(p.value, track_ && p.trainable);
  }
  return leaf;
}

void Binding::AccumulateGradients(std::vector<std::vector<double>>& grads) const {
  Require(grads.size() == leaves_.size(), ErrorCode::kShapeMismatch,
          "gradient buffer count does not match parameter count");
  for (std::size_t i = 0; i < leaves_.size(); ++i) {
    if (!leaves_[i].valid()) continue;
    const Node& n = leaves_[i].node();
    if (n.grad.size() != n.value.size()) continue;
    auto& dst = grads[i];
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += n.grad[j];
  }
}

std::vector<std::vector<double>> ZeroGradients(const ParameterStore& store) {
  std::vector<std::vector<double>> grads;
  grads.reserve(store.size());
  for (const auto& p : store.all()) grads.emplace_back(p.value.size(), 0.0);
  return grads;
}

}  // namespace gcgat::diff
