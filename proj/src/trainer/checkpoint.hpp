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

// Checkpoint files: a magic line, a one-line JSON header (format version,
// model config, training seed and step, manifest of name/shape/offset), then
// the little-endian float32 payload of every manifest entry in order.

#pragma once

#include <cstdint>
#include <string>

#include "diffcore/params.hpp"
#include "model/gcgat_model.hpp"
#include "trainer/optimizer.hpp"

namespace gcgat::trainer {

inline constexpr std::int64_t kCheckpointVersion = 1;

struct Checkpoint {
  std::int64_t format_version = kCheckpointVersion;
  model::ModelConfig model_config;
  diff::ParameterStore params;
  OptimizerState optimizer;
  std::uint64_t seed = 0;  // training seed; with optimizer.step it fixes every stream
  bool operator==(const Checkpoint&) const = default;
};

Checkpoint MakeCheckpoint(const model::GcgatModel& model, const OptimizerState& state,
                          std::uint64_t seed);

// Builds the model of the checkpoint's config and installs its parameters.
// Throws FormatError when names or shapes differ from that model.
model::GcgatModel RestoreModel(const Checkpoint& ckpt);

void SaveCheckpoint(const Checkpoint& ckpt, const std::string& path);
// Throws FormatError naming the offending section and VersionMismatch.
Checkpoint LoadCheckpoint(const std::string& path);

}  // namespace gcgat::trainer
