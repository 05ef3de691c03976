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

// JSON form of the generator, model and training configs. Omitted keys keep
// their defaults; unknown keys and ill-typed values raise kConfig errors that
// name the key.

#pragma once

#include <string>

#include "json.hpp"
#include "model/model_config.hpp"
#include "scenekit/generator.hpp"
#include "trainer/trainer.hpp"

namespace gcgat::config {

struct AppConfig {
  scene::GenConfig gen;
  model::ModelConfig model;
  trainer::TrainConfig train;
  bool operator==(const AppConfig&) const = default;
};

nlohmann::json GenConfigToJson(const scene::GenConfig& cfg);
nlohmann::json ModelConfigToJson(const model::ModelConfig& cfg);
nlohmann::json TrainConfigToJson(const trainer::TrainConfig& cfg);
nlohmann::json AppConfigToJson(const AppConfig& cfg);

// `section` prefixes key names in error messages. Results are validated.
scene::GenConfig GenConfigFromJson(const nlohmann::json& j, const std::string& section = "gen");
model::ModelConfig ModelConfigFromJson(const nlohmann::json& j,
                                       const std::string& section = "model");
trainer::TrainConfig TrainConfigFromJson(const nlohmann::json& j,
                                         const std::string& section = "train");

// Top-level object with optional "gen", "model" and "train" sections.
AppConfig ParseConfig(const std::string& text);
AppConfig LoadConfig(const std::string& path);

}  // namespace gcgat::config
