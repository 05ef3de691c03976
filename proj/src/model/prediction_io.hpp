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

// Prediction files: one JSON object with pi [K], mu and b [K][f][2] and
// goal_weights [S][V_max], numbers in shortest round-trip form.

#pragma once

#include <string>

#include "model/gcgat_model.hpp"

namespace gcgat::model {

std::string PredictionToJson(const PredictionSet& pred);
// Throws ParseError naming the field on malformed input.
PredictionSet PredictionFromJson(const std::string& text);

void SavePrediction(const PredictionSet& pred, const std::string& path);
PredictionSet LoadPrediction(const std::string& path);

}  // namespace gcgat::model
