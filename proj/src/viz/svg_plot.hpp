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

// SVG rendering of one scene and its prediction in the target-centric frame:
// drivable corridor (light fill), lane centerlines (grey), target history
// (black), ground truth (green), predicted modes (red) and the most likely
// mode (cyan, class "ml-mode") with one uncertainty circle per point whose
// radius is the mean of the two Laplace scales.

#pragma once

#include <string>

#include "model/gcgat_model.hpp"
#include "scenekit/scene.hpp"

namespace gcgat::viz {

// Throws HorizonMismatch when the scene's future and the prediction differ in
// length, and InvalidArgument for a prediction without modes.
std::string RenderSvg(const scene::Scene& scene, const model::PredictionSet& pred);

void SaveSvg(const scene::Scene& scene, const model::PredictionSet& pred, const std::string& path);

}  // namespace gcgat::viz
