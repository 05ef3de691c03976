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

// Dataset file: one JSON object per line with keys target, neighbors, graph,
// future, frame and meta. Doubles are printed in shortest round-trip form, so
// parse(serialize(s)) == s bit for bit.

#pragma once

#include <string>
#include <vector>

#include "scenekit/scene.hpp"

namespace gcgat::scene {

std::string SerializeScene(const Scene& scene);

// `line` is only used to label ParseError messages.
Scene ParseScene(const std::string& text, std::size_t line = 1);

void SaveDataset(const std::vector<Scene>& scenes, const std::string& path);
std::vector<Scene> LoadDataset(const std::string& path);

}  // namespace gcgat::scene
