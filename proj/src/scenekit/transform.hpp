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

#include "scenekit/scene.hpp"

namespace gcgat::scene {

// p -> R(angle) p + (tx, ty) on every position, heading += angle. Speeds,
// accelerations and yaw rates are frame-independent and left untouched.
// Unobserved (zero) agent states stay zero.
Scene ApplyRigidTransform(const Scene& scene, double angle, double tx, double ty);

// Moves a global-frame scene into the frame where the target's current pose
// is the origin with zero heading.
Scene ToAgentFrame(const Scene& scene);

}  // namespace gcgat::scene
