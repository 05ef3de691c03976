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

#include "scenekit/transform.hpp"

#include <cmath>

#include "common/error.hpp"
#include "scenekit/geometry.hpp"

namespace gcgat::scene {

namespace {

// Applies p -> R(angle) (p - pivot) + offset.
Scene MapScene(const Scene& in, double angle, Point2 pivot, Point2 offset) {
  Scene out = in;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  auto map = [&](double& x, double& y) {
    const double dx = x - pivot.x;
    const double dy = y - pivot.y;
    x = c * dx - s * dy + offset.x;
    y = s * dx + c * dy + offset.y;
  };
  auto map_track = [&](AgentTrack& t) {
    for (std::size_t i = 0; i < t.states.size(); ++i)
      if (t.observed[i]) map(t.states[i].x, t.states[i].y);
  };
  map_track(out.target);
  for (auto& n : out.neighbors) map_track(n);
  for (auto& node : out.graph.nodes) {
    for (auto& p : node.poses) {
      map(p.x, p.y);
      p.theta = WrapAngle(p.theta + angle);
    }
  }
  if (out.future) {
    for (auto& p : out.future->points) map(p.x, p.y);
  }
  return out;
}

}  // namespace

Scene ApplyRigidTransform(const Scene& scene, double angle, double tx, double ty) {
  return MapScene(scene, angle, {0.0, 0.0}, {tx, ty});
}

Scene ToAgentFrame(const Scene& scene) {
  Require(scene.frame == Frame::kGlobal, ErrorCode::kInvalidArgument,
          "scene is already in the target-centric frame");
  const double heading = TargetHeading(scene);
  const auto& now = scene.target.current();
  Scene out = MapScene(scene, -heading, {now.x, now.y}, {0.0, 0.0});
  out.frame = Frame::kTargetCentric;
  return out;
}

}  // namespace gcgat::scene
