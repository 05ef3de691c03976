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
#include <vector>

#include "scenekit/scene.hpp"

namespace gcgat::scene {

double WrapAngle(double angle);  // into (-pi, pi]

// A piece of lane centerline: either between consecutive poses of one node,
// or a connector from a node's last pose to a successor's first pose.
struct CenterlineSegment {
  Point2 a;
  Point2 b;
  std::size_t from_node = 0;  // node index owning `a`
  std::size_t to_node = 0;    // node index owning `b`
  std::size_t pose = 0;       // index of `a` within from_node
};

std::vector<CenterlineSegment> CenterlineSegments(const LaneGraph& graph);

// Distance from p to segment [a, b]; `t` receives the projection parameter
// clamped to [0, 1].
double PointSegmentDistance(Point2 p, Point2 a, Point2 b, double* t = nullptr);

struct NearestSegment {
  double distance = 0.0;
  std::size_t segment = 0;
  double t = 0.0;
};

// Nearest centerline segment to p (first one on ties). `segments` must be
// non-empty.
NearestSegment FindNearestSegment(const std::vector<CenterlineSegment>& segments,
                                  Point2 p);

double CenterlineDistance(const std::vector<CenterlineSegment>& segments, Point2 p);

// Per node index: the id of the successor chain the node belongs to, counted
// from the branching node that starts it; -1 for nodes not downstream of any
// node with two or more successors.
std::vector<int> BranchLabels(const LaneGraph& graph);

}  // namespace gcgat::scene
