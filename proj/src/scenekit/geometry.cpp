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

#include "scenekit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

#include "common/error.hpp"

namespace gcgat::scene {

double WrapAngle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double r = std::fmod(angle, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  if (r > std::numbers::pi) r -= kTwoPi;
  return r;
}

std::vector<CenterlineSegment> CenterlineSegments(const LaneGraph& graph) {
  std::vector<CenterlineSegment> out;
  for (std::size_t n = 0; n < graph.nodes.size(); ++n) {
    const auto& poses = graph.nodes[n].poses;
    for (std::size_t j = 0; j + 1 < poses.size(); ++j) {
      out.push_back({{poses[j].x, poses[j].y}, {poses[j + 1].x, poses[j + 1].y},
                     n, n, j});
    }
    if (poses.size() == 1) {
      out.push_back({{poses[0].x, poses[0].y}, {poses[0].x, poses[0].y}, n, n, 0});
    }
    if (poses.empty()) continue;
    for (std::size_t s : graph.SuccessorIndices(n)) {
      const auto& next = graph.nodes[s].poses;
      if (next.empty()) continue;
      out.push_back({{poses.back().x, poses.back().y}, {next.front().x, next.front().y},
                     n, s, poses.size() - 1});
    }
  }
  return out;
}

double PointSegmentDistance(Point2 p, Point2 a, Point2 b, double* t) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double u = 0.0;
  if (len2 > 0.0) {
    u = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
    u = std::clamp(u, 0.0, 1.0);
  }
  if (t) *t = u;
  const double qx = a.x + u * dx - p.x;
  const double qy = a.y + u * dy - p.y;
  return std::sqrt(qx * qx + qy * qy);
}

NearestSegment FindNearestSegment(const std::vector<CenterlineSegment>& segments,
                                  Point2 p) {
  Require(!segments.empty(), ErrorCode::kDegenerateInput,
          "lane graph has no centerline segments");
  NearestSegment best{std::numeric_limits<double>::infinity(), 0, 0.0};
  for (std::size_t i = 0; i < segments.size(); ++i) {
    double t = 0.0;
    const double d = PointSegmentDistance(p, segments[i].a, segments[i].b, &t);
    if (d < best.distance) best = {d, i, t};
  }
  return best;
}

double CenterlineDistance(const std::vector<CenterlineSegment>& segments, Point2 p) {
  return FindNearestSegment(segments, p).distance;
}

std::vector<int> BranchLabels(const LaneGraph& graph) {
  const std::size_t n = graph.nodes.size();
  std::vector<std::vector<std::size_t>> preds(n);
  std::vector<std::vector<std::size_t>> succs(n);
  for (std::size_t i = 0; i < n; ++i) {
    succs[i] = graph.SuccessorIndices(i);
    for (std::size_t s : succs[i]) preds[s].push_back(i);
  }
  std::vector<int> label(n, -1);
  std::vector<bool> done(n, false);
  int next_label = 0;
  // Breadth-first from sources; a node opens a new chain when its predecessor
  // branches, and otherwise inherits the predecessor's chain.
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i)
    if (preds[i].empty()) queue.push_back(i);
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    if (done[i]) continue;
    done[i] = true;
    for (std::size_t s : succs[i]) {
      if (done[s]) continue;
      if (succs[i].size() >= 2) {
        label[s] = next_label++;
      } else if (preds[s].size() == 1) {
        label[s] = label[i];
      }
      queue.push_back(s);
    }
  }
  return label;
}

}  // namespace gcgat::scene
