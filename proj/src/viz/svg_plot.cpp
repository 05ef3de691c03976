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

#include "viz/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "common/error.hpp"
#include "scenekit/transform.hpp"

namespace gcgat::viz {

namespace {

constexpr double kPixelsPerMeter = 8.0;
constexpr double kMargin = 20.0;  // px

template <typename... Args>
std::string Printf(const char* fmt, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

class Canvas {
 public:
  void Include(scene::Point2 p) {
    min_x_ = std::min(min_x_, p.x);
    max_x_ = std::max(max_x_, p.x);
    min_y_ = std::min(min_y_, p.y);
    max_y_ = std::max(max_y_, p.y);
  }
  void Pad(double meters) {
    min_x_ -= meters;
    max_x_ += meters;
    min_y_ -= meters;
    max_y_ += meters;
  }
  double Width() const { return (max_x_ - min_x_) * kPixelsPerMeter + 2 * kMargin; }
  double Height() const { return (max_y_ - min_y_) * kPixelsPerMeter + 2 * kMargin; }
  // y grows upwards in the scene and downwards in SVG.
  std::string Xy(scene::Point2 p) const {
    return Printf("%.2f,%.2f", (p.x - min_x_) * kPixelsPerMeter + kMargin,
                       (max_y_ - p.y) * kPixelsPerMeter + kMargin);
  }
  std::string Polyline(const std::vector<scene::Point2>& pts, const std::string& cls,
                       double stroke_px = 0.0) const {
    std::string s = "<polyline class=\"" + cls + "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) s += (i ? " " : "") + Xy(pts[i]);
    s += "\"";
    if (stroke_px > 0.0) s += Printf(" stroke-width=\"%.2f\"", stroke_px);
    return s + "/>\n";
  }

 private:
  double min_x_ = std::numeric_limits<double>::infinity();
  double max_x_ = -std::numeric_limits<double>::infinity();
  double min_y_ = std::numeric_limits<double>::infinity();
  double max_y_ = -std::numeric_limits<double>::infinity();
};

std::vector<scene::Point2> ObservedPath(const scene::AgentTrack& track) {
  std::vector<scene::Point2> pts;
  for (std::size_t i = 0; i < track.states.size(); ++i)
    if (track.observed.empty() || track.observed[i])
      pts.push_back({track.states[i].x, track.states[i].y});
  return pts;
}

}  // namespace

std::string RenderSvg(const scene::Scene& input, const model::PredictionSet& pred) {
  Require(pred.modes() >= 1, ErrorCode::kInvalidArgument, "prediction has no modes");
  const scene::Scene s =
      input.frame == scene::Frame::kGlobal ? scene::ToAgentFrame(input) : input;
  if (s.future)
    Require(s.future->points.size() == pred.steps(), ErrorCode::kHorizonMismatch,
            "prediction has " + std::to_string(pred.steps()) + " steps, scene future has " +
                std::to_string(s.future->points.size()));

  const std::size_t best = static_cast<std::size_t>(
      std::max_element(pred.pi.begin(), pred.pi.end()) - pred.pi.begin());
  const scene::Point2 origin{s.target.current().x, s.target.current().y};
  auto mode_path = [&](std::size_t k) {
    std::vector<scene::Point2> pts{origin};
    for (std::size_t t = 0; t < pred.steps(); ++t) pts.push_back({pred.mu(k, t, 0), pred.mu(k, t, 1)});
    return pts;
  };

  Canvas canvas;
  std::vector<std::vector<scene::Point2>> lanes;
  for (const auto& node : s.graph.nodes) {
    std::vector<scene::Point2> pts;
    for (const auto& p : node.poses) pts.push_back({p.x, p.y});
    lanes.push_back(pts);
  }
  for (const auto& [from, to] : s.graph.successors) {
    const auto a = s.graph.IndexOf(from);
    const auto b = s.graph.IndexOf(to);
    if (a && b && !lanes[*a].empty() && !lanes[*b].empty())
      lanes.push_back({lanes[*a].back(), lanes[*b].front()});
  }
  for (const auto& lane : lanes)
    for (const auto& p : lane) canvas.Include(p);
  const auto history = ObservedPath(s.target);
  for (const auto& p : history) canvas.Include(p);
  std::vector<scene::Point2> gt;
  if (s.future) {
    gt.push_back(origin);
    gt.insert(gt.end(), s.future->points.begin(), s.future->points.end());
  }
  for (const auto& p : gt) canvas.Include(p);
  for (std::size_t k = 0; k < pred.modes(); ++k)
    for (const auto& p : mode_path(k)) canvas.Include(p);
  canvas.Pad(std::max(2.0, s.graph.corridor_width));

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << Printf(
             "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%.0f\" "
             "height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
             canvas.Width(), canvas.Height(), canvas.Width(), canvas.Height())
      << "<style>\n"
         "polyline { fill: none; stroke-linecap: round; stroke-linejoin: round; }\n"
         ".corridor { stroke: #ececec; }\n"
         ".centerline { stroke: #9a9a9a; stroke-width: 1; }\n"
         ".neighbor { stroke: #6a7fb5; stroke-width: 1.5; }\n"
         ".history { stroke: #000000; stroke-width: 2.5; }\n"
         ".ground-truth { stroke: #1a9a2a; stroke-width: 2.5; }\n"
         ".mode { stroke: #d62020; stroke-width: 1.5; }\n"
         ".ml-mode { stroke: #00b8d4; stroke-width: 2.5; }\n"
         ".uncertainty { fill: none; stroke: #00b8d4; stroke-width: 1; }\n"
         "</style>\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  svg << "<g id=\"corridor\">\n";
  for (const auto& lane : lanes)
    svg << canvas.Polyline(lane, "corridor", s.graph.corridor_width * kPixelsPerMeter);
  svg << "</g>\n<g id=\"centerlines\">\n";
  for (const auto& lane : lanes) svg << canvas.Polyline(lane, "centerline");
  svg << "</g>\n<g id=\"neighbors\">\n";
  for (const auto& n : s.neighbors) {
    const auto pts = ObservedPath(n);
    if (pts.size() >= 2) svg << canvas.Polyline(pts, "neighbor");
  }
  svg << "</g>\n<g id=\"history\">\n" << canvas.Polyline(history, "history");
  svg << "</g>\n<g id=\"ground-truth\">\n";
  if (!gt.empty()) svg << canvas.Polyline(gt, "ground-truth");
  svg << "</g>\n<g id=\"modes\">\n";
  for (std::size_t k = 0; k < pred.modes(); ++k)
    if (k != best) svg << canvas.Polyline(mode_path(k), "mode");
  svg << canvas.Polyline(mode_path(best), "ml-mode");
  svg << "</g>\n<g id=\"uncertainty\">\n";
  for (std::size_t t = 0; t < pred.steps(); ++t) {
    const double r = 0.5 * (pred.b(best, t, 0) + pred.b(best, t, 1)) * kPixelsPerMeter;
    const auto xy = canvas.Xy({pred.mu(best, t, 0), pred.mu(best, t, 1)});
    const auto comma = xy.find(',');
    svg << "<circle class=\"uncertainty\" cx=\"" << xy.substr(0, comma) << "\" cy=\""
        << xy.substr(comma + 1) << Printf("\" r=\"%.3f\"/>\n", r);
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

void SaveSvg(const scene::Scene& scene, const model::PredictionSet& pred, const std::string& path) {
  const std::string text = RenderSvg(scene, pred);
  std::ofstream out(path, std::ios::trunc);
  Require(out.good(), ErrorCode::kIo, "cannot write '" + path + "'");
  out << text;
  Require(out.good(), ErrorCode::kIo, "failed writing '" + path + "'");
}

}  // namespace gcgat::viz
