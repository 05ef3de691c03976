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

#include "scenekit/serialize.hpp"

#include <fstream>

#include "common/error.hpp"
#include "json.hpp"

namespace gcgat::scene {

using nlohmann::json;

namespace {

json TrackToJson(const AgentTrack& t) {
  json states = json::array();
  for (const auto& s : t.states)
    states.push_back({s.x, s.y, s.v, s.a, s.w, s.is_pedestrian ? 1 : 0});
  json observed = json::array();
  for (bool o : t.observed) observed.push_back(o ? 1 : 0);
  return {{"id", t.id}, {"states", states}, {"observed", observed}};
}

json GraphToJson(const LaneGraph& g) {
  json nodes = json::array();
  for (const auto& n : g.nodes) {
    json poses = json::array();
    for (const auto& p : n.poses)
      poses.push_back({p.x, p.y, p.theta, p.on_stop_or_crosswalk ? 1 : 0});
    nodes.push_back({{"id", n.node_id}, {"poses", poses}});
  }
  json edges = json::array();
  for (const auto& [from, to] : g.successors) edges.push_back({from, to});
  return {{"nodes", nodes}, {"successors", edges}, {"corridor_width", g.corridor_width}};
}

// Walks a parsed record while remembering where it is, so every failure names
// the offending field.
class Reader {
 public:
  Reader(const json& node, std::string path, std::size_t line)
      : node_(node), path_(std::move(path)), line_(line) {}

  [[noreturn]] void Fail(const std::string& what) const {
    throw ParseError(line_, path_, what);
  }

  Reader Field(const char* key) const {
    if (!node_.is_object()) Fail("expected an object");
    auto it = node_.find(key);
    const std::string child = path_.empty() ? key : path_ + "." + key;
    if (it == node_.end()) throw ParseError(line_, child, "missing field");
    return Reader(*it, child, line_);
  }

  Reader At(std::size_t i) const {
    return Reader(node_.at(i), path_ + "[" + std::to_string(i) + "]", line_);
  }

  std::size_t Size() const {
    if (!node_.is_array()) Fail("expected an array");
    return node_.size();
  }

  bool IsNull() const { return node_.is_null(); }

  double Number() const {
    if (!node_.is_number()) Fail("expected a number");
    return node_.get<double>();
  }

  std::int64_t Integer() const {
    if (!node_.is_number_integer()) Fail("expected an integer");
    return node_.get<std::int64_t>();
  }

  std::uint64_t Unsigned() const {
    if (!node_.is_number_unsigned()) Fail("expected a non-negative integer");
    return node_.get<std::uint64_t>();
  }

  bool Flag() const {
    if (node_.is_boolean()) return node_.get<bool>();
    const std::int64_t v = Integer();
    if (v != 0 && v != 1) Fail("expected 0 or 1");
    return v == 1;
  }

  std::string String() const {
    if (!node_.is_string()) Fail("expected a string");
    return node_.get<std::string>();
  }

  // Fixed-length numeric tuple.
  void Tuple(std::size_t n) const {
    if (Size() != n) Fail("expected " + std::to_string(n) + " entries");
  }

 private:
  const json& node_;
  std::string path_;
  std::size_t line_;
};

AgentTrack ParseTrack(const Reader& r) {
  AgentTrack t;
  t.id = r.Field("id").Integer();
  const Reader states = r.Field("states");
  for (std::size_t i = 0; i < states.Size(); ++i) {
    const Reader s = states.At(i);
    s.Tuple(6);
    t.states.push_back({s.At(0).Number(), s.At(1).Number(), s.At(2).Number(),
                        s.At(3).Number(), s.At(4).Number(), s.At(5).Flag()});
  }
  const Reader observed = r.Field("observed");
  if (observed.Size() != t.states.size()) observed.Fail("length differs from states");
  for (std::size_t i = 0; i < observed.Size(); ++i)
    t.observed.push_back(observed.At(i).Flag());
  return t;
}

LaneGraph ParseGraph(const Reader& r) {
  LaneGraph g;
  const Reader nodes = r.Field("nodes");
  for (std::size_t i = 0; i < nodes.Size(); ++i) {
    const Reader n = nodes.At(i);
    LaneNode node;
    node.node_id = n.Field("id").Integer();
    const Reader poses = n.Field("poses");
    for (std::size_t j = 0; j < poses.Size(); ++j) {
      const Reader p = poses.At(j);
      p.Tuple(4);
      node.poses.push_back(
          {p.At(0).Number(), p.At(1).Number(), p.At(2).Number(), p.At(3).Flag()});
    }
    g.nodes.push_back(std::move(node));
  }
  const Reader edges = r.Field("successors");
  for (std::size_t i = 0; i < edges.Size(); ++i) {
    const Reader e = edges.At(i);
    e.Tuple(2);
    g.successors.emplace_back(e.At(0).Integer(), e.At(1).Integer());
  }
  g.corridor_width = r.Field("corridor_width").Number();
  return g;
}

}  // namespace

std::string SerializeScene(const Scene& scene) {
  json neighbors = json::array();
  for (const auto& n : scene.neighbors) neighbors.push_back(TrackToJson(n));
  json future = nullptr;
  if (scene.future) {
    future = json::array();
    for (const auto& p : scene.future->points) future.push_back({p.x, p.y});
  }
  const json record = {
      {"target", TrackToJson(scene.target)},
      {"neighbors", neighbors},
      {"graph", GraphToJson(scene.graph)},
      {"future", future},
      {"frame", FrameName(scene.frame)},
      {"meta",
       {{"seed", scene.meta.seed}, {"topology", TopologyName(scene.meta.topology)}}},
  };
  return record.dump();
}

Scene ParseScene(const std::string& text, std::size_t line) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(line, "", std::string("malformed record: ") + e.what());
  }
  const Reader root(doc, "", line);
  Scene scene;
  scene.target = ParseTrack(root.Field("target"));
  const Reader neighbors = root.Field("neighbors");
  for (std::size_t i = 0; i < neighbors.Size(); ++i)
    scene.neighbors.push_back(ParseTrack(neighbors.At(i)));
  scene.graph = ParseGraph(root.Field("graph"));
  const Reader future = root.Field("future");
  if (!future.IsNull()) {
    FuturePath path;
    for (std::size_t i = 0; i < future.Size(); ++i) {
      const Reader p = future.At(i);
      p.Tuple(2);
      path.points.push_back({p.At(0).Number(), p.At(1).Number()});
    }
    scene.future = std::move(path);
  }
  const Reader frame = root.Field("frame");
  const auto parsed_frame = ParseFrame(frame.String());
  if (!parsed_frame) frame.Fail("unknown frame");
  scene.frame = *parsed_frame;
  const Reader meta = root.Field("meta");
  scene.meta.seed = meta.Field("seed").Unsigned();
  const Reader topology = meta.Field("topology");
  const auto parsed_topology = ParseTopology(topology.String());
  if (!parsed_topology) topology.Fail("unknown topology");
  scene.meta.topology = *parsed_topology;
  try {
    ValidateScene(scene);
  } catch (const Error& e) {
    throw ParseError(line, "", e.what());
  }
  return scene;
}

void SaveDataset(const std::vector<Scene>& scenes, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(out.good(), ErrorCode::kIo, "cannot open " + path + " for writing");
  for (const auto& s : scenes) out << SerializeScene(s) << '\n';
  out.flush();
  Require(out.good(), ErrorCode::kIo, "failed writing " + path);
}

std::vector<Scene> LoadDataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Require(in.good(), ErrorCode::kIo, "cannot open " + path);
  std::vector<Scene> scenes;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    scenes.push_back(ParseScene(text, line));
  }
  return scenes;
}

}  // namespace gcgat::scene
