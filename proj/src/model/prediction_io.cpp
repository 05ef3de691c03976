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

#include "model/prediction_io.hpp"

#include <fstream>
#include <sstream>

#include "common/error.hpp"
#include "json.hpp"

namespace gcgat::model {

using nlohmann::json;

namespace {

json Trajectories(const diff::Tensor& t) {
  json modes = json::array();
  for (std::size_t k = 0; k < t.dim(0); ++k) {
    json points = json::array();
    for (std::size_t s = 0; s < t.dim(1); ++s) points.push_back({t(k, s, 0), t(k, s, 1)});
    modes.push_back(std::move(points));
  }
  return modes;
}

diff::Tensor ReadTrajectories(const json& j, const std::string& field, std::size_t modes) {
  if (!j.is_array() || j.size() != modes) throw ParseError(1, field, "expected one entry per mode");
  const std::size_t steps = modes ? j[0].size() : 0;
  diff::Tensor t({modes, steps, 2});
  for (std::size_t k = 0; k < modes; ++k) {
    const std::string path = field + "[" + std::to_string(k) + "]";
    if (!j[k].is_array() || j[k].size() != steps)
      throw ParseError(1, path, "modes must have equal lengths");
    for (std::size_t s = 0; s < steps; ++s) {
      const json& p = j[k][s];
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        throw ParseError(1, path + "[" + std::to_string(s) + "]", "expected [x, y]");
      t(k, s, 0) = p[0].get<double>();
      t(k, s, 1) = p[1].get<double>();
    }
  }
  return t;
}

}  // namespace

std::string PredictionToJson(const PredictionSet& pred) {
  json gw = json::array();
  if (pred.goal_weights.rank() == 2) {
    for (std::size_t r = 0; r < pred.goal_weights.rows(); ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < pred.goal_weights.cols(); ++c)
        row.push_back(pred.goal_weights(r, c));
      gw.push_back(std::move(row));
    }
  }
  const json j = {{"pi", pred.pi},
                  {"mu", Trajectories(pred.mu)},
                  {"b", Trajectories(pred.b)},
                  {"goal_weights", gw}};
  return j.dump();
}

PredictionSet PredictionFromJson(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(1, "", e.what());
  }
  if (!j.is_object()) throw ParseError(1, "", "expected an object");
  for (const char* key : {"pi", "mu", "b", "goal_weights"})
    if (!j.contains(key)) throw ParseError(1, key, "missing");
  PredictionSet p;
  if (!j["pi"].is_array()) throw ParseError(1, "pi", "expected an array");
  for (const auto& x : j["pi"]) {
    if (!x.is_number()) throw ParseError(1, "pi", "expected numbers");
    p.pi.push_back(x.get<double>());
  }
  p.mu = ReadTrajectories(j["mu"], "mu", p.pi.size());
  p.b = ReadTrajectories(j["b"], "b", p.pi.size());
  if (p.b.shape() != p.mu.shape()) throw ParseError(1, "b", "shape differs from mu");
  const json& gw = j["goal_weights"];
  if (!gw.is_array()) throw ParseError(1, "goal_weights", "expected an array");
  const std::size_t cols = gw.empty() ? 0 : gw[0].size();
  p.goal_weights = diff::Tensor::Matrix(gw.size(), cols);
  for (std::size_t r = 0; r < gw.size(); ++r) {
    if (!gw[r].is_array() || gw[r].size() != cols)
      throw ParseError(1, "goal_weights", "rows must have equal lengths");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!gw[r][c].is_number()) throw ParseError(1, "goal_weights", "expected numbers");
      p.goal_weights(r, c) = gw[r][c].get<double>();
    }
  }
  return p;
}

void SavePrediction(const PredictionSet& pred, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  Require(out.good(), ErrorCode::kIo, "cannot write prediction '" + path + "'");
  out << PredictionToJson(pred) << '\n';
  Require(out.good(), ErrorCode::kIo, "failed writing prediction '" + path + "'");
}

PredictionSet LoadPrediction(const std::string& path) {
  std::ifstream in(path);
  Require(in.good(), ErrorCode::kIo, "cannot read prediction '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return PredictionFromJson(ss.str());
}

}  // namespace gcgat::model
