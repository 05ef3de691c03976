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

#include "config/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include "common/error.hpp"

namespace gcgat::config {

using nlohmann::json;

namespace {

class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    Require(j_.is_object(), ErrorCode::kConfig, "config section '" + name_ + "' must be an object");
  }

  template <typename T>
  void Read(const std::string& key, T& out) {
    known_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    bool ok;
    if constexpr (std::is_same_v<T, bool>) {
      ok = v.is_boolean();
    } else if constexpr (std::is_unsigned_v<T>) {
      ok = v.is_number_unsigned();
    } else if constexpr (std::is_integral_v<T>) {
      ok = v.is_number_integer();
    } else {
      ok = v.is_number();
    }
    Require(ok, ErrorCode::kConfig, "config key '" + Path(key) + "' has the wrong type");
    out = v.get<T>();
  }

  void ReadTopology(const std::string& key, scene::Topology& out) {
    known_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    auto t = v.is_string() ? scene::ParseTopology(v.get<std::string>()) : std::nullopt;
    Require(t.has_value(), ErrorCode::kConfig, "config key '" + Path(key) + "' is not a topology");
    out = *t;
  }

  // A number, or null for "none" (stored as 0).
  void ReadOptional(const std::string& key, double& out) {
    if (j_.contains(key) && j_.at(key).is_null()) {
      known_.insert(key);
      out = 0.0;
      return;
    }
    Read(key, out);
  }

  void Finish() const {
    for (const auto& [key, value] : j_.items())
      Require(known_.contains(key), ErrorCode::kConfig, "unknown config key '" + Path(key) + "'");
  }

 private:
  std::string Path(const std::string& key) const { return name_ + "." + key; }

  const json& j_;
  std::string name_;
  std::set<std::string> known_;
};

template <typename Cfg>
void Validated(const Cfg& cfg) {
  try {
    cfg.Validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
}

}  // namespace

json GenConfigToJson(const scene::GenConfig& c) {
  return {{"scene_topology", scene::TopologyName(c.scene_topology)},
          {"node_length", c.node_length},
          {"poses_per_node", c.poses_per_node},
          {"corridor_width", c.corridor_width},
          {"speed_min", c.speed_min},
          {"speed_max", c.speed_max},
          {"noise_std", c.noise_std},
          {"history_steps", c.history_steps},
          {"future_steps", c.future_steps},
          {"step_dt", c.step_dt},
          {"max_neighbors", c.max_neighbors},
          {"pedestrian_fraction", c.pedestrian_fraction},
          {"stopline_fraction", c.stopline_fraction},
          {"approach_nodes", c.approach_nodes},
          {"branch_nodes", c.branch_nodes}};
}

json ModelConfigToJson(const model::ModelConfig& c) {
  return {{"dim", c.dim},
          {"modes", c.modes},
          {"heads", c.heads},
          {"gat_layers", c.gat_layers},
          {"tau", c.tau},
          {"sigma_z", c.sigma_z},
          {"goal_samples", c.goal_samples},
          {"future_steps", c.future_steps},
          {"latent_dim", c.latent_dim},
          {"position_scale", c.position_scale},
          {"max_neighbors", c.max_neighbors},
          {"max_nodes", c.max_nodes},
          {"use_goal_proposals", c.ablation.use_goal_proposals},
          {"use_cross_attention", c.ablation.use_cross_attention}};
}

json TrainConfigToJson(const trainer::TrainConfig& c) {
  return {{"batch_size", c.batch_size},
          {"steps", c.steps},
          {"learning_rate", c.learning_rate},
          {"final_learning_rate", c.final_learning_rate},
          {"adam_beta1", c.adam_beta1},
          {"adam_beta2", c.adam_beta2},
          {"adam_eps", c.adam_eps},
          {"grad_clip_norm", c.grad_clip_norm},
          {"seed", c.seed},
          {"eval_every", c.eval_every},
          {"soft_target_temperature", c.soft_target_temperature},
          {"threads", c.threads}};
}

json AppConfigToJson(const AppConfig& c) {
  return {{"gen", GenConfigToJson(c.gen)},
          {"model", ModelConfigToJson(c.model)},
          {"train", TrainConfigToJson(c.train)}};
}

scene::GenConfig GenConfigFromJson(const json& j, const std::string& section) {
  scene::GenConfig c;
  Section s(j, section);
  s.ReadTopology("scene_topology", c.scene_topology);
  s.Read("node_length", c.node_length);
  s.Read("poses_per_node", c.poses_per_node);
  s.Read("corridor_width", c.corridor_width);
  s.Read("speed_min", c.speed_min);
  s.Read("speed_max", c.speed_max);
  s.Read("noise_std", c.noise_std);
  s.Read("history_steps", c.history_steps);
  s.Read("future_steps", c.future_steps);
  s.Read("step_dt", c.step_dt);
  s.Read("max_neighbors", c.max_neighbors);
  s.Read("pedestrian_fraction", c.pedestrian_fraction);
  s.Read("stopline_fraction", c.stopline_fraction);
  s.Read("approach_nodes", c.approach_nodes);
  s.Read("branch_nodes", c.branch_nodes);
  s.Finish();
  Validated(c);
  return c;
}

model::ModelConfig ModelConfigFromJson(const json& j, const std::string& section) {
  model::ModelConfig c;
  Section s(j, section);
  s.Read("dim", c.dim);
  s.Read("modes", c.modes);
  s.Read("heads", c.heads);
  s.Read("gat_layers", c.gat_layers);
  s.Read("tau", c.tau);
  s.Read("sigma_z", c.sigma_z);
  s.Read("goal_samples", c.goal_samples);
  s.Read("future_steps", c.future_steps);
  s.Read("latent_dim", c.latent_dim);
  s.Read("position_scale", c.position_scale);
  s.Read("max_neighbors", c.max_neighbors);
  s.Read("max_nodes", c.max_nodes);
  s.Read("use_goal_proposals", c.ablation.use_goal_proposals);
  s.Read("use_cross_attention", c.ablation.use_cross_attention);
  s.Finish();
  Validated(c);
  return c;
}

trainer::TrainConfig TrainConfigFromJson(const json& j, const std::string& section) {
  trainer::TrainConfig c;
  Section s(j, section);
  s.Read("batch_size", c.batch_size);
  s.Read("steps", c.steps);
  s.Read("learning_rate", c.learning_rate);
  s.Read("final_learning_rate", c.final_learning_rate);
  s.Read("adam_beta1", c.adam_beta1);
  s.Read("adam_beta2", c.adam_beta2);
  s.Read("adam_eps", c.adam_eps);
  s.ReadOptional("grad_clip_norm", c.grad_clip_norm);
  s.Read("seed", c.seed);
  s.Read("eval_every", c.eval_every);
  s.Read("soft_target_temperature", c.soft_target_temperature);
  s.Read("threads", c.threads);
  s.Finish();
  Validated(c);
  return c;
}

AppConfig ParseConfig(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    Fail(ErrorCode::kConfig, std::string("config is not valid JSON: ") + e.what());
  }
  AppConfig c;
  Require(doc.is_object(), ErrorCode::kConfig, "config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "gen") {
      c.gen = GenConfigFromJson(value);
    } else if (key == "model") {
      c.model = ModelConfigFromJson(value);
    } else if (key == "train") {
      c.train = TrainConfigFromJson(value);
    } else {
      Fail(ErrorCode::kConfig, "unknown config key '" + key + "'");
    }
  }
  return c;
}

AppConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  Require(in.good(), ErrorCode::kConfig, "cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str());
}

}  // namespace gcgat::config
