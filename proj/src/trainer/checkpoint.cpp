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

#include "trainer/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <iterator>
#include <sstream>

#include "common/error.hpp"
#include "config/config_io.hpp"
#include "json.hpp"

namespace gcgat::trainer {

using nlohmann::json;

namespace {

constexpr char kMagic[] = "GCGAT-CHECKPOINT";

[[noreturn]] void FormatFail(const std::string& section, const std::string& what) {
  Fail(ErrorCode::kFormat, "checkpoint section '" + section + "': " + what);
}

// Manifest order: parameters, then first moments, then second moments.
std::vector<std::pair<std::string, const diff::Tensor*>> Entries(const Checkpoint& c) {
  std::vector<std::pair<std::string, const diff::Tensor*>> e;
  for (const auto& p : c.params.all()) e.emplace_back("param/" + p.name, &p.value);
  for (std::size_t i = 0; i < c.params.size(); ++i)
    e.emplace_back("adam.m/" + c.params[i].name, &c.optimizer.m.at(i));
  for (std::size_t i = 0; i < c.params.size(); ++i)
    e.emplace_back("adam.v/" + c.params[i].name, &c.optimizer.v.at(i));
  return e;
}

}  // namespace

Checkpoint MakeCheckpoint(const model::GcgatModel& model, const OptimizerState& state,
                          std::uint64_t seed) {
  Checkpoint c;
  c.model_config = model.config();
  c.params = model.params();
  c.optimizer = state;
  c.seed = seed;
  return c;
}

model::GcgatModel RestoreModel(const Checkpoint& ckpt) {
  auto model = model::GcgatModel::Create(ckpt.model_config, 0);
  auto& store = model.params();
  if (store.size() != ckpt.params.size())
    FormatFail("manifest", "parameter count differs from the configured model");
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto& src = ckpt.params[i];
    if (src.name != store[i].name || src.value.shape() != store[i].value.shape())
      FormatFail("manifest", "parameter '" + src.name + "' does not match the configured model");
    store[i].value = src.value;
  }
  return model;
}

void SaveCheckpoint(const Checkpoint& ckpt, const std::string& path) {
  json manifest = json::array();
  std::size_t offset = 0;
  const auto entries = Entries(ckpt);
  for (const auto& [name, t] : entries) {
    manifest.push_back({{"name", name}, {"shape", t->shape()}, {"offset", offset}});
    offset += t->size();
  }
  const json header = {{"format_version", ckpt.format_version},
                       {"model_config", config::ModelConfigToJson(ckpt.model_config)},
                       {"seed", ckpt.seed},
                       {"step", ckpt.optimizer.step},
                       {"payload_values", offset},
                       {"manifest", manifest}};
  std::string bytes;
  bytes.reserve(offset * 4);
  for (const auto& [name, t] : entries) {
    for (double x : t->values()) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(x));
      for (int k = 0; k < 4; ++k) bytes.push_back(static_cast<char>((bits >> (8 * k)) & 0xffu));
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(out.good(), ErrorCode::kIo, "cannot write checkpoint '" + path + "'");
  out << kMagic << '\n' << header.dump() << '\n';
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  Require(out.good(), ErrorCode::kIo, "failed writing checkpoint '" + path + "'");
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Require(in.good(), ErrorCode::kIo, "cannot read checkpoint '" + path + "'");
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  const std::size_t magic_end = data.find('\n');
  if (magic_end == std::string::npos || data.compare(0, magic_end, kMagic) != 0)
    FormatFail("magic", "not a checkpoint file");
  const std::size_t header_end = data.find('\n', magic_end + 1);
  if (header_end == std::string::npos) FormatFail("header", "truncated");
  json header;
  try {
    header = json::parse(data.substr(magic_end + 1, header_end - magic_end - 1));
  } catch (const json::exception& e) {
    FormatFail("header", e.what());
  }

  Checkpoint c;
  std::size_t payload_values = 0;
  std::vector<std::vector<std::size_t>> shapes;
  std::vector<std::string> names;
  try {
    c.format_version = header.at("format_version").get<std::int64_t>();
    if (c.format_version != kCheckpointVersion)
      Fail(ErrorCode::kVersionMismatch,
           "checkpoint format version " + std::to_string(c.format_version) + ", expected " +
               std::to_string(kCheckpointVersion));
    c.seed = header.at("seed").get<std::uint64_t>();
    c.optimizer.step = header.at("step").get<std::int64_t>();
    payload_values = header.at("payload_values").get<std::size_t>();
    std::size_t offset = 0;
    for (const auto& e : header.at("manifest")) {
      names.push_back(e.at("name").get<std::string>());
      shapes.push_back(e.at("shape").get<std::vector<std::size_t>>());
      if (e.at("offset").get<std::size_t>() != offset)
        FormatFail("manifest", "offset of '" + names.back() + "' is inconsistent");
      offset += diff::Tensor::ElementCount(shapes.back());
    }
    if (offset != payload_values) FormatFail("manifest", "sizes do not add up to the payload");
  } catch (const json::exception& e) {
    FormatFail("header", e.what());
  }
  try {
    c.model_config = config::ModelConfigFromJson(header.at("model_config"), "model_config");
  } catch (const json::exception& e) {
    FormatFail("model_config", e.what());
  } catch (const Error& e) {
    FormatFail("model_config", e.what());
  }

  const std::size_t payload_begin = header_end + 1;
  if (data.size() - payload_begin != payload_values * 4)
    FormatFail("payload", "expected " + std::to_string(payload_values * 4) + " bytes, found " +
                              std::to_string(data.size() - payload_begin));

  const auto reference = model::GcgatModel::Create(c.model_config, 0);
  const auto& ref = reference.params();
  if (names.size() != 3 * ref.size())
    FormatFail("manifest", "entry count does not match the configured model");
  const char* prefixes[] = {"param/", "adam.m/", "adam.v/"};
  std::size_t pos = payload_begin;
  for (std::size_t e = 0; e < names.size(); ++e) {
    const std::size_t group = e / ref.size();
    const auto& p = ref[e % ref.size()];
    if (names[e] != prefixes[group] + p.name || shapes[e] != p.value.shape())
      FormatFail("manifest", "entry '" + names[e] + "' does not match the configured model");
    diff::Tensor t(shapes[e]);
    for (double& x : t.values()) {
      std::uint32_t bits = 0;
      for (int k = 0; k < 4; ++k)
        bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos++])) << (8 * k);
      x = static_cast<double>(std::bit_cast<float>(bits));
    }
    if (group == 0) {
      c.params.Add(p.name, std::move(t), p.trainable);
    } else {
      (group == 1 ? c.optimizer.m : c.optimizer.v).push_back(std::move(t));
    }
  }
  return c;
}

}  // namespace gcgat::trainer
