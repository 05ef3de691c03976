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

// End-to-end checks of the command-line tool: files, output and exit codes.

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "gcgat/gcgat.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const fs::path& WorkDir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "gcgat_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string P(const std::string& name) { return (WorkDir() / name).string(); }

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void Spit(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary | std::ios::trunc) << text;
}

struct Run {
  int exit_code;
  std::string out;
  std::string err;
};

Run Cli(const std::string& args) {
  const std::string cmd = std::string(GCGAT_CLI_PATH) + " " + args + " > " + P("stdout.txt") +
                          " 2> " + P("stderr.txt");
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, Slurp(P("stdout.txt")),
          Slurp(P("stderr.txt"))};
}

std::size_t CountLines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

// Small generator and model so training runs take milliseconds.
const char* kSmallConfig = R"({
  "gen": {"history_steps": 2, "future_steps": 4, "poses_per_node": 3, "max_neighbors": 2,
          "approach_nodes": 2, "branch_nodes": 1},
  "model": {"dim": 8, "heads": 2, "modes": 3, "future_steps": 4, "latent_dim": 2,
            "max_neighbors": 4, "max_nodes": 8},
  "train": {"batch_size": 4, "steps": 4, "eval_every": 2}
})";

void PrepareSmallData() {
  static bool done = false;
  if (done) return;
  Spit(P("small.json"), kSmallConfig);
  REQUIRE(Cli("generate --out " + P("train.jsonl") + " --scenes 12 --seed 1 --config " +
              P("small.json")).exit_code == 0);
  REQUIRE(Cli("generate --out " + P("val.jsonl") + " --scenes 4 --seed 2 --config " +
              P("small.json")).exit_code == 0);
  done = true;
}

// Minimal XML well-formedness: balanced, properly nested elements.
bool BalancedXml(const std::string& s) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  while ((i = s.find('<', i)) != std::string::npos) {
    const std::size_t j = s.find('>', i);
    if (j == std::string::npos) return false;
    const std::string tag = s.substr(i + 1, j - i - 1);
    i = j + 1;
    if (tag.empty() || tag[0] == '?' || tag[0] == '!') continue;
    if (tag.back() == '/') continue;
    const std::string name = tag.substr(tag[0] == '/' ? 1 : 0, tag.find_first_of(" \n\t") -
                                                                  (tag[0] == '/' ? 1 : 0));
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
    } else {
      stack.push_back(name);
    }
  }
  return stack.empty();
}

TEST_CASE("generate writes the requested scenes deterministically") {
  const auto r = Cli("generate --out " + P("g1.jsonl") + " --scenes 10 --seed 5");
  CHECK(r.exit_code == 0);
  CHECK(CountLines(Slurp(P("g1.jsonl"))) == 10);
  CHECK(r.out.find("10 scenes") != std::string::npos);
  CHECK(r.out.find("t_junction") != std::string::npos);
  CHECK(Cli("generate --out " + P("g2.jsonl") + " --scenes 10 --seed 5").exit_code == 0);
  CHECK(Slurp(P("g1.jsonl")) == Slurp(P("g2.jsonl")));
}

TEST_CASE("config errors exit with code 2 and name the key") {
  Spit(P("typo.json"), R"({"gen": {"taoo": 3}})");
  const auto r = Cli("generate --out " + P("typo.jsonl") + " --scenes 2 --config " + P("typo.json"));
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("taoo") != std::string::npos);
  CHECK(Cli("generate --out " + P("x.jsonl") + " --scenes 2 --config " + P("missing.json"))
            .exit_code == 2);
  CHECK(Cli("generate --scenes 2").exit_code == 2);
  CHECK(Cli("frobnicate").exit_code == 2);
}

TEST_CASE("train with zero steps writes the initialization") {
  PrepareSmallData();
  json cfg = json::parse(kSmallConfig);
  cfg["train"]["steps"] = 0;
  Spit(P("zero.json"), cfg.dump());
  const auto r = Cli("train --data " + P("train.jsonl") + " --val " + P("val.jsonl") +
                     " --config " + P("zero.json") + " --out " + P("zero.ckpt"));
  REQUIRE(r.exit_code == 0);

  gcgat_config* c = nullptr;
  gcgat_model* m = nullptr;
  REQUIRE(gcgat_config_load(P("zero.json").c_str(), &c) == GCGAT_OK);
  REQUIRE(gcgat_model_init(c, &m) == GCGAT_OK);
  REQUIRE(gcgat_model_save(m, P("init.ckpt").c_str()) == GCGAT_OK);
  CHECK(Slurp(P("zero.ckpt")) == Slurp(P("init.ckpt")));
  gcgat_model_free(m);
  gcgat_config_free(c);
}

TEST_CASE("train is deterministic, logs records and prints final metrics") {
  PrepareSmallData();
  const std::string args = "train --data " + P("train.jsonl") + " --val " + P("val.jsonl") +
                           " --config " + P("small.json") + " --out ";
  const auto a = Cli(args + P("a.ckpt"));
  REQUIRE(a.exit_code == 0);
  CHECK(a.out.find("final val step 4") != std::string::npos);
  CHECK(a.out.find("min_ade_5") != std::string::npos);
  REQUIRE(Cli(args + P("b.ckpt")).exit_code == 0);
  CHECK(Slurp(P("a.ckpt")) == Slurp(P("b.ckpt")));
  CHECK(Slurp(P("a.ckpt.log")) == Slurp(P("b.ckpt.log")));

  std::istringstream log(Slurp(P("a.ckpt.log")));
  std::string line;
  std::vector<std::int64_t> steps;
  while (std::getline(log, line)) {
    const json j = json::parse(line);
    for (const char* key : {"l_reg", "l_cls", "l_ade", "val_min_ade_5"}) CHECK(j.contains(key));
    steps.push_back(j["step"].get<std::int64_t>());
  }
  CHECK(steps == std::vector<std::int64_t>{2, 4});

  // Stopping halfway and resuming gives the same checkpoint.
  REQUIRE(Cli(args + P("half.ckpt") + " --stop-after 2").exit_code == 0);
  REQUIRE(Cli(args + P("resumed.ckpt") + " --resume " + P("half.ckpt")).exit_code == 0);
  CHECK(Slurp(P("resumed.ckpt")) == Slurp(P("a.ckpt")));
}

TEST_CASE("non-finite training loss exits with code 3 and names the step") {
  PrepareSmallData();
  json cfg = json::parse(kSmallConfig);
  cfg["train"]["learning_rate"] = 1e300;
  cfg["train"]["final_learning_rate"] = 1e300;
  cfg["train"]["grad_clip_norm"] = nullptr;
  Spit(P("diverge.json"), cfg.dump());
  const auto r = Cli("train --data " + P("train.jsonl") + " --val " + P("val.jsonl") +
                     " --config " + P("diverge.json") + " --out " + P("diverge.ckpt"));
  CHECK(r.exit_code == 3);
  CHECK(std::regex_search(r.err, std::regex("step [0-9]+")));
}

TEST_CASE("eval reports metrics, inference time and missing ground truth") {
  PrepareSmallData();
  REQUIRE(Cli("train --data " + P("train.jsonl") + " --val " + P("val.jsonl") + " --config " +
              P("small.json") + " --out " + P("e.ckpt")).exit_code == 0);
  const auto r = Cli("eval --data " + P("val.jsonl") + " --ckpt " + P("e.ckpt") + " --out " +
                     P("report.json"));
  REQUIRE(r.exit_code == 0);
  CHECK(std::regex_search(r.out, std::regex("mean inference time [0-9.]+ ms/scene")));
  const json report = json::parse(Slurp(P("report.json")));
  CHECK(report["scene_count"] == 4);
  CHECK(report["min_ade_k"].contains("5"));

  std::istringstream in(Slurp(P("val.jsonl")));
  std::string line, stripped;
  while (std::getline(in, line)) {
    json j = json::parse(line);
    j["future"] = nullptr;
    stripped += j.dump() + "\n";
  }
  Spit(P("nogt.jsonl"), stripped);
  CHECK(Cli("eval --data " + P("nogt.jsonl") + " --ckpt " + P("e.ckpt") + " --out " +
            P("r2.json")).exit_code == 4);
  CHECK(Cli("eval --data " + P("nogt.jsonl") + " --baseline constant_velocity --out " +
            P("r3.json")).exit_code == 4);
  CHECK(Cli("eval --data " + P("val.jsonl") + " --out " + P("r4.json")).exit_code == 2);
}

TEST_CASE("constant-velocity baseline through the command line") {
  Spit(P("straight.json"), R"({"gen": {"scene_topology": "straight", "noise_std": 0.0}})");
  REQUIRE(Cli("generate --out " + P("straight.jsonl") + " --scenes 20 --seed 3 --config " +
              P("straight.json")).exit_code == 0);
  REQUIRE(Cli("eval --data " + P("straight.jsonl") + " --baseline constant_velocity --config " +
              P("straight.json") + " --out " + P("cv.json")).exit_code == 0);
  CHECK(json::parse(Slurp(P("cv.json")))["min_ade_k"]["1"].get<double>() < 0.05);

  Spit(P("tj.json"), R"({"gen": {"scene_topology": "t_junction"}})");
  REQUIRE(Cli("generate --out " + P("tj.jsonl") + " --scenes 40 --seed 4 --config " +
              P("tj.json")).exit_code == 0);
  REQUIRE(Cli("eval --data " + P("tj.jsonl") + " --baseline constant_velocity --config " +
              P("tj.json") + " --out " + P("cvt.json")).exit_code == 0);
  CHECK(json::parse(Slurp(P("cvt.json")))["miss_rate_k"]["5"].get<double>() > 0.0);
}

TEST_CASE("predict writes K modes deterministically") {
  REQUIRE(Cli("generate --out " + P("full_val.jsonl") + " --scenes 3 --seed 8").exit_code == 0);
  Spit(P("k10.json"), R"({"train": {"steps": 0}})");
  REQUIRE(Cli("train --data " + P("full_val.jsonl") + " --val " + P("full_val.jsonl") +
              " --config " + P("k10.json") + " --out " + P("k10.ckpt")).exit_code == 0);
  const std::string args =
      "predict --scene-file " + P("full_val.jsonl") + " --index 2 --ckpt " + P("k10.ckpt") +
      " --seed 9 --out ";
  REQUIRE(Cli(args + P("p1.json")).exit_code == 0);
  REQUIRE(Cli(args + P("p2.json")).exit_code == 0);
  CHECK(Slurp(P("p1.json")) == Slurp(P("p2.json")));
  const json p = json::parse(Slurp(P("p1.json")));
  REQUIRE(p["pi"].size() == 10);
  double sum = 0.0;
  for (const auto& x : p["pi"]) sum += x.get<double>();
  CHECK(std::abs(sum - 1.0) < 1e-6);
  REQUIRE(p["mu"].size() == 10);
  for (const auto& mode : p["mu"]) CHECK(mode.size() == 12);
  CHECK(p.contains("goal_weights"));
  CHECK(Cli("predict --scene-file " + P("full_val.jsonl") + " --index 3 --ckpt " + P("k10.ckpt") +
            " --out " + P("p3.json")).exit_code == 5);
}

TEST_CASE("plot draws a well-formed SVG with the most likely mode highlighted") {
  REQUIRE(Cli("generate --out " + P("plot.jsonl") + " --scenes 2 --seed 8").exit_code == 0);
  // Three modes over 12 steps; mode 1 is the most likely and its scale grows.
  json pred;
  pred["pi"] = {0.2, 0.5, 0.3};
  for (int k = 0; k < 3; ++k) {
    json mu = json::array(), b = json::array();
    for (int t = 0; t < 12; ++t) {
      mu.push_back({2.0 * (t + 1), 0.3 * k * (t + 1)});
      b.push_back({0.1 + 0.05 * t, 0.2 + 0.05 * t});
    }
    pred["mu"].push_back(mu);
    pred["b"].push_back(b);
  }
  pred["goal_weights"] = json::array();
  Spit(P("pred.json"), pred.dump());
  const auto r = Cli("plot --scene-file " + P("plot.jsonl") + " --index 0 --pred " + P("pred.json") +
                     " --out " + P("plot.svg"));
  REQUIRE(r.exit_code == 0);
  const std::string svg = Slurp(P("plot.svg"));
  CHECK(BalancedXml(svg));
  CHECK(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\"") != std::string::npos);
  for (const char* cls : {"centerline", "corridor", "history", "ground-truth", "mode"})
    CHECK(svg.find(std::string("class=\"") + cls + "\"") != std::string::npos);
  const std::regex ml("class=\"ml-mode\"");
  CHECK(std::distance(std::sregex_iterator(svg.begin(), svg.end(), ml), std::sregex_iterator()) ==
        1);

  std::vector<double> radii;
  const std::regex circle("<circle class=\"uncertainty\"[^>]* r=\"([0-9.]+)\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), circle); it != std::sregex_iterator();
       ++it)
    radii.push_back(std::stod((*it)[1]));
  REQUIRE(radii.size() == 12);
  for (std::size_t t = 1; t < radii.size(); ++t) CHECK(radii[t] > radii[t - 1]);
  CHECK(radii[0] == doctest::Approx(0.5 * (0.1 + 0.2) * 8.0).epsilon(1e-3));

  if (std::system("python3 -c 'import xml.etree.ElementTree' > /dev/null 2>&1") == 0) {
    const std::string cmd = "python3 -c \"import xml.etree.ElementTree as E; "
                            "assert E.parse('" + P("plot.svg") + "').getroot().tag.endswith('svg')\"";
    CHECK(std::system(cmd.c_str()) == 0);
  }

  json shorter = pred;
  for (auto& mode : shorter["mu"]) mode.erase(mode.size() - 1);
  for (auto& mode : shorter["b"]) mode.erase(mode.size() - 1);
  Spit(P("short.json"), shorter.dump());
  CHECK(Cli("plot --scene-file " + P("plot.jsonl") + " --index 0 --pred " + P("short.json") +
            " --out " + P("bad.svg")).exit_code == 6);
  CHECK(Cli("plot --scene-file " + P("plot.jsonl") + " --index 7 --pred " + P("pred.json") +
            " --out " + P("bad.svg")).exit_code == 5);
}

TEST_CASE("ablate prints the four-row table") {
  PrepareSmallData();
  const auto r = Cli("ablate --data " + P("train.jsonl") + " --val " + P("val.jsonl") +
                     " --config " + P("small.json") + " --out " + P("ablation.txt"));
  REQUIRE(r.exit_code == 0);
  const std::string table = Slurp(P("ablation.txt"));
  CHECK(CountLines(table) == 5);
  CHECK(table.find("F F ") != std::string::npos);
  CHECK(table.find("T T ") != std::string::npos);
  CHECK(r.out == table);
}

}  // namespace
