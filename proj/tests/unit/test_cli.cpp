/*
 * Copyright 2026 The rfssl Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "rfssl/cli/cli.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = rfssl::cli::dispatch(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rfssl_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

// Small frames at the canonical pitch so a corpus takes well under a second.
fs::path small_synth_config(const fs::path& dir) {
  const json j = {{"phantom",
                   {{"axial_samples", 224},
                    {"lateral_lines", 64},
                    {"axial_extent_mm", 14.0},
                    {"lateral_extent_mm", 23.0},
                    {"needle_length_mm", 8.0},
                    {"needle_width_mm", 3.0}}}};
  const fs::path p = dir / "synth.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

}  // namespace

TEST_CASE("missing required seed is a usage error") {
  const Outcome o = run({"synth-gen", "--out", scratch("noseed").string()});
  CHECK(o.code == rfssl::cli::kExitUsage);
  CHECK(o.err.rfind("usage: ", 0) == 0);
}

TEST_CASE("unknown subcommand and no subcommand are usage errors") {
  CHECK(run({"frobnicate"}).code == rfssl::cli::kExitUsage);
  CHECK(run({}).code == rfssl::cli::kExitUsage);
}

TEST_CASE("help exits cleanly") {
  const Outcome o = run({"--help"});
  CHECK(o.code == rfssl::cli::kExitOk);
  CHECK(o.out.find("pretrain") != std::string::npos);
}

TEST_CASE("gradcheck passes every component") {
  const Outcome o = run({"gradcheck", "--seed", "7"});
  CHECK(o.code == rfssl::cli::kExitOk);
  CHECK(o.out.find("PASS") != std::string::npos);
  CHECK(o.out.find("FAIL") == std::string::npos);
}

TEST_CASE("synth-gen is byte-reproducible and records its resolved configuration") {
  const fs::path dir = scratch("synth");
  const std::string cfg = small_synth_config(dir).string();
  for (const char* sub : {"a", "b"}) {
    const Outcome o = run({"synth-gen", "--seed", "5", "--cores", "12", "--config", cfg, "--out", (dir / sub).string()});
    REQUIRE(o.code == rfssl::cli::kExitOk);
  }
  CHECK(slurp(dir / "a" / "cores.rfd") == slurp(dir / "b" / "cores.rfd"));
  CHECK(slurp(dir / "a" / "manifest.json") == slurp(dir / "b" / "manifest.json"));
  const json resolved = read_json(dir / "a" / "config.resolved.json");
  CHECK(resolved.at("seed") == 5);
  CHECK(resolved.at("cores") == 12);
  CHECK(resolved.at("phantom").at("axial_samples") == 224);

  const Outcome other = run({"synth-gen", "--seed", "6", "--cores", "12", "--config", cfg, "--out", (dir / "c").string()});
  REQUIRE(other.code == rfssl::cli::kExitOk);
  CHECK(slurp(dir / "a" / "cores.rfd") != slurp(dir / "c" / "cores.rfd"));
}

TEST_CASE("flags override --set which overrides the config file") {
  const fs::path dir = scratch("precedence");
  const std::string cfg = small_synth_config(dir).string();
  const Outcome o = run({"synth-gen", "--seed", "1", "--config", cfg, "--set", "cores=4", "--set",
                         "phantom.lateral_lines=80", "--cores", "6", "--out", (dir / "o").string()});
  REQUIRE(o.code == rfssl::cli::kExitOk);
  const json resolved = read_json(dir / "o" / "config.resolved.json");
  CHECK(resolved.at("cores") == 6);
  CHECK(resolved.at("phantom").at("lateral_lines") == 80);
  CHECK(resolved.at("phantom").at("axial_samples") == 224);
}

TEST_CASE("configuration and io failures are runtime errors with one line") {
  const fs::path dir = scratch("errors");
  const Outcome bad_key = run({"synth-gen", "--seed", "1", "--set", "phantom.colour=3", "--out", dir.string()});
  CHECK(bad_key.code == rfssl::cli::kExitRuntime);
  CHECK(bad_key.err.rfind("config: ", 0) == 0);

  const Outcome missing = run({"evaluate", "--model", (dir / "absent.ckpt").string(), "--data",
                               (dir / "absent.rfd").string(), "--out", (dir / "ev").string()});
  CHECK(missing.code == rfssl::cli::kExitRuntime);
  CHECK(missing.err.rfind("io: ", 0) == 0);
  CHECK(std::count(missing.err.begin(), missing.err.end(), '\n') == 1);
}

TEST_CASE("balance without a seed is a usage error") {
  const Outcome o = run({"extract-patches", "--cores", "x", "--manifest", "y", "--balance", "--out",
                         scratch("balance").string()});
  CHECK(o.code == rfssl::cli::kExitUsage);
}

TEST_CASE("pipeline from corpus to heatmap") {
  const fs::path dir = scratch("pipeline");
  const std::string cfg = small_synth_config(dir).string();
  const std::string corpus = (dir / "corpus").string();
  REQUIRE(run({"synth-gen", "--seed", "3", "--cores", "24", "--config", cfg, "--out", corpus}).code == 0);
  const std::string cores = corpus + "/cores.rfd", manifest = corpus + "/manifest.json";

  const auto extract = [&](const std::string& split, const std::string& region, const std::string& out) {
    return run({"extract-patches", "--cores", cores, "--manifest", manifest, "--split", split, "--region",
                region, "--patch-mm", "2", "--stride-mm", "2", "--size", "8", "--out", (dir / out).string()});
  };
  REQUIRE(extract("train", "prostate", "unl").code == 0);
  REQUIRE(extract("train", "needle", "lab").code == 0);
  REQUIRE(extract("val", "needle", "val").code == 0);
  REQUIRE(extract("test", "needle", "test").code == 0);

  REQUIRE(run({"pretrain", "--seed", "1", "--data", (dir / "unl/patches.rfd").string(), "--arch", "micro",
               "--epochs", "1", "--out", (dir / "pre").string()})
              .code == 0);
  CHECK(fs::exists(dir / "pre/loss.csv"));
  REQUIRE(run({"finetune", "--seed", "1", "--data", (dir / "lab/patches.rfd").string(), "--val",
               (dir / "val/patches.rfd").string(), "--model", (dir / "pre/model.ckpt").string(), "--epochs",
               "2", "--out", (dir / "ft").string()})
              .code == 0);
  CHECK(fs::exists(dir / "ft/curve.csv"));

  const Outcome ev = run({"evaluate", "--model", (dir / "ft/model.ckpt").string(), "--data",
                          (dir / "test/patches.rfd").string(), "--out", (dir / "ev").string()});
  REQUIRE(ev.code == 0);
  const json report = read_json(dir / "ev/report.json");
  for (const char* key : {"core", "patch"}) CHECK(report.contains(key));
  CHECK(fs::exists(dir / "ev/involvement.csv"));
  CHECK(fs::exists(dir / "ev/config.resolved.json"));

  const Outcome hm = run({"heatmap", "--model", (dir / "ft/model.ckpt").string(), "--cores", cores,
                          "--patch-mm", "2", "--stride-mm", "2", "--out", (dir / "hm").string()});
  REQUIRE(hm.code == 0);
  int images = 0;
  for (const auto& e : fs::directory_iterator(dir / "hm")) images += e.path().extension() == ".ppm";
  CHECK(images == 24);
}
