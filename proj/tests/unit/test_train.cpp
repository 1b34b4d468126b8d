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
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "rfssl/core/error.hpp"
#include "rfssl/data/phantom.hpp"
#include "rfssl/train/config.hpp"
#include "rfssl/train/experiment.hpp"
#include "rfssl/train/heatmap.hpp"
#include "rfssl/train/metrics.hpp"
#include "rfssl/train/predict.hpp"
#include "rfssl/train/trainer.hpp"
#include "test_util.hpp"

using namespace rfssl;
using namespace rfssl::train;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

double pairwise_auroc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (y[i] == 1 && y[j] == 0) {
        pairs += 1;
        wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
  return wins / pairs;
}

// Precision and recall evaluated by brute force at every distinct score, then
// integrated as a right-continuous step function of recall.
double step_average_precision(const std::vector<double>& s, const std::vector<int>& y) {
  std::vector<double> thresholds = s;
  std::sort(thresholds.rbegin(), thresholds.rend());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  const double positives = static_cast<double>(std::count(y.begin(), y.end(), 1));
  double ap = 0, prev_recall = 0;
  for (double t : thresholds) {
    double tp = 0, called = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s[i] >= t) {
        called += 1;
        tp += y[i];
      }
    const double recall = tp / positives;
    ap += (recall - prev_recall) * (tp / called);
    prev_recall = recall;
  }
  return ap;
}

std::vector<std::vector<double>> snapshot(nn::ModelState& m) {
  std::vector<std::vector<double>> out;
  for (auto* p : m.parameters()) out.emplace_back(p->value.values().begin(), p->value.values().end());
  for (auto* b : m.buffers()) out.emplace_back(b->value.values().begin(), b->value.values().end());
  return out;
}

std::vector<std::vector<double>> group_snapshot(const std::vector<nn::Parameter*>& params) {
  std::vector<std::vector<double>> out;
  for (auto* p : params) out.emplace_back(p->value.values().begin(), p->value.values().end());
  return out;
}

nn::ModelState micro_model(std::uint64_t seed) {
  Rng rng(seed);
  return nn::make_model(nn::ArchitectureDescriptor::micro(), rng);
}

// Two well separated families of constant images with small noise.
struct ToySet {
  std::vector<signal::Patch> patches;
  LabeledSet set;
};

ToySet toy_labeled(int per_class, int size, std::uint64_t seed) {
  ToySet t;
  Rng rng(seed);
  for (int i = 0; i < 2 * per_class; ++i) {
    const int label = i % 2;
    signal::Patch p(size, size);
    for (double& v : p.values()) v = (label ? 0.8 : 0.2) + rng.normal(0.0, 0.02);
    t.patches.push_back(std::move(p));
    t.set.labels.push_back(label);
  }
  for (const auto& p : t.patches) t.set.patches.push_back(&p);
  return t;
}

void make_all_benign(nn::ModelState& m) {
  for (double& w : m.classifier.weight.value.values()) w = 0.0;
  m.classifier.bias.value[0] = 5.0;
  m.classifier.bias.value[1] = -5.0;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

data::PhantomConfig small_phantom() {
  data::PhantomConfig cfg;
  cfg.axial_samples = 224;
  cfg.lateral_lines = 64;
  cfg.axial_extent_mm = 14.0;
  cfg.lateral_extent_mm = 23.0;
  cfg.needle_length_mm = 8.0;
  cfg.needle_width_mm = 3.0;
  return cfg;
}

ExperimentConfig smoke_config() {
  ExperimentConfig c;
  c.seed = 7;
  c.repeats = 2;
  c.architecture = nn::ArchitectureDescriptor::micro();
  c.phantom = small_phantom();
  c.corpus.cores = 24;
  c.corpus.cores_per_patient = 2;
  c.corpus.unlabeled_patches = 48;
  c.corpus.labeled_patches = 24;
  c.corpus.patch_mm = 2.0;
  c.corpus.patch_size = 8;
  c.corpus.train_stride_mm = 2.0;
  c.corpus.eval_stride_mm = 2.0;
  for (TrainRun* r : {&c.pretrain, &c.linear_probe, &c.finetune}) {
    r->epochs = 2;
    r->warmup_epochs = 1;
    r->batch_size = 8;
    r->base_lr = 1e-3;
  }
  c.arms = {{"ssl", ArmKind::ssl_linear, SslLoss::vicreg}, {"scratch", ArmKind::sl_scratch, SslLoss::vicreg}};
  c.heatmaps = 1;
  return c;
}

}  // namespace

TEST_CASE("AUROC matches pairwise enumeration exactly") {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(2, 200));
    std::vector<double> s(static_cast<std::size_t>(n));
    std::vector<int> y(static_cast<std::size_t>(n));
    // Coarse scores force plenty of ties.
    for (int i = 0; i < n; ++i) {
      s[static_cast<std::size_t>(i)] = trial % 2 ? std::floor(rng.uniform() * 10) / 10 : rng.uniform();
      y[static_cast<std::size_t>(i)] = static_cast<int>(rng.uniform_int(0, 1));
    }
    y[0] = 1;
    y[1] = 0;
    CHECK(auroc(s, y) == pairwise_auroc(s, y));
    CHECK(std::abs(average_precision(s, y) - step_average_precision(s, y)) < 1e-10);
  }
}

TEST_CASE("metric examples") {
  const std::vector<double> s{0.9, 0.4, 0.6, 0.1};
  const std::vector<int> y{1, 1, 0, 0};
  CHECK(auroc(s, y) == 0.75);
  CHECK(pairwise_auroc(s, y) == 0.75);
  // Sensitivity 1/2 (0.4 is missed) and specificity 1/2 (0.6 is called).
  CHECK(balanced_accuracy(s, y) == 0.5);
  const std::vector<double> ranked{0.9, 0.8, 0.3, 0.2};
  CHECK(auroc(ranked, y) == 1.0);
  CHECK(average_precision(ranked, y) == 1.0);
  CHECK(balanced_accuracy(ranked, y) == 1.0);
  CHECK(balanced_accuracy(std::vector<double>{0.5, 0.49}, std::vector<int>{1, 0}) == 1.0);
  CHECK_THROWS_AS(auroc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), InvalidArgument);
  CHECK_THROWS_AS(average_precision(std::vector<double>{0.1}, std::vector<int>{0}), InvalidArgument);
}

TEST_CASE("core probability is the mean of patch classes") {
  CHECK(make_core_prediction("a", {0.9, 0.5, 0.49, 0.1}, 1, 50).core_probability == 0.5);
  CHECK(make_core_prediction("b", {0.1, 0.2, 0.3}, 0, 0).core_probability == 0.0);
  std::vector<double> probs(10, 0.2);
  std::fill(probs.begin(), probs.begin() + 7, 0.7);
  const auto p = make_core_prediction("c", probs, 1, 80);
  CHECK(p.core_probability == 0.7);
  CHECK(predicted_involvement(p) == p.core_probability);

  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> pr(static_cast<std::size_t>(rng.uniform_int(1, 40)));
    for (double& v : pr) v = rng.uniform();
    const auto cp = make_core_prediction("r", pr, 0, 0);
    double sum = 0;
    for (int c : cp.patch_classes) sum += c;
    CHECK(cp.core_probability == sum / static_cast<double>(pr.size()));
  }
}

TEST_CASE("predicted involvement") {
  CHECK(predicted_involvement(make_core_prediction("a", {0.9, 0.8}, 1, 60)) == 1.0);
  CHECK(predicted_involvement(make_core_prediction("b", std::vector<double>(12, 0.1), 1, 60)) == 0.0);
  CHECK(predicted_involvement(make_core_prediction("c", {0.9, 0.1, 0.9, 0.9}, 1, 60)) == 0.75);
  CHECK_THROWS_AS(predicted_involvement(make_core_prediction("d", {}, 1, 60)), InvalidArgument);
}

TEST_CASE("low involvement cores never reach the metrics") {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<CorePrediction> all, kept;
    for (int k = 0; k < 20; ++k) {
      const int label = k < 2 ? k : static_cast<int>(rng.uniform_int(0, 1));
      const double inv = label ? (k == 1 ? 60.0 : rng.uniform(0, 100)) : 0.0;
      std::vector<double> pr(static_cast<std::size_t>(rng.uniform_int(1, 6)));
      for (double& v : pr) v = rng.uniform();
      auto pred = make_core_prediction("k" + std::to_string(k), pr, label, inv);
      all.push_back(pred);
      if (!label || inv >= kMinInvolvement) kept.push_back(pred);
    }
    for (MetricLevel level : {MetricLevel::core, MetricLevel::patch}) {
      const auto a = compute_metrics(all, level), b = compute_metrics(kept, level);
      CHECK(a.auroc == b.auroc);
      CHECK(a.avg_precision == b.avg_precision);
      CHECK(a.balanced_accuracy == b.balanced_accuracy);
      CHECK(a.n_positive == b.n_positive);
      CHECK(a.n_negative == b.n_negative);
    }
  }
  // A single 30% core turns a valid input into a single-class one.
  std::vector<CorePrediction> preds{make_core_prediction("a", {0.2}, 0, 0), make_core_prediction("b", {0.9}, 1, 30)};
  CHECK_THROWS_AS(compute_metrics(preds, MetricLevel::core), InvalidArgument);
}

TEST_CASE("empty cores are excluded from metrics") {
  std::vector<CorePrediction> preds{make_core_prediction("a", {0.2}, 0, 0), make_core_prediction("b", {0.9}, 1, 50),
                                    make_core_prediction("c", {}, 1, 90)};
  const auto r = compute_metrics(preds, MetricLevel::core);
  CHECK(r.n_positive == 1);
  CHECK(r.n_negative == 1);
  CHECK(r.auroc == 1.0);
}

TEST_CASE("run configuration") {
  CHECK(TrainRun::defaults(RunMode::pretrain).epochs == 200);
  CHECK(TrainRun::defaults(RunMode::linear_finetune).epochs == 50);
  CHECK(freeze_for(RunMode::linear_finetune).backbone);
  CHECK_FALSE(freeze_for(RunMode::semisup_finetune).backbone);
  CHECK(run_mode_from_string(to_string(RunMode::supervised)) == RunMode::supervised);
  CHECK_THROWS_AS(ssl_loss_from_string("vicregg"), ConfigError);
  TrainRun r;
  r.epochs = 5;
  r.warmup_epochs = 10;
  CHECK(r.schedule().warmup_epochs == 5);
  r.batch_size = 1;
  CHECK_THROWS_AS(r.validate(), ConfigError);
  CHECK(batch_ranges(10, 4) == std::vector<std::pair<std::size_t, std::size_t>>{{0, 4}, {4, 8}, {8, 10}});
  CHECK(batch_ranges(9, 4) == std::vector<std::pair<std::size_t, std::size_t>>{{0, 4}, {4, 8}});
}

TEST_CASE("pretraining is deterministic") {
  Rng data(4);
  std::vector<signal::Patch> patches;
  for (int i = 0; i < 64; ++i) patches.push_back(testing::random_patch(64, 64, data));
  PatchRefs refs;
  for (const auto& p : patches) refs.push_back(&p);
  TrainRun run = TrainRun::defaults(RunMode::pretrain);
  run.epochs = 2;
  run.warmup_epochs = 1;
  run.batch_size = 32;
  run.seed = 9;
  std::vector<double> curves[2];
  std::vector<std::vector<double>> weights[2];
  for (int k = 0; k < 2; ++k) {
    Rng init(5);
    nn::ModelState m = nn::make_model(nn::ArchitectureDescriptor::tiny(), init);
    curves[k] = pretrain(run, refs, m).loss_curve;
    weights[k] = snapshot(m);
  }
  REQUIRE(curves[0].size() == 2);
  CHECK(curves[0] == curves[1]);
  CHECK(weights[0] == weights[1]);
  for (double v : curves[0]) CHECK(std::isfinite(v));
}

TEST_CASE("linear finetuning leaves backbone and projector untouched") {
  ToySet toy = toy_labeled(16, 8, 6);
  nn::ModelState m = micro_model(7);
  const auto backbone = group_snapshot(m.backbone_parameters());
  const auto projector = group_snapshot(m.projector_parameters());
  const auto head = group_snapshot(m.head_parameters());
  TrainRun run = TrainRun::defaults(RunMode::linear_finetune);
  run.epochs = 5;
  run.warmup_epochs = 1;
  run.batch_size = 8;
  run.base_lr = 1e-2;
  finetune(run, toy.set, m);
  CHECK(group_snapshot(m.backbone_parameters()) == backbone);
  CHECK(group_snapshot(m.projector_parameters()) == projector);
  CHECK(group_snapshot(m.head_parameters()) != head);
}

TEST_CASE("linear probe separates a separable toy set") {
  ToySet toy = toy_labeled(20, 8, 8);
  nn::ModelState m = micro_model(9);
  // Shift the frozen embedding away from the ReLU floor so both classes map
  // to distinct points.
  for (double& b : m.backbone.final_bn.beta.value.values()) b = 1.0;
  TrainRun run = TrainRun::defaults(RunMode::linear_finetune);
  run.epochs = 50;
  run.warmup_epochs = 2;
  run.batch_size = 8;
  run.base_lr = 5e-2;
  const auto result = finetune(run, toy.set, m);
  CHECK(result.train_loss.size() == 50);
  const auto probs = predict_probabilities(m, toy.set.patches);
  int correct = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) correct += (probs[i] >= 0.5 ? 1 : 0) == toy.set.labels[i];
  CHECK(correct == static_cast<int>(probs.size()));
}

TEST_CASE("finetuning restores the best validation epoch") {
  ToySet toy = toy_labeled(8, 8, 10);
  for (RunMode mode : {RunMode::linear_finetune, RunMode::semisup_finetune}) {
    nn::ModelState m = micro_model(11);
    TrainRun run = TrainRun::defaults(mode);
    run.epochs = 5;
    run.warmup_epochs = 1;
    run.batch_size = 4;
    run.base_lr = 1e-2;
    const std::vector<double> script{0.55, 0.6, 0.9, 0.7, 0.9};
    std::vector<std::vector<std::vector<double>>> seen;
    int calls = 0;
    Validator v = [&](const nn::ModelState& state) {
      nn::ModelState copy = state;
      seen.push_back(snapshot(copy));
      return script[static_cast<std::size_t>(calls++)];
    };
    const auto result = finetune(run, toy.set, m, v);
    REQUIRE(seen.size() == 5);
    CHECK(result.best_epoch == 2);
    CHECK(result.val_auroc == script);
    CHECK(snapshot(m) == seen[2]);
    CHECK(snapshot(m) != seen[4]);
    CHECK(*std::max_element(result.val_auroc.begin(), result.val_auroc.end()) == script[2]);
  }
}

TEST_CASE("finetuning needs both classes") {
  ToySet toy = toy_labeled(4, 8, 12);
  std::fill(toy.set.labels.begin(), toy.set.labels.end(), 1);
  nn::ModelState m = micro_model(13);
  TrainRun run = TrainRun::defaults(RunMode::supervised);
  run.epochs = 1;
  run.batch_size = 4;
  CHECK_THROWS_AS(finetune(run, toy.set, m), InvalidArgument);
}

TEST_CASE("heatmap of an all-benign model is blue over the needle region") {
  data::PhantomConfig cfg = small_phantom();
  Rng rng(14);
  const data::BiopsyCore core = data::generate_phantom_frame(1, cfg, rng);
  nn::ModelState m = micro_model(15);
  make_all_benign(m);
  data::ExtractionConfig ext;
  ext.patch_mm = 2.0;
  ext.stride_mm = 1.0;
  ext.output_size = 8;
  const Heatmap h = render_heatmap(m, core, ext);
  const auto gray = bmode_gray(core.frame);
  const auto windows = data::qualifying_windows(core, data::Region::needle, ext);
  REQUIRE(!windows.empty());
  std::vector<bool> covered(gray.size(), false);
  for (const auto& w : windows)
    for (int r = w.axial_start; r < w.axial_start + w.axial_size; ++r)
      for (int c = w.lateral_start; c < w.lateral_start + w.lateral_size; ++c)
        covered[static_cast<std::size_t>(r * core.frame.lateral_count() + c)] = true;
  CHECK(h.overlay_pixels == static_cast<std::size_t>(std::count(covered.begin(), covered.end(), true)));
  CHECK(h.image.width == core.frame.lateral_count());
  CHECK(h.image.height == core.frame.axial_count());
  bool all_match = true;
  for (std::size_t i = 0; i < gray.size(); ++i) {
    const double g = gray[i];
    const auto expect_r = covered[i] ? std::lround(0.5 * g) : std::lround(g);
    const auto expect_b = covered[i] ? std::lround(0.5 * g + 127.5) : std::lround(g);
    all_match &= h.image.rgb[3 * i] == expect_r && h.image.rgb[3 * i + 1] == expect_r &&
                 h.image.rgb[3 * i + 2] == expect_b;
  }
  CHECK(all_match);
  CHECK(encode_ppm(render_heatmap(m, core, ext).image) == encode_ppm(h.image));
}

TEST_CASE("heatmap with an empty needle mask has no overlay") {
  data::PhantomConfig cfg = small_phantom();
  Rng rng(16);
  data::BiopsyCore core = data::generate_phantom_frame(0, cfg, rng);
  core.needle_mask.mask = Mask2D(core.frame.axial_count(), core.frame.lateral_count(), 0);
  nn::ModelState m = micro_model(17);
  data::ExtractionConfig ext;
  ext.patch_mm = 2.0;
  ext.stride_mm = 1.0;
  ext.output_size = 8;
  const Heatmap h = render_heatmap(m, core, ext);
  CHECK(h.overlay_pixels == 0);
  const auto gray = bmode_gray(core.frame);
  bool gray_only = true;
  for (std::size_t i = 0; i < gray.size(); ++i)
    for (int k = 0; k < 3; ++k) gray_only &= h.image.rgb[3 * i + static_cast<std::size_t>(k)] == gray[i];
  CHECK(gray_only);
}

TEST_CASE("overlapping windows blend to the midpoint before compositing") {
  data::RfFrame frame;
  Rng rng(18);
  frame.samples = testing::random_patch(12, 10, rng);
  frame.axial_extent_mm = 12;
  frame.lateral_extent_mm = 10;
  const data::Window a{0, 0, 6, 6, 0, 0}, b{3, 2, 6, 6, 3, 2};
  const RgbImage img = compose_heatmap(frame, {{a, 0}, {b, 1}});
  const auto gray = bmode_gray(frame);
  const auto px = [&](int r, int c, int k) { return img.rgb[static_cast<std::size_t>(3 * (r * 10 + c) + k)]; };
  const auto g = [&](int r, int c) { return static_cast<double>(gray[static_cast<std::size_t>(r * 10 + c)]); };
  // Overlap (rows 3-5, cols 2-5): colour (127.5, 0, 127.5) at alpha 0.5.
  CHECK(px(4, 3, 0) == std::lround(0.5 * g(4, 3) + 63.75));
  CHECK(px(4, 3, 1) == std::lround(0.5 * g(4, 3)));
  CHECK(px(4, 3, 2) == std::lround(0.5 * g(4, 3) + 63.75));
  // Only a: pure blue.
  CHECK(px(0, 0, 0) == std::lround(0.5 * g(0, 0)));
  CHECK(px(0, 0, 2) == std::lround(0.5 * g(0, 0) + 127.5));
  // Only b: pure red.
  CHECK(px(8, 7, 0) == std::lround(0.5 * g(8, 7) + 127.5));
  CHECK(px(8, 7, 2) == std::lround(0.5 * g(8, 7)));
  // Outside both: gray.
  CHECK(px(11, 9, 0) == gray[11 * 10 + 9]);
  const auto ppm = encode_ppm(img);
  const std::string head = "P6\n10 12\n255\n";
  CHECK(std::string(ppm.begin(), ppm.begin() + static_cast<std::ptrdiff_t>(head.size())) == head);
  CHECK(ppm.size() == head.size() + 3 * 120);
}

TEST_CASE("configuration readers reject unknown keys") {
  CHECK_THROWS_AS(vicreg_from_json(json{{"lambda", 1.0}, {"lamda", 2.0}}), ConfigError);
  CHECK(vicreg_from_json(json{{"mu", 3.0}}).mu == 3.0);
  CHECK_THROWS_AS(phantom_from_json(json{{"density", 1.0}}), ConfigError);
  CHECK_THROWS_AS(train_run_from_json(json{{"epochs", "ten"}}, TrainRun{}), ConfigError);

  json j = to_json(smoke_config());
  j["arms"][0]["loss"] = "vicrej";
  CHECK_THROWS_AS(experiment_from_json(j), ConfigError);
  j = to_json(smoke_config());
  j["pretrain"]["optimiser"] = json::object();
  CHECK_THROWS_AS(experiment_from_json(j), ConfigError);
}

TEST_CASE("configuration round trips through JSON") {
  const ExperimentConfig c = smoke_config();
  const json j = to_json(c);
  CHECK(to_json(experiment_from_json(j)) == j);
  const TrainRun r = TrainRun::defaults(RunMode::pretrain);
  CHECK(to_json(train_run_from_json(to_json(r), TrainRun{})) == to_json(r));
}

TEST_CASE("dotted overrides") {
  json j = to_json(smoke_config());
  apply_override(j, "pretrain.vicreg.mu", "0");
  CHECK(experiment_from_json(j).pretrain.vicreg.mu == 0.0);
  apply_override(j, "corpus.cores", "30");
  CHECK(experiment_from_json(j).corpus.cores == 30);
  apply_override(j, "arms.0.loss", "simclr");
  CHECK(experiment_from_json(j).arms[0].loss == SslLoss::simclr);
  CHECK_THROWS_AS(apply_override(j, "pretrain.vicreg.muu", "1"), ConfigError);
  CHECK_THROWS_AS(apply_override(j, "corpus.cores", "3.5"), ConfigError);
  CHECK_THROWS_AS(apply_override(j, "corpus.cores", "many"), ConfigError);
}

TEST_CASE("experiment smoke run is complete and reproducible") {
  const ExperimentConfig c = smoke_config();
  const fs::path base = fs::temp_directory_path() / "rfssl_test_experiment";
  fs::remove_all(base);
  const json first = run_experiment(c, base / "a");
  run_experiment(c, base / "b");
  CHECK(first["schema_version"] == kReportSchemaVersion);
  REQUIRE(first["arms"].size() == 2);
  for (const auto& arm : first["arms"]) {
    CHECK(arm["runs"].size() == 2);
    for (const auto& run : arm["runs"]) {
      INFO(run.dump());
      REQUIRE(run["status"] == "ok");
      CHECK(run["core"]["auroc"].is_number());
      CHECK(run["patch"]["auroc"].is_number());
    }
    CHECK(arm["summary"]["core"]["auroc"]["n"] == 2);
  }
  CHECK(first["arms"][0]["runs"][0]["seed"] != first["arms"][0]["runs"][1]["seed"]);
  CHECK(slurp(base / "a" / "report.json") == slurp(base / "b" / "report.json"));
  std::size_t images = 0;
  for (const auto& e : fs::directory_iterator(base / "a" / "heatmaps")) {
    CHECK(slurp(e.path()) == slurp(base / "b" / "heatmaps" / e.path().filename()));
    ++images;
  }
  CHECK(images == 2);
}
