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

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfssl/data/phantom.hpp"
#include "rfssl/data/split.hpp"
#include "rfssl/train/config.hpp"
#include "rfssl/train/predict.hpp"
#include "rfssl/train/trainer.hpp"

namespace rfssl::train {

inline constexpr int kReportSchemaVersion = 1;

/// ssl_linear / ssl_semisup: pretrain with `loss`, then linear probe or full
/// finetune. sl_scratch: supervised from random init. random_linear: linear
/// probe on a frozen random-init backbone. summary_oracle: logistic
/// regression on (mean, std) of the raw-crop envelope, no network.
enum class ArmKind { ssl_linear, ssl_semisup, sl_scratch, random_linear, summary_oracle };
std::string to_string(ArmKind kind);
ArmKind arm_kind_from_string(const std::string& name);

struct ArmConfig {
  std::string name;
  ArmKind kind = ArmKind::ssl_linear;
  SslLoss loss = SslLoss::vicreg;
};

struct CorpusConfig {
  int cores = 200;
  int cores_per_patient = 2;
  int unlabeled_patches = 2000;
  int labeled_patches = 200;
  double patch_mm = 5.0;
  int patch_size = 64;
  double train_stride_mm = 5.0;
  double eval_stride_mm = 1.0;
  double needle_overlap_min = 0.66;
  double prostate_overlap_min = 0.9;
  double test_cancer_fraction = 0.25;
  double validation_fraction = 0.2;
  double min_involvement = kMinInvolvement;

  data::ExtractionConfig extraction(double stride_mm) const;
  void validate() const;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  int repeats = 1;
  int threads = 1;
  nn::ArchitectureDescriptor architecture = nn::ArchitectureDescriptor::tiny();
  data::PhantomConfig phantom;
  CorpusConfig corpus;
  TrainRun pretrain = TrainRun::defaults(RunMode::pretrain);
  TrainRun linear_probe = TrainRun::defaults(RunMode::linear_finetune);
  TrainRun finetune = TrainRun::defaults(RunMode::semisup_finetune);
  std::vector<ArmConfig> arms;
  /// Test cores rendered as heatmaps per arm (first repeat only).
  int heatmaps = 2;

  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig experiment_from_json(const nlohmann::json& j);

/// A patch position inside one of the corpus cores.
struct WindowRef {
  std::size_t core = 0;
  data::Window window;
};

/// Phantom cores, their patient split and the patch sets of one repeat.
struct Corpus {
  std::vector<data::BiopsyCore> cores;
  data::SplitManifest split;
  std::vector<WindowRef> unlabeled;
  std::vector<WindowRef> labeled;
  std::vector<int> labeled_classes;
  std::vector<std::size_t> val_cores;
  std::vector<std::size_t> test_cores;
};

Corpus build_corpus(const ExperimentConfig& config, std::uint64_t repeat_seed);

using Logger = std::function<void(const std::string&)>;

/// Seed of repeat r, derived from the experiment seed.
std::uint64_t repeat_seed(std::uint64_t seed, int repeat);

/// Runs every arm for every repeat and writes report.json plus the CSV and
/// heatmap side files into out_dir. A failing arm is recorded with its error
/// and the run continues. Returns the report.
nlohmann::json run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                              const Logger& log = {});

/// (mean, std) of the column envelopes of a raw frame window.
std::pair<double, double> envelope_summary(const data::RfFrame& frame, const data::Window& window);

}  // namespace rfssl::train
