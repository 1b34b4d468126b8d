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

#include <cstdint>
#include <string>
#include <vector>

#include "rfssl/nn/model.hpp"
#include "rfssl/nn/optim.hpp"
#include "rfssl/nn/schedule.hpp"
#include "rfssl/signal/augment.hpp"
#include "rfssl/ssl/losses.hpp"

namespace rfssl::train {

enum class RunMode { pretrain, linear_finetune, semisup_finetune, supervised };
enum class SslLoss { vicreg, simclr, byol };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& name);
std::string to_string(SslLoss loss);
SslLoss ssl_loss_from_string(const std::string& name);

struct TrainRun {
  RunMode mode = RunMode::pretrain;
  int epochs = 200;
  int batch_size = 64;
  /// The schedule's total length is always `epochs`; warmup is clamped to it.
  double base_lr = 1e-4;
  int warmup_epochs = 10;
  nn::OptimizerConfig optimizer;
  std::uint64_t seed = 0;
  signal::AugmentationConfig augmentation;
  SslLoss loss = SslLoss::vicreg;
  ssl::VicregWeights vicreg;
  double temperature = 0.1;
  double ema_decay = 0.99;

  /// 200 epochs for pretraining, 50 for the finetuning modes.
  static TrainRun defaults(RunMode mode);
  nn::ScheduleConfig schedule() const;
  void validate() const;
};

/// Freeze flags implied by the mode: linear finetuning trains only the
/// classifier; the other finetuning modes train backbone and classifier.
nn::FreezeFlags freeze_for(RunMode mode);

/// Stacks equally sized patches into an {N, 1, H, W} batch.
nn::Tensor stack_patches(const std::vector<const signal::Patch*>& patches);

/// Seeded Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng);

}  // namespace rfssl::train
