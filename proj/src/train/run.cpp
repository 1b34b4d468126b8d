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

#include "rfssl/train/run.hpp"

#include <algorithm>
#include <numeric>

namespace rfssl::train {

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::pretrain: return "pretrain";
    case RunMode::linear_finetune: return "linear_finetune";
    case RunMode::semisup_finetune: return "semisup_finetune";
    case RunMode::supervised: return "supervised";
  }
  return "unknown";
}

RunMode run_mode_from_string(const std::string& name) {
  for (RunMode m : {RunMode::pretrain, RunMode::linear_finetune, RunMode::semisup_finetune, RunMode::supervised})
    if (to_string(m) == name) return m;
  throw ConfigError("unknown run mode '" + name + "'");
}

std::string to_string(SslLoss loss) {
  switch (loss) {
    case SslLoss::vicreg: return "vicreg";
    case SslLoss::simclr: return "simclr";
    case SslLoss::byol: return "byol";
  }
  return "unknown";
}

SslLoss ssl_loss_from_string(const std::string& name) {
  for (SslLoss l : {SslLoss::vicreg, SslLoss::simclr, SslLoss::byol})
    if (to_string(l) == name) return l;
  throw ConfigError("unknown loss '" + name + "'");
}

TrainRun TrainRun::defaults(RunMode mode) {
  TrainRun r;
  r.mode = mode;
  r.epochs = mode == RunMode::pretrain ? 200 : 50;
  return r;
}

nn::ScheduleConfig TrainRun::schedule() const {
  return {base_lr, std::min(warmup_epochs, epochs), epochs};
}

void TrainRun::validate() const {
  if (epochs < 1) throw ConfigError("train: epochs must be at least 1");
  if (batch_size < 2) throw ConfigError("train: batch_size must be at least 2");
  if (!(base_lr > 0.0)) throw ConfigError("train: base_lr must be positive");
  if (warmup_epochs < 1) throw ConfigError("train: warmup_epochs must be at least 1");
  if (!(temperature > 0.0)) throw ConfigError("train: temperature must be positive");
  if (!(ema_decay >= 0.0 && ema_decay < 1.0)) throw ConfigError("train: ema_decay must lie in [0, 1)");
  schedule().validate();
  optimizer.validate();
  augmentation.validate();
  vicreg.validate();
}

nn::FreezeFlags freeze_for(RunMode mode) {
  switch (mode) {
    case RunMode::linear_finetune: return {true, true, false};
    case RunMode::semisup_finetune:
    case RunMode::supervised: return {false, true, false};
    case RunMode::pretrain: return {false, false, true};
  }
  return {};
}

nn::Tensor stack_patches(const std::vector<const signal::Patch*>& patches) {
  if (patches.empty()) throw InvalidArgument("stack_patches: empty batch");
  const int h = patches.front()->rows(), w = patches.front()->cols();
  nn::Tensor batch({static_cast<int>(patches.size()), 1, h, w});
  std::size_t offset = 0;
  for (const auto* p : patches) {
    if (p->rows() != h || p->cols() != w) throw ShapeMismatch("stack_patches: patch sizes differ");
    std::copy(p->values().begin(), p->values().end(), batch.values().begin() + static_cast<std::ptrdiff_t>(offset));
    offset += p->size();
  }
  return batch;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = n; i > 1; --i)
    std::swap(idx[i - 1], idx[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i - 1)))]);
  return idx;
}

}  // namespace rfssl::train
