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

#include <functional>
#include <vector>

#include "rfssl/train/predict.hpp"
#include "rfssl/train/run.hpp"

namespace rfssl::train {

/// Called after every epoch with the epoch index and its mean loss.
using EpochCallback = std::function<void(int epoch, double loss)>;

struct PretrainResult {
  std::vector<double> loss_curve;
};

/// Self-supervised pretraining of backbone and projector. Each epoch
/// shuffles the patches, draws two augmentations per patch and steps the
/// optimizer once per mini-batch. A non-finite loss aborts with NumericError.
PretrainResult pretrain(const TrainRun& run, const PatchRefs& patches, nn::ModelState& model,
                        const EpochCallback& on_epoch = {});

struct LabeledSet {
  PatchRefs patches;
  std::vector<int> labels;
};

/// Returns the validation AUROC of a model, or NaN when it is undefined.
using Validator = std::function<double(const nn::ModelState&)>;

struct FinetuneResult {
  std::vector<double> train_loss;
  std::vector<double> val_auroc;
  /// Epoch whose weights were restored; -1 when no validation score existed.
  int best_epoch = -1;
};

/// Cross-entropy training of the classifier (and the backbone unless the mode
/// is linear_finetune). With a validator the model is restored to the epoch
/// with the highest validation AUROC (earliest on ties).
FinetuneResult finetune(const TrainRun& run, const LabeledSet& train, nn::ModelState& model,
                        const Validator& validate = {}, const EpochCallback& on_epoch = {});

/// Contiguous [begin, end) batches; a trailing batch of one is dropped.
std::vector<std::pair<std::size_t, std::size_t>> batch_ranges(std::size_t n, int batch_size);

}  // namespace rfssl::train
