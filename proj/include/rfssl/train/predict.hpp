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

#include <vector>

#include "rfssl/data/extract.hpp"
#include "rfssl/nn/model.hpp"
#include "rfssl/train/metrics.hpp"

namespace rfssl::train {

using PatchRefs = std::vector<const signal::Patch*>;

/// Inference runs in chunks of this many patches. The chunking depends only
/// on the patch list, so results do not depend on the thread count.
inline constexpr int kEvalChunk = 32;

/// Eval-mode backbone features {N, d_h}.
nn::Tensor infer_features(const nn::ModelState& model, const PatchRefs& patches);
/// Class-1 probabilities from precomputed features.
std::vector<double> classify_features(const nn::ModelState& model, const nn::Tensor& features);
std::vector<double> predict_probabilities(const nn::ModelState& model, const PatchRefs& patches);

/// Eval-mode projector outputs, averaged per-column population std.
double mean_embedding_std(const nn::ModelState& model, const PatchRefs& patches);

/// A core's needle-region patches, extracted once and reused across epochs.
struct EvalCore {
  data::CoreInfo info;
  std::vector<signal::Patch> patches;
};

EvalCore make_eval_core(const data::BiopsyCore& core, const data::ExtractionConfig& config);

CorePrediction predict_eval_core(const nn::ModelState& model, const EvalCore& core,
                                 double threshold = kDecisionThreshold);

/// Classifies every needle-and-prostate window of the core. A core without
/// qualifying windows yields an empty prediction.
CorePrediction predict_core(const nn::ModelState& model, const data::BiopsyCore& core,
                            const data::ExtractionConfig& config, double threshold = kDecisionThreshold);

std::vector<CorePrediction> predict_cores(const nn::ModelState& model, const std::vector<EvalCore>& cores,
                                          int threads, double threshold = kDecisionThreshold);

}  // namespace rfssl::train
