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

#include "rfssl/train/predict.hpp"

#include <algorithm>
#include <cmath>

#include "rfssl/core/parallel.hpp"
#include "rfssl/train/run.hpp"

namespace rfssl::train {

namespace {

template <class Fn>
nn::Tensor chunked_rows(std::size_t n, int width, Fn&& rows_for_chunk) {
  nn::Tensor out({static_cast<int>(n), width});
  for (std::size_t start = 0; start < n; start += kEvalChunk) {
    const std::size_t end = std::min(n, start + kEvalChunk);
    const nn::Tensor part = rows_for_chunk(start, end);
    std::copy(part.values().begin(), part.values().end(),
              out.values().begin() + static_cast<std::ptrdiff_t>(start * static_cast<std::size_t>(width)));
  }
  return out;
}

PatchRefs refs_of(const std::vector<signal::Patch>& patches) {
  PatchRefs refs;
  for (const auto& p : patches) refs.push_back(&p);
  return refs;
}

}  // namespace

nn::Tensor infer_features(const nn::ModelState& model, const PatchRefs& patches) {
  return chunked_rows(patches.size(), model.arch.embedding_dim(), [&](std::size_t a, std::size_t b) {
    const PatchRefs chunk(patches.begin() + static_cast<std::ptrdiff_t>(a), patches.begin() + static_cast<std::ptrdiff_t>(b));
    return nn::infer_backbone(model, stack_patches(chunk));
  });
}

std::vector<double> classify_features(const nn::ModelState& model, const nn::Tensor& features) {
  if (features.size() == 0) return {};
  return nn::softmax_positive(nn::infer_heads(model, features, nn::Head::classifier));
}

std::vector<double> predict_probabilities(const nn::ModelState& model, const PatchRefs& patches) {
  if (patches.empty()) return {};
  return classify_features(model, infer_features(model, patches));
}

double mean_embedding_std(const nn::ModelState& model, const PatchRefs& patches) {
  if (patches.size() < 2) throw InvalidArgument("mean_embedding_std: need at least two patches");
  const int d = model.arch.projector_out;
  const nn::Tensor z = chunked_rows(patches.size(), d, [&](std::size_t a, std::size_t b) {
    const PatchRefs chunk(patches.begin() + static_cast<std::ptrdiff_t>(a), patches.begin() + static_cast<std::ptrdiff_t>(b));
    return nn::infer_heads(model, nn::infer_backbone(model, stack_patches(chunk)), nn::Head::projector);
  });
  const auto n = static_cast<double>(patches.size());
  double total = 0.0;
  for (int j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < patches.size(); ++i) mean += z[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)];
    mean /= n;
    double var = 0.0;
    for (std::size_t i = 0; i < patches.size(); ++i) {
      const double e = z[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] - mean;
      var += e * e;
    }
    total += std::sqrt(var / n);
  }
  return total / d;
}

EvalCore make_eval_core(const data::BiopsyCore& core, const data::ExtractionConfig& config) {
  EvalCore out;
  out.info = core.info;
  for (const auto& w : data::qualifying_windows(core, data::Region::needle, config))
    out.patches.push_back(data::make_patch(core.frame, w, config.output_size));
  return out;
}

CorePrediction predict_eval_core(const nn::ModelState& model, const EvalCore& core, double threshold) {
  return make_core_prediction(core.info.core_id, predict_probabilities(model, refs_of(core.patches)),
                              core.info.label, core.info.involvement_percent, threshold);
}

CorePrediction predict_core(const nn::ModelState& model, const data::BiopsyCore& core,
                            const data::ExtractionConfig& config, double threshold) {
  return predict_eval_core(model, make_eval_core(core, config), threshold);
}

std::vector<CorePrediction> predict_cores(const nn::ModelState& model, const std::vector<EvalCore>& cores,
                                          int threads, double threshold) {
  std::vector<CorePrediction> out(cores.size());
  parallel_for(cores.size(), threads,
               [&](std::size_t i) { out[i] = predict_eval_core(model, cores[i], threshold); });
  return out;
}

}  // namespace rfssl::train
