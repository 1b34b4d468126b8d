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

#include "rfssl/train/trainer.hpp"

#include <cmath>
#include <optional>

#include "rfssl/nn/loss.hpp"
#include "rfssl/ssl/byol.hpp"
#include "rfssl/ssl/losses.hpp"

namespace rfssl::train {

using nn::Head;
using nn::Mode;
using nn::Tensor;

namespace {

Tensor augmented_batch(const PatchRefs& patches, const std::vector<std::size_t>& order, std::size_t begin,
                       std::size_t end, const signal::AugmentationConfig& config, Rng& rng,
                       std::vector<signal::Patch>& scratch) {
  scratch.clear();
  for (std::size_t i = begin; i < end; ++i) scratch.push_back(signal::augment(*patches[order[i]], config, rng));
  PatchRefs refs;
  for (const auto& p : scratch) refs.push_back(&p);
  return stack_patches(refs);
}

double two_view_step(const TrainRun& run, nn::ModelState& model, const Tensor& v1, const Tensor& v2,
                     nn::OptimizerState& opt, const std::vector<nn::Parameter*>& params, double lr) {
  model.zero_grad();
  nn::ForwardCache c1, c2;
  const Tensor z1 = nn::forward_heads(model, nn::forward_backbone(model, v1, Mode::train, &c1), Head::projector,
                                      Mode::train, &c1);
  const Tensor z2 = nn::forward_heads(model, nn::forward_backbone(model, v2, Mode::train, &c2), Head::projector,
                                      Mode::train, &c2);
  double loss = 0.0;
  Tensor g1, g2;
  if (run.loss == SslLoss::vicreg) {
    auto r = ssl::vicreg_loss(z1, z2, run.vicreg);
    loss = r.total;
    g1 = std::move(r.grad_z);
    g2 = std::move(r.grad_zp);
  } else {
    auto r = ssl::nt_xent_loss(z1, z2, run.temperature);
    loss = r.loss;
    g1 = std::move(r.grad_a);
    g2 = std::move(r.grad_b);
  }
  if (!std::isfinite(loss)) return loss;
  nn::backward_backbone(model, c1, nn::backward_heads(model, c1, g1));
  nn::backward_backbone(model, c2, nn::backward_heads(model, c2, g2));
  nn::optimizer_step(opt, params, lr);
  return loss;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> batch_ranges(std::size_t n, int batch_size) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t b = 0; b < n; b += static_cast<std::size_t>(batch_size)) {
    const std::size_t e = std::min(n, b + static_cast<std::size_t>(batch_size));
    if (e - b >= 2) out.emplace_back(b, e);
  }
  return out;
}

PretrainResult pretrain(const TrainRun& run, const PatchRefs& patches, nn::ModelState& model,
                        const EpochCallback& on_epoch) {
  run.validate();
  if (run.mode != RunMode::pretrain) throw ConfigError("pretrain: run mode must be pretrain");
  if (patches.size() < 2) throw InvalidArgument("pretrain: need at least two patches");
  for (const auto* p : patches)
    if (p->rows() != model.arch.input_size || p->cols() != model.arch.input_size)
      throw ShapeMismatch("pretrain: patch size does not match the architecture input");

  model.freeze = freeze_for(RunMode::pretrain);
  Rng shuffle_rng = Rng::substream(run.seed, "shuffle");
  Rng augment_rng = Rng::substream(run.seed, "augment");
  nn::OptimizerState opt(run.optimizer);
  std::optional<ssl::ByolState> byol;
  if (run.loss == SslLoss::byol) {
    Rng init = Rng::substream(run.seed, "init.predictor");
    byol = ssl::make_byol_state(model, run.ema_decay, init);
  }
  const auto params = byol ? ssl::byol_trainable(model, *byol) : model.trainable_parameters();
  const auto schedule = run.schedule();

  PretrainResult result;
  std::vector<signal::Patch> scratch;
  for (int epoch = 0; epoch < run.epochs; ++epoch) {
    const double lr = nn::lr_at_epoch(schedule, epoch);
    const auto order = shuffled_indices(patches.size(), shuffle_rng);
    std::vector<double> losses;
    for (const auto& [b, e] : batch_ranges(patches.size(), run.batch_size)) {
      const Tensor v1 = augmented_batch(patches, order, b, e, run.augmentation, augment_rng, scratch);
      const Tensor v2 = augmented_batch(patches, order, b, e, run.augmentation, augment_rng, scratch);
      double loss = 0.0;
      try {
        loss = byol ? ssl::byol_step(model, *byol, v1, v2, opt, lr) : two_view_step(run, model, v1, v2, opt, params, lr);
      } catch (const NumericError& err) {
        throw NumericError("pretrain diverged (" + to_string(run.loss) + ", epoch " + std::to_string(epoch) +
                           ", batch starting at " + std::to_string(b) + "): " + err.what());
      }
      if (!std::isfinite(loss))
        throw NumericError("pretrain diverged (" + to_string(run.loss) + ", epoch " + std::to_string(epoch) +
                           ", batch starting at " + std::to_string(b) + "): non-finite loss");
      losses.push_back(loss);
    }
    result.loss_curve.push_back(mean_of(losses));
    if (on_epoch) on_epoch(epoch, result.loss_curve.back());
  }
  model.check_finite();
  model.zero_grad();
  return result;
}

FinetuneResult finetune(const TrainRun& run, const LabeledSet& train, nn::ModelState& model,
                        const Validator& validate, const EpochCallback& on_epoch) {
  run.validate();
  if (run.mode == RunMode::pretrain) throw ConfigError("finetune: run mode must be a finetuning mode");
  if (train.patches.size() != train.labels.size()) throw ShapeMismatch("finetune: patches and labels differ in length");
  const auto positives = std::count(train.labels.begin(), train.labels.end(), 1);
  const auto negatives = std::count(train.labels.begin(), train.labels.end(), 0);
  if (positives == 0 || negatives == 0) throw InvalidArgument("finetune: training set lacks one of the classes");
  if (positives + negatives != static_cast<long>(train.labels.size()))
    throw InvalidArgument("finetune: labels must be 0 or 1");

  model.freeze = freeze_for(run.mode);
  const bool linear = run.mode == RunMode::linear_finetune;
  Rng shuffle_rng = Rng::substream(run.seed, "shuffle");
  nn::OptimizerState opt(run.optimizer);
  const auto params = model.trainable_parameters();
  const auto schedule = run.schedule();
  // A frozen backbone in eval mode is a fixed feature map, so the features
  // are computed once.
  const Tensor features = linear ? infer_features(model, train.patches) : Tensor();
  const int d = model.arch.embedding_dim();

  FinetuneResult result;
  std::optional<nn::ModelState> best;
  double best_auroc = -1.0;
  for (int epoch = 0; epoch < run.epochs; ++epoch) {
    const double lr = nn::lr_at_epoch(schedule, epoch);
    const auto order = shuffled_indices(train.patches.size(), shuffle_rng);
    std::vector<double> losses;
    for (const auto& [b, e] : batch_ranges(train.patches.size(), run.batch_size)) {
      std::vector<int> labels;
      for (std::size_t i = b; i < e; ++i) labels.push_back(train.labels[order[i]]);
      model.zero_grad();
      nn::ForwardCache cache;
      Tensor h;
      if (linear) {
        h = Tensor({static_cast<int>(e - b), d});
        for (std::size_t i = b; i < e; ++i)
          std::copy_n(features.data() + order[i] * static_cast<std::size_t>(d), d,
                      h.data() + (i - b) * static_cast<std::size_t>(d));
      } else {
        PatchRefs refs;
        for (std::size_t i = b; i < e; ++i) refs.push_back(train.patches[order[i]]);
        h = nn::forward_backbone(model, stack_patches(refs), Mode::train, &cache);
      }
      const Tensor logits = nn::forward_heads(model, h, Head::classifier, Mode::train, &cache);
      const auto ce = nn::cross_entropy(logits, labels);
      if (!std::isfinite(ce.loss))
        throw NumericError("finetune diverged at epoch " + std::to_string(epoch) + ": non-finite loss");
      const Tensor dh = nn::backward_heads(model, cache, ce.grad);
      if (!linear) nn::backward_backbone(model, cache, dh);
      nn::optimizer_step(opt, params, lr);
      losses.push_back(ce.loss);
    }
    result.train_loss.push_back(mean_of(losses));
    const double val = validate ? validate(model) : std::nan("");
    result.val_auroc.push_back(val);
    if (std::isfinite(val) && val > best_auroc) {
      best_auroc = val;
      model.zero_grad();
      best = model;
      result.best_epoch = epoch;
    }
    if (on_epoch) on_epoch(epoch, result.train_loss.back());
  }
  if (best) model = std::move(*best);
  model.zero_grad();
  model.check_finite();
  return result;
}

}  // namespace rfssl::train
