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

#include "rfssl/ssl/byol.hpp"

#include <cmath>

#include "rfssl/core/error.hpp"
#include "rfssl/ssl/losses.hpp"

namespace rfssl::ssl {

using nn::Head;
using nn::Mode;
using nn::Tensor;

ByolState make_byol_state(const nn::ModelState& online, double ema_decay, Rng& init_rng) {
  if (!(ema_decay >= 0.0 && ema_decay < 1.0)) throw ConfigError("byol: ema_decay must lie in [0, 1)");
  ByolState s;
  s.target = online;
  s.target.zero_grad();
  const int out = online.arch.projector_out;
  s.predictor = nn::Mlp("predictor", out, online.arch.projector_hidden, out);
  s.predictor.init(init_rng);
  s.ema_decay = ema_decay;
  return s;
}

void ema_update(nn::ModelState& target, nn::ModelState& online, double decay) {
  if (!(target.arch == online.arch)) throw InvalidArgument("byol: online and target architectures differ");
  if (!(decay >= 0.0 && decay < 1.0)) throw InvalidArgument("byol: ema decay must lie in [0, 1)");
  auto tp = target.backbone_parameters();
  auto op = online.backbone_parameters();
  for (auto* p : target.projector_parameters()) tp.push_back(p);
  for (auto* p : online.projector_parameters()) op.push_back(p);
  for (std::size_t i = 0; i < tp.size(); ++i) {
    auto t = tp[i]->value.values();
    const auto o = op[i]->value.values();
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = decay * t[k] + (1.0 - decay) * o[k];
  }
}

std::vector<nn::Parameter*> byol_trainable(nn::ModelState& online, ByolState& state) {
  auto params = online.backbone_parameters();
  for (auto* p : online.projector_parameters()) params.push_back(p);
  std::vector<nn::Buffer*> unused;
  state.predictor.collect(params, unused);
  return params;
}

double byol_step(nn::ModelState& online, ByolState& state, const Tensor& view1, const Tensor& view2,
                 nn::OptimizerState& opt, double lr) {
  if (!(state.target.arch == online.arch)) throw InvalidArgument("byol: online and target architectures differ");
  const Tensor* views[2] = {&view1, &view2};

  // Targets never record activations, so no gradient can reach them.
  Tensor targets[2];
  for (int v = 0; v < 2; ++v) {
    const Tensor h = nn::forward_backbone(state.target, *views[v], Mode::train, nullptr);
    targets[v] = nn::forward_heads(state.target, h, Head::projector, Mode::train, nullptr);
  }

  const auto params = byol_trainable(online, state);
  for (auto* p : params) p->zero_grad();
  double loss = 0.0;
  for (int v = 0; v < 2; ++v) {
    nn::ForwardCache cache;
    nn::Mlp::Cache pred_cache;
    const Tensor h = nn::forward_backbone(online, *views[v], Mode::train, &cache);
    const Tensor z = nn::forward_heads(online, h, Head::projector, Mode::train, &cache);
    const Tensor q = state.predictor.forward(z, Mode::train, &pred_cache);
    const PairLoss l = byol_cosine_loss(q, targets[1 - v]);
    loss += l.loss;
    const Tensor dz = state.predictor.backward(pred_cache, l.grad_a, true, true);
    nn::backward_backbone(online, cache, nn::backward_heads(online, cache, dz));
  }
  if (!std::isfinite(loss)) throw NumericError("byol: non-finite loss");
  nn::optimizer_step(opt, params, lr);
  ema_update(state.target, online, state.ema_decay);
  return loss;
}

}  // namespace rfssl::ssl
