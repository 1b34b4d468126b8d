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

#include "rfssl/nn/model.hpp"
#include "rfssl/nn/optim.hpp"

namespace rfssl::ssl {

/// Momentum teacher and the online predictor q.
struct ByolState {
  nn::ModelState target;
  nn::Mlp predictor;
  double ema_decay = 0.99;
};

/// Target starts as a copy of the online network; the predictor has the
/// projector's shape (out -> hidden -> out).
ByolState make_byol_state(const nn::ModelState& online, double ema_decay, Rng& init_rng);

/// target <- decay * target + (1 - decay) * online, over backbone and
/// projector parameters. Throws on architecture mismatch.
void ema_update(nn::ModelState& target, nn::ModelState& online, double decay);

/// Online + predictor parameters, in optimizer order.
std::vector<nn::Parameter*> byol_trainable(nn::ModelState& online, ByolState& state);

/// One symmetrized BYOL update: loss = L(q(g(f(v1))), g'(f'(v2))) +
/// L(q(g(f(v2))), g'(f'(v1))) with L = 2 - 2 mean cos. Backpropagates into
/// the online network and predictor, applies the optimizer, then the EMA.
/// The target receives no gradient. Returns the loss.
double byol_step(nn::ModelState& online, ByolState& state, const nn::Tensor& view1,
                 const nn::Tensor& view2, nn::OptimizerState& opt, double lr);

}  // namespace rfssl::ssl
