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

#include "rfssl/nn/tensor.hpp"

namespace rfssl::nn {

enum class OptimizerKind { adam, novograd };

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(const std::string& name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;

  /// Adam: (0.9, 0.999, 1e-8). NovoGrad: (0.95, 0.98, 1e-8). wd 0 for both.
  static OptimizerConfig defaults(OptimizerKind kind);
  void validate() const;
};

/// Moments are indexed by position in the parameter list passed to each step,
/// so callers must pass the same list every time. Adam keeps elementwise
/// second moments; NovoGrad keeps one scalar per parameter tensor.
struct OptimizerState {
  OptimizerConfig config;
  std::int64_t step = 0;
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;

  OptimizerState() = default;
  explicit OptimizerState(OptimizerConfig cfg) : config(cfg) {}
};

/// Bias-corrected Adam. Parameters without a gradient are left untouched.
/// Throws NumericError before modifying anything if a gradient is non-finite.
void adam_step(OptimizerState& opt, const std::vector<Parameter*>& params, double lr);

/// Per-tensor NovoGrad:
///   v <- b2 v + (1 - b2) |g|^2
///   m <- b1 m + g / (sqrt(v) + eps) + wd w
///   w <- w - lr m
void novograd_step(OptimizerState& opt, const std::vector<Parameter*>& params, double lr);

void optimizer_step(OptimizerState& opt, const std::vector<Parameter*>& params, double lr);

}  // namespace rfssl::nn
