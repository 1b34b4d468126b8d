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

#include "rfssl/nn/tensor.hpp"

namespace rfssl::nn {

struct ClassificationLoss {
  double loss = 0.0;
  Tensor grad;  // dL/dlogits
};

/// Mean softmax cross entropy of {N,K} logits against integer labels.
ClassificationLoss cross_entropy(const Tensor& logits, const std::vector<int>& labels);

}  // namespace rfssl::nn
