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

#include "rfssl/nn/loss.hpp"

#include <algorithm>
#include <cmath>

#include "rfssl/core/error.hpp"

namespace rfssl::nn {

ClassificationLoss cross_entropy(const Tensor& logits, const std::vector<int>& labels) {
  if (logits.rank() != 2 || static_cast<std::size_t>(logits.dim(0)) != labels.size() || labels.empty())
    throw ShapeMismatch("cross_entropy: logits " + logits.shape_string() + " vs " +
                        std::to_string(labels.size()) + " labels");
  const int n = logits.dim(0), k = logits.dim(1);
  ClassificationLoss out{0.0, Tensor(logits.shape())};
  for (int i = 0; i < n; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= k) throw InvalidArgument("cross_entropy: label out of range");
    const double* row = logits.data() + static_cast<std::size_t>(i) * k;
    const double peak = *std::max_element(row, row + k);
    double z = 0.0;
    for (int c = 0; c < k; ++c) z += std::exp(row[c] - peak);
    const double log_z = peak + std::log(z);
    out.loss += log_z - row[y];
    for (int c = 0; c < k; ++c) {
      const double p = std::exp(row[c] - log_z);
      out.grad[static_cast<std::size_t>(i) * k + c] = (p - (c == y ? 1.0 : 0.0)) / n;
    }
  }
  out.loss /= n;
  return out;
}

}  // namespace rfssl::nn
