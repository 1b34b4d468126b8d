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

#include "rfssl/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "rfssl/core/error.hpp"

namespace rfssl::nn {

double finite_difference_error(std::span<double> values, std::span<const double> analytic,
                               const std::function<double()>& loss, double step, double floor) {
  if (values.size() != analytic.size()) throw ShapeMismatch("gradcheck: gradient size mismatch");
  double diff2 = 0.0, a2 = 0.0, f2 = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + step;
    const double up = loss();
    values[i] = saved - step;
    const double down = loss();
    values[i] = saved;
    const double numeric = (up - down) / (2.0 * step);
    diff2 += (numeric - analytic[i]) * (numeric - analytic[i]);
    a2 += analytic[i] * analytic[i];
    f2 += numeric * numeric;
  }
  return std::sqrt(diff2) / std::max({std::sqrt(a2), std::sqrt(f2), floor});
}

}  // namespace rfssl::nn
