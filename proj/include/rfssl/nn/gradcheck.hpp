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
#include <span>
#include <string>
#include <vector>

namespace rfssl::nn {

struct GradcheckResult {
  std::string name;
  std::size_t elements = 0;
  double relative_error = 0.0;
  bool passed = false;
};

/// Central finite differences of `loss` w.r.t. every entry of `values`
/// (perturbed in place and restored), compared with `analytic` as
/// |a - f| / max(|a|, |f|, floor) over the whole tensor.
double finite_difference_error(std::span<double> values, std::span<const double> analytic,
                               const std::function<double()>& loss, double step = 1e-4,
                               double floor = 1e-8);

}  // namespace rfssl::nn
