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
#include <vector>

#include "rfssl/nn/gradcheck.hpp"

namespace rfssl::train {

/// Finite-difference checks for every differentiable layer, the micro model
/// end to end, the classification loss and the three SSL objectives. One
/// result per checked tensor.
std::vector<nn::GradcheckResult> run_gradcheck_suite(std::uint64_t seed, double tolerance = 1e-5,
                                                     double step = 1e-4);

}  // namespace rfssl::train
