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

#include "rfssl/data/types.hpp"

namespace rfssl::data {

struct SplitConfig {
  double test_cancer_fraction = 0.25;
  /// Share of the remaining (non-test) patients moved to validation.
  double validation_fraction = 0.2;

  void validate() const;
};

/// Patients are visited in a seeded random order and moved to the test set
/// until it holds at least test_cancer_fraction of all cancer cores; the rest
/// are split between train and validation. Requires two or more patients with
/// cancer cores.
SplitManifest split_patients(const std::vector<CoreInfo>& cores, const SplitConfig& config,
                             std::uint64_t seed);

/// Drops cancer cores with involvement below min_involvement (the boundary is
/// kept), then optionally subsamples benign cores down to the cancer count.
/// Survivors keep their input order.
std::vector<CoreInfo> balance_and_filter(const std::vector<CoreInfo>& cores, double min_involvement,
                                         bool balance, std::uint64_t seed);

/// Cores whose patient belongs to the given split list.
std::vector<CoreInfo> cores_of(const std::vector<CoreInfo>& cores,
                               const std::vector<std::string>& patients);

}  // namespace rfssl::data
