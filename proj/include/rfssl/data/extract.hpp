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

#include "rfssl/data/types.hpp"

namespace rfssl::data {

struct SampleCount {
  int lines = 0;
  int samples = 0;

  friend bool operator==(const SampleCount&, const SampleCount&) = default;
};

/// Converts a physical size to (RF lines, axial samples) by rounding to the
/// nearest integer. Rejects non-positive sizes and sizes beyond the frame.
SampleCount mm_to_samples(const RfFrame& frame, double mm_lateral, double mm_axial);

struct ExtractionConfig {
  double patch_mm = 5.0;
  double stride_mm = 5.0;
  double needle_overlap_min = 0.66;
  double prostate_overlap_min = 0.9;
  int output_size = signal::kCanonicalPatchSize;

  void validate() const;
};

/// Window placement in pixels together with its physical origin.
struct Window {
  int axial_start = 0;
  int lateral_start = 0;
  int axial_size = 0;
  int lateral_size = 0;
  double axial_origin_mm = 0.0;
  double lateral_origin_mm = 0.0;
};

/// All grid windows lying fully inside the frame, in axial-major order.
std::vector<Window> grid_windows(const RfFrame& frame, double patch_mm, double stride_mm);

/// Number of set mask pixels in a window, via a summed-area table.
class MaskCounter {
 public:
  explicit MaskCounter(const Mask2D& mask);
  long long count(const Window& w) const;

 private:
  int cols_ = 0;
  std::vector<long long> table_;
};

/// Windows whose overlap with the requested region passes the thresholds.
std::vector<Window> qualifying_windows(const BiopsyCore& core, Region region,
                                       const ExtractionConfig& config);

/// Crop, resize to output_size, instance-normalize and round to float.
signal::Patch make_patch(const RfFrame& frame, const Window& window, int output_size);

std::vector<PatchRecord> extract_patches(const BiopsyCore& core, Region region,
                                         const ExtractionConfig& config = {});

}  // namespace rfssl::data
