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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rfssl/core/array2d.hpp"
#include "rfssl/signal/image_ops.hpp"

namespace rfssl::data {

inline constexpr int kCanonicalAxialSamples = 10016;
inline constexpr int kCanonicalLateralLines = 512;
inline constexpr double kCanonicalAxialExtentMm = 28.0;
inline constexpr double kCanonicalLateralExtentMm = 46.0;

/// One RF frame. Rows are axial samples, columns are RF lines.
struct RfFrame {
  Array2D samples;
  double lateral_extent_mm = kCanonicalLateralExtentMm;
  double axial_extent_mm = kCanonicalAxialExtentMm;
  std::string frame_id;

  int axial_count() const noexcept { return samples.rows(); }
  int lateral_count() const noexcept { return samples.cols(); }
  void validate() const;

  friend bool operator==(const RfFrame&, const RfFrame&) = default;
};

enum class Region { prostate, needle };

std::string_view to_string(Region region);
Region region_from_string(std::string_view name);

struct RegionMask {
  Mask2D mask;
  Region kind = Region::prostate;

  friend bool operator==(const RegionMask&, const RegionMask&) = default;
};

/// Per-core metadata without pixel data; splitting and balancing only need
/// this part.
struct CoreInfo {
  std::string core_id;
  std::string patient_id;
  int label = 0;
  double involvement_percent = 0.0;
  std::optional<int> gleason_score;

  void validate() const;

  friend bool operator==(const CoreInfo&, const CoreInfo&) = default;
};

struct BiopsyCore {
  CoreInfo info;
  RfFrame frame;
  RegionMask prostate_mask{{}, Region::prostate};
  RegionMask needle_mask{{}, Region::needle};

  void validate() const;

  friend bool operator==(const BiopsyCore&, const BiopsyCore&) = default;
};

struct PatchRecord {
  signal::Patch patch;
  std::string core_id;
  std::string patient_id;
  double axial_origin_mm = 0.0;
  double lateral_origin_mm = 0.0;
  int weak_label = 0;
  Region region = Region::prostate;
  double involvement_percent = 0.0;

  friend bool operator==(const PatchRecord&, const PatchRecord&) = default;
};

/// Patient-level partition. Each list is sorted and the three are pairwise
/// disjoint.
struct SplitManifest {
  std::vector<std::string> train_patients;
  std::vector<std::string> val_patients;
  std::vector<std::string> test_patients;
  std::uint64_t seed = 0;

  void validate() const;

  friend bool operator==(const SplitManifest&, const SplitManifest&) = default;
};

std::vector<CoreInfo> core_infos(const std::vector<BiopsyCore>& cores);

/// Rounds every value to the nearest float so that float32 storage is lossless.
void quantize_to_float(Array2D& values);

}  // namespace rfssl::data
