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

#include "rfssl/data/types.hpp"

#include <algorithm>
#include <cmath>

namespace rfssl::data {

void RfFrame::validate() const {
  if (samples.rows() < 1 || samples.cols() < 1) throw InvalidArgument("RfFrame: empty sample array");
  if (!(lateral_extent_mm > 0.0) || !(axial_extent_mm > 0.0) || !std::isfinite(lateral_extent_mm) ||
      !std::isfinite(axial_extent_mm))
    throw InvalidArgument("RfFrame: extents must be positive");
}

std::string_view to_string(Region region) {
  return region == Region::prostate ? "prostate" : "needle";
}

Region region_from_string(std::string_view name) {
  if (name == "prostate") return Region::prostate;
  if (name == "needle") return Region::needle;
  throw InvalidArgument("unknown region '" + std::string(name) + "'");
}

void CoreInfo::validate() const {
  if (label != 0 && label != 1) throw InvalidArgument("core " + core_id + ": label must be 0 or 1");
  if (!(involvement_percent >= 0.0 && involvement_percent <= 100.0))
    throw InvalidArgument("core " + core_id + ": involvement must lie in [0, 100]");
  if (label == 0 && involvement_percent != 0.0)
    throw InvalidArgument("core " + core_id + ": benign core with nonzero involvement");
}

void BiopsyCore::validate() const {
  info.validate();
  frame.validate();
  if (prostate_mask.kind != Region::prostate || needle_mask.kind != Region::needle)
    throw InvalidArgument("core " + info.core_id + ": mask kinds swapped");
  const auto fits = [&](const Mask2D& m) {
    return m.rows() == frame.axial_count() && m.cols() == frame.lateral_count();
  };
  if (!fits(prostate_mask.mask) || !fits(needle_mask.mask))
    throw ShapeMismatch("core " + info.core_id + ": mask shape differs from frame");
}

void SplitManifest::validate() const {
  const std::vector<const std::vector<std::string>*> sets{&train_patients, &val_patients, &test_patients};
  for (const auto* s : sets) {
    if (!std::is_sorted(s->begin(), s->end()) || std::adjacent_find(s->begin(), s->end()) != s->end())
      throw InvalidArgument("SplitManifest: patient lists must be sorted and unique");
  }
  for (std::size_t a = 0; a < sets.size(); ++a)
    for (std::size_t b = a + 1; b < sets.size(); ++b) {
      std::vector<std::string> common;
      std::set_intersection(sets[a]->begin(), sets[a]->end(), sets[b]->begin(), sets[b]->end(),
                            std::back_inserter(common));
      if (!common.empty()) throw InvalidArgument("SplitManifest: patient " + common.front() + " in two splits");
    }
}

std::vector<CoreInfo> core_infos(const std::vector<BiopsyCore>& cores) {
  std::vector<CoreInfo> out;
  out.reserve(cores.size());
  for (const auto& c : cores) out.push_back(c.info);
  return out;
}

void quantize_to_float(Array2D& values) {
  for (double& v : values.values()) v = static_cast<double>(static_cast<float>(v));
}

}  // namespace rfssl::data
