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

#include "rfssl/data/extract.hpp"

#include <cmath>

namespace rfssl::data {

namespace {

constexpr double kMmSlack = 1e-9;

int to_pixel(double mm, int count, double extent) {
  return static_cast<int>(std::lround(mm * count / extent));
}

bool passes(long long count, long long area, double threshold) {
  return static_cast<double>(count) >= threshold * static_cast<double>(area) - 1e-9;
}

}  // namespace

SampleCount mm_to_samples(const RfFrame& frame, double mm_lateral, double mm_axial) {
  frame.validate();
  if (!(mm_lateral > 0.0) || !(mm_axial > 0.0))
    throw InvalidArgument("mm_to_samples: sizes must be positive");
  if (mm_lateral > frame.lateral_extent_mm + kMmSlack || mm_axial > frame.axial_extent_mm + kMmSlack)
    throw InvalidArgument("mm_to_samples: size exceeds the frame extent");
  const SampleCount out{to_pixel(mm_lateral, frame.lateral_count(), frame.lateral_extent_mm),
                        to_pixel(mm_axial, frame.axial_count(), frame.axial_extent_mm)};
  if (out.lines < 1 || out.samples < 1)
    throw InvalidArgument("mm_to_samples: size is smaller than one sample");
  return out;
}

void ExtractionConfig::validate() const {
  if (!(patch_mm > 0.0)) throw ConfigError("extraction: patch_mm must be positive");
  if (!(stride_mm > 0.0)) throw ConfigError("extraction: stride_mm must be positive");
  if (!(needle_overlap_min >= 0.0 && needle_overlap_min <= 1.0))
    throw ConfigError("extraction: needle_overlap_min must lie in [0, 1]");
  if (!(prostate_overlap_min >= 0.0 && prostate_overlap_min <= 1.0))
    throw ConfigError("extraction: prostate_overlap_min must lie in [0, 1]");
  if (output_size < 2) throw ConfigError("extraction: output_size must be at least 2");
}

std::vector<Window> grid_windows(const RfFrame& frame, double patch_mm, double stride_mm) {
  if (!(stride_mm > 0.0)) throw InvalidArgument("grid_windows: stride must be positive");
  const SampleCount size = mm_to_samples(frame, patch_mm, patch_mm);
  std::vector<Window> out;
  for (int i = 0;; ++i) {
    const double ax_mm = i * stride_mm;
    if (ax_mm + patch_mm > frame.axial_extent_mm + kMmSlack) break;
    const int ax = to_pixel(ax_mm, frame.axial_count(), frame.axial_extent_mm);
    if (ax + size.samples > frame.axial_count()) break;
    for (int j = 0;; ++j) {
      const double lat_mm = j * stride_mm;
      if (lat_mm + patch_mm > frame.lateral_extent_mm + kMmSlack) break;
      const int lat = to_pixel(lat_mm, frame.lateral_count(), frame.lateral_extent_mm);
      if (lat + size.lines > frame.lateral_count()) break;
      out.push_back({ax, lat, size.samples, size.lines, ax_mm, lat_mm});
    }
  }
  return out;
}

MaskCounter::MaskCounter(const Mask2D& mask)
    : cols_(mask.cols() + 1),
      table_(static_cast<std::size_t>(mask.rows() + 1) * static_cast<std::size_t>(mask.cols() + 1), 0) {
  for (int r = 0; r < mask.rows(); ++r) {
    long long running = 0;
    for (int c = 0; c < mask.cols(); ++c) {
      running += mask(r, c) != 0;
      table_[static_cast<std::size_t>(r + 1) * cols_ + c + 1] =
          table_[static_cast<std::size_t>(r) * cols_ + c + 1] + running;
    }
  }
}

long long MaskCounter::count(const Window& w) const {
  const auto at = [&](int r, int c) { return table_[static_cast<std::size_t>(r) * cols_ + c]; };
  const int r0 = w.axial_start, r1 = w.axial_start + w.axial_size;
  const int c0 = w.lateral_start, c1 = w.lateral_start + w.lateral_size;
  return at(r1, c1) - at(r0, c1) - at(r1, c0) + at(r0, c0);
}

std::vector<Window> qualifying_windows(const BiopsyCore& core, Region region,
                                       const ExtractionConfig& config) {
  config.validate();
  core.validate();
  const MaskCounter prostate(core.prostate_mask.mask);
  const std::optional<MaskCounter> needle =
      region == Region::needle ? std::optional<MaskCounter>(core.needle_mask.mask) : std::nullopt;
  std::vector<Window> out;
  for (const Window& w : grid_windows(core.frame, config.patch_mm, config.stride_mm)) {
    const long long area = static_cast<long long>(w.axial_size) * w.lateral_size;
    if (needle && !passes(needle->count(w), area, config.needle_overlap_min)) continue;
    if (!passes(prostate.count(w), area, config.prostate_overlap_min)) continue;
    out.push_back(w);
  }
  return out;
}

signal::Patch make_patch(const RfFrame& frame, const Window& window, int output_size) {
  Array2D crop(window.axial_size, window.lateral_size);
  for (int r = 0; r < window.axial_size; ++r)
    for (int c = 0; c < window.lateral_size; ++c)
      crop(r, c) = frame.samples(window.axial_start + r, window.lateral_start + c);
  signal::Patch patch =
      signal::instance_normalize(signal::resize_bilinear(crop, output_size, output_size)).patch;
  quantize_to_float(patch);
  return patch;
}

std::vector<PatchRecord> extract_patches(const BiopsyCore& core, Region region,
                                         const ExtractionConfig& config) {
  std::vector<PatchRecord> out;
  for (const Window& w : qualifying_windows(core, region, config)) {
    PatchRecord rec;
    rec.patch = make_patch(core.frame, w, config.output_size);
    rec.core_id = core.info.core_id;
    rec.patient_id = core.info.patient_id;
    rec.axial_origin_mm = w.axial_origin_mm;
    rec.lateral_origin_mm = w.lateral_origin_mm;
    rec.weak_label = core.info.label;
    rec.region = region;
    rec.involvement_percent = core.info.involvement_percent;
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace rfssl::data
