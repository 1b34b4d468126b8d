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
#include <filesystem>
#include <vector>

#include "rfssl/data/extract.hpp"
#include "rfssl/nn/model.hpp"
#include "rfssl/train/metrics.hpp"

namespace rfssl::train {

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

inline constexpr double kBmodeDynamicRangeDb = 60.0;
inline constexpr double kOverlayAlpha = 0.5;

/// Log-compressed envelope of every RF line mapped to 8-bit gray over the
/// top 60 dB. One image pixel per frame sample.
std::vector<std::uint8_t> bmode_gray(const data::RfFrame& frame);

/// Per-window classes painted over a B-mode background. Each pixel covered
/// by k windows takes the mean class c, colour (255 c, 0, 255 (1 - c)), and is
/// blended with the gray value at alpha 0.5.
struct WindowClass {
  data::Window window;
  int patch_class = 0;
};
RgbImage compose_heatmap(const data::RfFrame& frame, const std::vector<WindowClass>& windows);

struct Heatmap {
  RgbImage image;
  std::size_t overlay_pixels = 0;
};

/// Classifies every needle-and-prostate window at config.stride_mm and
/// composes the overlay. An empty region leaves the background only.
Heatmap render_heatmap(const nn::ModelState& model, const data::BiopsyCore& core,
                       const data::ExtractionConfig& config, double threshold = kDecisionThreshold);

/// Binary portable pixmap (P6).
std::vector<std::uint8_t> encode_ppm(const RgbImage& image);
void write_ppm(const RgbImage& image, const std::filesystem::path& path);

}  // namespace rfssl::train
