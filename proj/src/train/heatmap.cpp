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

#include "rfssl/train/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "rfssl/signal/analytic.hpp"
#include "rfssl/train/predict.hpp"

namespace rfssl::train {

namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

std::vector<std::uint8_t> bmode_gray(const data::RfFrame& frame) {
  frame.validate();
  const int rows = frame.axial_count(), cols = frame.lateral_count();
  Array2D env(rows, cols, 0.0);
  double peak = 0.0;
  for (int c = 0; c < cols; ++c) {
    const auto e = signal::envelope(frame.samples.column(c));
    for (int r = 0; r < rows; ++r) {
      env(r, c) = e[static_cast<std::size_t>(r)];
      peak = std::max(peak, env(r, c));
    }
  }
  std::vector<std::uint8_t> gray(env.size(), 0);
  if (peak <= 0.0) return gray;
  for (std::size_t i = 0; i < env.size(); ++i) {
    const double v = env.values()[i];
    const double db = v > 0.0 ? 20.0 * std::log10(v / peak) : -kBmodeDynamicRangeDb;
    const double level = (std::max(db, -kBmodeDynamicRangeDb) + kBmodeDynamicRangeDb) / kBmodeDynamicRangeDb;
    gray[i] = to_byte(255.0 * level);
  }
  return gray;
}

RgbImage compose_heatmap(const data::RfFrame& frame, const std::vector<WindowClass>& windows) {
  const int rows = frame.axial_count(), cols = frame.lateral_count();
  const auto gray = bmode_gray(frame);
  std::vector<int> count(gray.size(), 0), cancer(gray.size(), 0);
  for (const auto& wc : windows) {
    const auto& w = wc.window;
    for (int r = w.axial_start; r < w.axial_start + w.axial_size; ++r)
      for (int c = w.lateral_start; c < w.lateral_start + w.lateral_size; ++c) {
        const auto i = static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c);
        ++count[i];
        cancer[i] += wc.patch_class;
      }
  }
  RgbImage img{cols, rows, std::vector<std::uint8_t>(gray.size() * 3)};
  for (std::size_t i = 0; i < gray.size(); ++i) {
    double rgb[3] = {static_cast<double>(gray[i]), static_cast<double>(gray[i]), static_cast<double>(gray[i])};
    if (count[i] > 0) {
      const double m = static_cast<double>(cancer[i]) / count[i];
      const double overlay[3] = {255.0 * m, 0.0, 255.0 * (1.0 - m)};
      for (int k = 0; k < 3; ++k) rgb[k] = (1.0 - kOverlayAlpha) * rgb[k] + kOverlayAlpha * overlay[k];
    }
    for (int k = 0; k < 3; ++k) img.rgb[3 * i + static_cast<std::size_t>(k)] = to_byte(rgb[k]);
  }
  return img;
}

Heatmap render_heatmap(const nn::ModelState& model, const data::BiopsyCore& core,
                       const data::ExtractionConfig& config, double threshold) {
  const auto windows = data::qualifying_windows(core, data::Region::needle, config);
  std::vector<signal::Patch> patches;
  for (const auto& w : windows) patches.push_back(data::make_patch(core.frame, w, config.output_size));
  PatchRefs refs;
  for (const auto& p : patches) refs.push_back(&p);
  const auto probs = predict_probabilities(model, refs);
  std::vector<WindowClass> classes;
  for (std::size_t i = 0; i < windows.size(); ++i) classes.push_back({windows[i], probs[i] >= threshold ? 1 : 0});
  Heatmap h;
  h.image = compose_heatmap(core.frame, classes);
  std::vector<bool> covered(static_cast<std::size_t>(core.frame.axial_count()) * core.frame.lateral_count(), false);
  for (const auto& w : windows)
    for (int r = w.axial_start; r < w.axial_start + w.axial_size; ++r)
      for (int c = w.lateral_start; c < w.lateral_start + w.lateral_size; ++c)
        covered[static_cast<std::size_t>(r) * core.frame.lateral_count() + c] = true;
  h.overlay_pixels = static_cast<std::size_t>(std::count(covered.begin(), covered.end(), true));
  return h;
}

std::vector<std::uint8_t> encode_ppm(const RgbImage& image) {
  const std::string header = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.rgb.begin(), image.rgb.end());
  return out;
}

void write_ppm(const RgbImage& image, const std::filesystem::path& path) {
  const auto bytes = encode_ppm(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("heatmap: cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out.flush()) throw IoError("heatmap: write failed for '" + path.string() + "'");
}

}  // namespace rfssl::train
