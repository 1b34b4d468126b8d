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

#include "rfssl/data/phantom.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "rfssl/core/parallel.hpp"

namespace rfssl::data {

namespace {

constexpr double kPi = std::numbers::pi;

double cell_area_mm2(const PhantomConfig& c) {
  return (c.axial_extent_mm / c.axial_samples) * (c.lateral_extent_mm / c.lateral_lines);
}

std::vector<double> pulse_kernel(const PhantomConfig& c) {
  const double f = pulse_cycles_per_sample(c);
  const double sigma_f = c.fractional_bandwidth * f / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  const double sigma_t = 1.0 / (2.0 * kPi * sigma_f);
  const int half = static_cast<int>(std::ceil(4.0 * sigma_t));
  std::vector<double> k(static_cast<std::size_t>(2 * half + 1));
  for (int i = -half; i <= half; ++i)
    k[static_cast<std::size_t>(i + half)] =
        std::exp(-0.5 * (i / sigma_t) * (i / sigma_t)) * std::cos(2.0 * kPi * f * i);
  return k;
}

std::vector<double> beam_kernel(const PhantomConfig& c) {
  const double sigma = c.beam_width_mm * c.lateral_lines / c.lateral_extent_mm;
  const int half = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(static_cast<std::size_t>(2 * half + 1));
  for (int i = -half; i <= half; ++i)
    k[static_cast<std::size_t>(i + half)] = std::exp(-0.5 * (i / sigma) * (i / sigma));
  return k;
}

// Zero-padded "same" convolution along rows (axial) or columns (lateral).
Array2D convolve(const Array2D& in, const std::vector<double>& kernel, bool axial) {
  const int half = static_cast<int>(kernel.size() / 2);
  Array2D out(in.rows(), in.cols(), 0.0);
  for (int r = 0; r < in.rows(); ++r)
    for (int c = 0; c < in.cols(); ++c) {
      const double v = in(r, c);
      if (v == 0.0) continue;
      for (int k = -half; k <= half; ++k) {
        const int rr = axial ? r + k : r;
        const int cc = axial ? c : c + k;
        if (rr < 0 || rr >= in.rows() || cc < 0 || cc >= in.cols()) continue;
        out(rr, cc) += v * kernel[static_cast<std::size_t>(k + half)];
      }
    }
  return out;
}

// exp(std * s) for a smooth zero-mean unit-variance field s built from random
// plane waves with wavelengths above the configured minimum.
Array2D modulation_field(const PhantomConfig& c, Rng& rng) {
  constexpr int kWaves = 8;
  Array2D field(c.axial_samples, c.lateral_lines, 0.0);
  const double max_k = 2.0 * kPi / c.modulation_min_wavelength_mm;
  for (int w = 0; w < kWaves; ++w) {
    const double kz = rng.uniform(-max_k, max_k), kx = rng.uniform(-max_k, max_k);
    const double phase = rng.uniform(0.0, 2.0 * kPi);
    for (int r = 0; r < c.axial_samples; ++r) {
      const double z = (r + 0.5) * c.axial_extent_mm / c.axial_samples;
      for (int col = 0; col < c.lateral_lines; ++col) {
        const double x = (col + 0.5) * c.lateral_extent_mm / c.lateral_lines;
        field(r, col) += std::sqrt(2.0 / kWaves) * std::cos(kz * z + kx * x + phase);
      }
    }
  }
  for (double& v : field.values()) v = std::exp(c.modulation_std * v);
  return field;
}

}  // namespace

void PhantomConfig::validate() const {
  if (axial_samples < 2 || lateral_lines < 2) throw ConfigError("phantom: frame must be at least 2x2");
  if (!(axial_extent_mm > 0.0) || !(lateral_extent_mm > 0.0)) throw ConfigError("phantom: extents must be positive");
  if (!(density_per_mm2 >= 0.0)) throw ConfigError("phantom: density must be non-negative");
  if (!(cancer_density_ratio > 0.0)) throw ConfigError("phantom: cancer density ratio must be positive");
  const double p = density_per_mm2 * std::max(1.0, cancer_density_ratio) * cell_area_mm2(*this);
  if (p > 1.0) throw ConfigError("phantom: density exceeds one scatterer per grid cell");
  if (!(benign_amplitude_shape > 0.0) || !(cancer_amplitude_shape > 0.0))
    throw ConfigError("phantom: amplitude shapes must be positive");
  if (!(center_frequency_mhz > 0.0)) throw ConfigError("phantom: center frequency must be positive");
  if (!(fractional_bandwidth > 0.0)) throw ConfigError("phantom: bandwidth must be positive");
  if (!(sound_speed_mm_per_us > 0.0)) throw ConfigError("phantom: sound speed must be positive");
  if (pulse_cycles_per_sample(*this) >= 0.5) throw ConfigError("phantom: pulse frequency above Nyquist");
  if (!(beam_width_mm > 0.0)) throw ConfigError("phantom: beam width must be positive");
  if (!(gain_jitter_db >= 0.0) || !(modulation_std >= 0.0) || !(noise_std >= 0.0))
    throw ConfigError("phantom: nuisance levels must be non-negative");
  if (!(modulation_min_wavelength_mm > 0.0)) throw ConfigError("phantom: modulation wavelength must be positive");
  if (!(prostate_area_fraction > 0.0 && prostate_area_fraction <= 1.0))
    throw ConfigError("phantom: prostate area fraction must lie in (0, 1]");
  if (!(needle_length_mm > 0.0) || !(needle_width_mm > 0.0)) throw ConfigError("phantom: needle size must be positive");
}

double pulse_cycles_per_sample(const PhantomConfig& c) {
  const double cycles_per_mm = 2.0 * c.center_frequency_mhz / c.sound_speed_mm_per_us;
  return cycles_per_mm * c.axial_extent_mm / c.axial_samples;
}

Mask2D prostate_rectangle(const PhantomConfig& c) {
  const double side = std::sqrt(c.prostate_area_fraction);
  Mask2D m(c.axial_samples, c.lateral_lines, 0);
  const auto span = [side](int n) {
    const int len = static_cast<int>(std::lround(side * n));
    return std::pair<int, int>{(n - len) / 2, (n - len) / 2 + len};
  };
  const auto [r0, r1] = span(c.axial_samples);
  const auto [c0, c1] = span(c.lateral_lines);
  for (int r = r0; r < r1; ++r)
    for (int col = c0; col < c1; ++col) m(r, col) = 1;
  return m;
}

Mask2D needle_band(const PhantomConfig& c, double center_axial_mm, double center_lateral_mm) {
  const double theta = c.needle_angle_deg * kPi / 180.0;
  const double ct = std::cos(theta), st = std::sin(theta);
  Mask2D m(c.axial_samples, c.lateral_lines, 0);
  for (int r = 0; r < c.axial_samples; ++r) {
    const double dz = (r + 0.5) * c.axial_extent_mm / c.axial_samples - center_axial_mm;
    for (int col = 0; col < c.lateral_lines; ++col) {
      const double dx = (col + 0.5) * c.lateral_extent_mm / c.lateral_lines - center_lateral_mm;
      const double along = dx * ct + dz * st;
      const double across = -dx * st + dz * ct;
      if (std::abs(along) <= 0.5 * c.needle_length_mm && std::abs(across) <= 0.5 * c.needle_width_mm)
        m(r, col) = 1;
    }
  }
  return m;
}

BiopsyCore generate_phantom_frame(int class_id, const PhantomConfig& c, Rng& rng,
                                  const std::string& core_id, const std::string& patient_id) {
  c.validate();
  if (class_id != 0 && class_id != 1) throw InvalidArgument("phantom: class must be 0 or 1");
  const bool cancer = class_id == 1;
  const double density = c.density_per_mm2 * (cancer ? c.cancer_density_ratio : 1.0);
  const double shape = cancer ? c.cancer_amplitude_shape : c.benign_amplitude_shape;
  const double p = density * cell_area_mm2(c);

  Array2D scatter(c.axial_samples, c.lateral_lines, 0.0);
  for (double& v : scatter.values())
    if (rng.uniform() < p) v = rng.normal() * std::sqrt(rng.gamma(shape) / shape);

  BiopsyCore core;
  core.info = {core_id, patient_id, class_id, cancer ? 100.0 : 0.0, std::nullopt};
  core.frame.axial_extent_mm = c.axial_extent_mm;
  core.frame.lateral_extent_mm = c.lateral_extent_mm;
  core.frame.frame_id = core_id;

  if (density > 0.0) {
    Array2D rf = convolve(convolve(scatter, pulse_kernel(c), true), beam_kernel(c), false);
    const Array2D field = modulation_field(c, rng);
    const double gain = std::pow(10.0, rng.normal(0.0, c.gain_jitter_db) / 20.0);
    for (std::size_t i = 0; i < rf.size(); ++i)
      rf.values()[i] = gain * (field.values()[i] * rf.values()[i] + c.noise_std * rng.normal());
    core.frame.samples = std::move(rf);
  } else {
    core.frame.samples = Array2D(c.axial_samples, c.lateral_lines, 0.0);
  }
  quantize_to_float(core.frame.samples);

  // Needle band centre jittered so the band stays inside the prostate rectangle.
  const double side = std::sqrt(c.prostate_area_fraction);
  const double theta = c.needle_angle_deg * kPi / 180.0;
  const double half_lat = 0.5 * (c.needle_length_mm * std::abs(std::cos(theta)) + c.needle_width_mm * std::abs(std::sin(theta)));
  const double half_ax = 0.5 * (c.needle_length_mm * std::abs(std::sin(theta)) + c.needle_width_mm * std::abs(std::cos(theta)));
  const double slack_lat = std::max(0.0, 0.5 * side * c.lateral_extent_mm - half_lat - 0.5);
  const double slack_ax = std::max(0.0, 0.5 * side * c.axial_extent_mm - half_ax - 0.5);
  const double center_ax = 0.5 * c.axial_extent_mm + rng.uniform(-slack_ax, slack_ax);
  const double center_lat = 0.5 * c.lateral_extent_mm + rng.uniform(-slack_lat, slack_lat);

  core.prostate_mask = {prostate_rectangle(c), Region::prostate};
  core.needle_mask = {needle_band(c, center_ax, center_lat), Region::needle};
  return core;
}

std::vector<BiopsyCore> generate_phantom_corpus(const PhantomConfig& config, int count,
                                                int cores_per_patient, std::uint64_t seed, int threads) {
  config.validate();
  if (count < 0) throw InvalidArgument("phantom corpus: negative core count");
  if (cores_per_patient < 1) throw InvalidArgument("phantom corpus: cores_per_patient must be at least 1");
  std::vector<int> classes(static_cast<std::size_t>(count), 0);
  for (int i = 0; i < count / 2; ++i) classes[static_cast<std::size_t>(i)] = 1;
  Rng order_rng = Rng::substream(seed, "corpus.classes");
  for (std::size_t i = classes.size(); i > 1; --i)
    std::swap(classes[i - 1], classes[static_cast<std::size_t>(order_rng.uniform_int(0, static_cast<std::int64_t>(i - 1)))]);

  std::vector<BiopsyCore> cores(static_cast<std::size_t>(count));
  parallel_for(cores.size(), threads, [&](std::size_t i) {
    char core_id[32], patient_id[32];
    std::snprintf(core_id, sizeof core_id, "core%04zu", i);
    std::snprintf(patient_id, sizeof patient_id, "patient%04zu", i / static_cast<std::size_t>(cores_per_patient));
    Rng rng = Rng::substream(seed, core_id);
    cores[i] = generate_phantom_frame(classes[i], config, rng, core_id, patient_id);
  });
  return cores;
}

}  // namespace rfssl::data
