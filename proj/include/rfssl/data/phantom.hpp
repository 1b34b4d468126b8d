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
#include <string>
#include <vector>

#include "rfssl/core/rng.hpp"
#include "rfssl/data/types.hpp"

namespace rfssl::data {

/// Parameters of the synthetic tissue model. Scatterers sit on the sampling
/// grid; each cell holds one with probability density * cell area. Amplitudes
/// are compound Gaussian: normal * sqrt(Gamma(shape)/shape), so a smaller
/// shape gives heavier tails.
struct PhantomConfig {
  int axial_samples = 448;
  int lateral_lines = 128;
  double axial_extent_mm = kCanonicalAxialExtentMm;
  double lateral_extent_mm = kCanonicalLateralExtentMm;

  double density_per_mm2 = 2.0;
  double cancer_density_ratio = 3.0;
  double benign_amplitude_shape = 20.0;
  double cancer_amplitude_shape = 1.0;

  double center_frequency_mhz = 2.5;
  double fractional_bandwidth = 0.6;
  double sound_speed_mm_per_us = 1.54;
  /// Standard deviation of the Gaussian lateral beam profile.
  double beam_width_mm = 0.4;

  /// Per-frame gain jitter, standard deviation in dB.
  double gain_jitter_db = 3.0;
  /// Log-amplitude standard deviation of a smooth multiplicative field.
  double modulation_std = 0.3;
  double modulation_min_wavelength_mm = 3.0;
  /// Additive white noise relative to the unit scatterer amplitude.
  double noise_std = 0.05;

  double prostate_area_fraction = 0.6;
  double needle_length_mm = 16.0;
  double needle_width_mm = 5.6;
  double needle_angle_deg = 10.0;

  void validate() const;
};

/// Axial pulse frequency in cycles per sample.
double pulse_cycles_per_sample(const PhantomConfig& config);

/// Synthetic core of the given class. Cancer cores get involvement 100.
BiopsyCore generate_phantom_frame(int class_id, const PhantomConfig& config, Rng& rng,
                                  const std::string& core_id = "core",
                                  const std::string& patient_id = "patient");

/// `count` cores with exactly half (rounded down) cancer, class order
/// shuffled; core i belongs to patient i / cores_per_patient. Core k draws from
/// its own substream, so the result does not depend on `threads`.
std::vector<BiopsyCore> generate_phantom_corpus(const PhantomConfig& config, int count,
                                                int cores_per_patient, std::uint64_t seed,
                                                int threads = 1);

/// Central rectangle covering prostate_area_fraction of the frame.
Mask2D prostate_rectangle(const PhantomConfig& config);

/// Tilted band of needle_length_mm x needle_width_mm centred at (axial, lateral) mm.
Mask2D needle_band(const PhantomConfig& config, double center_axial_mm, double center_lateral_mm);

}  // namespace rfssl::data
