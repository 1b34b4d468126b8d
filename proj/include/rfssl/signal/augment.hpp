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

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "rfssl/core/rng.hpp"
#include "rfssl/signal/image_ops.hpp"

namespace rfssl::signal {

enum class AugmentCategory {
  translation,
  erasing,
  vertical_flip,
  horizontal_flip,
  phase_shift,
  envelope_distort,
};

/// Fixed order in which categories are sampled and applied.
inline constexpr std::array<AugmentCategory, 6> kCategoryOrder = {
    AugmentCategory::translation,     AugmentCategory::erasing,
    AugmentCategory::vertical_flip,   AugmentCategory::horizontal_flip,
    AugmentCategory::phase_shift,     AugmentCategory::envelope_distort,
};

std::string_view to_string(AugmentCategory category);
AugmentCategory category_from_string(std::string_view name);

struct AugmentationConfig {
  double skip_probability = 0.5;
  double translation_max_fraction = 0.2;
  double erase_min_fraction = 0.02;
  double erase_max_fraction = 0.1;
  double fill_value = 0.5;
  double envelope_noise_std = 0.2;
  /// Low-pass cutoff as a fraction of the Nyquist frequency.
  double envelope_noise_cutoff = 0.1;
  std::vector<AugmentCategory> enabled{kCategoryOrder.begin(), kCategoryOrder.end()};

  void validate() const;
  bool is_enabled(AugmentCategory category) const;
};

struct Translate {
  double vertical_fraction = 0.0;    // axial, positive moves content down
  double horizontal_fraction = 0.0;  // lateral, positive moves content right
};

struct Erase {
  double height_fraction = 0.0;
  double width_fraction = 0.0;
  /// Relative position of the rectangle among all valid placements, in [0,1).
  double top_position = 0.0;
  double left_position = 0.0;
};

struct VerticalFlip {};
struct HorizontalFlip {};

struct PhaseShift {
  double theta = 0.0;
};

struct EnvelopeDistort {
  std::uint64_t noise_seed = 0;
};

using Transform =
    std::variant<Translate, Erase, VerticalFlip, HorizontalFlip, PhaseShift, EnvelopeDistort>;

AugmentCategory category_of(const Transform& transform);

// --- Physics-inspired transforms -------------------------------------------
//
// Both act on every column (RF line) of the patch with the same parameters.
// Each column's mean is held aside and the transform is applied to the
// zero-mean remainder: normalized patches sit around 0.5, while the analytic
// signal construction assumes a zero-mean echo.

/// Column-wise Re(s_a * exp(j theta)). theta must lie in [0, 2 pi).
Patch phase_shift_augment(const Patch& patch, double theta);

/// Gaussian white noise of the given length, DFT low-passed to
/// cutoff * Nyquist (DC removed), rescaled to `stddev` and clamped to
/// |n| <= 0.9 so that 1 + n stays positive.
std::vector<double> envelope_noise(int length, double stddev, double cutoff, Rng& rng);

/// Column-wise Re(s_a * (1 + n)). Because n is real this equals s * (1 + n);
/// the envelope is scaled and the instantaneous phase is untouched.
Patch apply_envelope_noise(const Patch& patch, std::span<const double> noise);

/// Draws one noise realization from `rng` and applies it to every column.
Patch envelope_distort_augment(const Patch& patch, const AugmentationConfig& config, Rng& rng);

// --- Rigid and masking transforms ------------------------------------------

Patch translate(const Patch& patch, int shift_rows, int shift_cols, double fill);
Patch erase(const Patch& patch, int top, int left, int height, int width, double fill);
Patch flip_vertical(const Patch& patch);
Patch flip_horizontal(const Patch& patch);

enum class GeometricKind { translate, erase, vflip, hflip };

/// Draws the parameters for `kind` from `rng` under `config` and applies them.
Patch geometric_augment(const Patch& patch, GeometricKind kind, const AugmentationConfig& config,
                        Rng& rng);

/// Applies one concrete transform. Parameters outside the ranges allowed by
/// `config` are rejected.
Patch apply_transform(const Patch& patch, const Transform& transform,
                      const AugmentationConfig& config);

/// For each enabled category in kCategoryOrder: skip with probability
/// config.skip_probability, otherwise emit one parameterized transform.
std::vector<Transform> sample_augmentation(const AugmentationConfig& config, Rng& rng);

Patch apply_pipeline(const Patch& patch, std::span<const Transform> transforms,
                     const AugmentationConfig& config);

/// sample_augmentation followed by apply_pipeline.
Patch augment(const Patch& patch, const AugmentationConfig& config, Rng& rng);

}  // namespace rfssl::signal
