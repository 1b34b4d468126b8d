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

#include "rfssl/signal/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rfssl/signal/analytic.hpp"

namespace rfssl::signal {

namespace {

constexpr double kNoiseClamp = 0.9;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

int fraction_to_pixels(double fraction, int size) {
  return static_cast<int>(std::lround(fraction * size));
}

int placement(double position, int free_slots) {
  return std::clamp(static_cast<int>(std::floor(position * free_slots)), 0, free_slots - 1);
}

// Runs `op` on the zero-mean part of every column and adds the mean back.
template <typename ColumnOp>
Patch per_column_centered(const Patch& patch, ColumnOp op) {
  validate_patch(patch);
  require(patch.rows() >= kMinLineLength, "physics augmentation needs at least 4 rows per column");
  Patch out(patch.rows(), patch.cols());
  std::vector<double> column(static_cast<std::size_t>(patch.rows()));
  for (int c = 0; c < patch.cols(); ++c) {
    double mean = 0.0;
    for (int r = 0; r < patch.rows(); ++r) mean += patch(r, c);
    mean /= patch.rows();
    for (int r = 0; r < patch.rows(); ++r) column[static_cast<std::size_t>(r)] = patch(r, c) - mean;
    op(column);
    for (int r = 0; r < patch.rows(); ++r) out(r, c) = mean + column[static_cast<std::size_t>(r)];
  }
  return out;
}

}  // namespace

std::string_view to_string(AugmentCategory category) {
  switch (category) {
    case AugmentCategory::translation: return "translation";
    case AugmentCategory::erasing: return "erasing";
    case AugmentCategory::vertical_flip: return "vertical_flip";
    case AugmentCategory::horizontal_flip: return "horizontal_flip";
    case AugmentCategory::phase_shift: return "phase_shift";
    case AugmentCategory::envelope_distort: return "envelope_distort";
  }
  return "unknown";
}

AugmentCategory category_from_string(std::string_view name) {
  for (auto category : kCategoryOrder)
    if (to_string(category) == name) return category;
  throw InvalidArgument("unknown augmentation category '" + std::string(name) + "'");
}

void AugmentationConfig::validate() const {
  require(skip_probability >= 0.0 && skip_probability <= 1.0,
          "augmentation: skip_probability must lie in [0, 1]");
  require(translation_max_fraction >= 0.0 && translation_max_fraction < 1.0,
          "augmentation: translation_max_fraction must lie in [0, 1)");
  require(erase_min_fraction >= 0.0 && erase_min_fraction <= erase_max_fraction &&
              erase_max_fraction <= 1.0,
          "augmentation: need 0 <= erase_min_fraction <= erase_max_fraction <= 1");
  require(std::isfinite(fill_value), "augmentation: fill_value must be finite");
  require(envelope_noise_std >= 0.0 && envelope_noise_std < 1.0,
          "augmentation: envelope_noise_std must lie in [0, 1)");
  require(envelope_noise_cutoff > 0.0 && envelope_noise_cutoff <= 1.0,
          "augmentation: envelope_noise_cutoff must lie in (0, 1]");
}

bool AugmentationConfig::is_enabled(AugmentCategory category) const {
  return std::find(enabled.begin(), enabled.end(), category) != enabled.end();
}

AugmentCategory category_of(const Transform& transform) {
  return std::visit(
      Overloaded{
          [](const Translate&) { return AugmentCategory::translation; },
          [](const Erase&) { return AugmentCategory::erasing; },
          [](const VerticalFlip&) { return AugmentCategory::vertical_flip; },
          [](const HorizontalFlip&) { return AugmentCategory::horizontal_flip; },
          [](const PhaseShift&) { return AugmentCategory::phase_shift; },
          [](const EnvelopeDistort&) { return AugmentCategory::envelope_distort; },
      },
      transform);
}

Patch phase_shift_augment(const Patch& patch, double theta) {
  require(theta >= 0.0 && theta < 2.0 * std::numbers::pi, "phase shift: theta must lie in [0, 2 pi)");
  const Complex rotation = std::polar(1.0, theta);
  return per_column_centered(patch, [&](std::vector<double>& column) {
    const auto analytic = analytic_signal(column);
    for (std::size_t k = 0; k < column.size(); ++k)
      column[k] = (analytic.values[k] * rotation).real();
  });
}

std::vector<double> envelope_noise(int length, double stddev, double cutoff, Rng& rng) {
  require(length >= 1, "envelope_noise: length must be positive");
  require(stddev >= 0.0 && stddev < 1.0, "envelope_noise: stddev must lie in [0, 1)");
  require(cutoff > 0.0 && cutoff <= 1.0, "envelope_noise: cutoff must lie in (0, 1]");
  const auto n = static_cast<std::size_t>(length);
  std::vector<Complex> white(n);
  for (auto& v : white) v = rng.normal();

  auto spectrum = fft(white);
  // Bin k sits at min(k, N-k) / (N/2) of Nyquist.
  const double half = 0.5 * static_cast<double>(n);
  spectrum[0] = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double rel = static_cast<double>(std::min(k, n - k)) / half;
    if (rel > cutoff) spectrum[k] = 0.0;
  }
  const auto filtered = ifft(spectrum);

  std::vector<double> noise(n);
  double mean = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    noise[k] = filtered[k].real();
    mean += noise[k];
  }
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (auto& v : noise) {
    v -= mean;
    var += v * v;
  }
  const double sd = std::sqrt(var / static_cast<double>(n));
  const double scale = sd > 0.0 ? stddev / sd : 0.0;
  for (auto& v : noise) v = std::clamp(v * scale, -kNoiseClamp, kNoiseClamp);
  return noise;
}

Patch apply_envelope_noise(const Patch& patch, std::span<const double> noise) {
  if (noise.size() != static_cast<std::size_t>(patch.rows()))
    throw ShapeMismatch("envelope noise length must equal the number of patch rows");
  return per_column_centered(patch, [&](std::vector<double>& column) {
    for (std::size_t k = 0; k < column.size(); ++k) column[k] *= 1.0 + noise[k];
  });
}

Patch envelope_distort_augment(const Patch& patch, const AugmentationConfig& config, Rng& rng) {
  config.validate();
  const auto noise =
      envelope_noise(patch.rows(), config.envelope_noise_std, config.envelope_noise_cutoff, rng);
  return apply_envelope_noise(patch, noise);
}

Patch translate(const Patch& patch, int shift_rows, int shift_cols, double fill) {
  Patch out(patch.rows(), patch.cols(), fill);
  for (int r = 0; r < patch.rows(); ++r) {
    const int src_r = r - shift_rows;
    if (src_r < 0 || src_r >= patch.rows()) continue;
    for (int c = 0; c < patch.cols(); ++c) {
      const int src_c = c - shift_cols;
      if (src_c < 0 || src_c >= patch.cols()) continue;
      out(r, c) = patch(src_r, src_c);
    }
  }
  return out;
}

Patch erase(const Patch& patch, int top, int left, int height, int width, double fill) {
  require(height >= 0 && width >= 0, "erase: negative rectangle size");
  require(top >= 0 && left >= 0 && top + height <= patch.rows() && left + width <= patch.cols(),
          "erase: rectangle outside the patch");
  Patch out = patch;
  for (int r = top; r < top + height; ++r)
    for (int c = left; c < left + width; ++c) out(r, c) = fill;
  return out;
}

Patch flip_vertical(const Patch& patch) {
  Patch out(patch.rows(), patch.cols());
  for (int r = 0; r < patch.rows(); ++r) {
    const auto src = patch.row(patch.rows() - 1 - r);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

Patch flip_horizontal(const Patch& patch) {
  Patch out(patch.rows(), patch.cols());
  for (int r = 0; r < patch.rows(); ++r) {
    const auto src = patch.row(r);
    std::reverse_copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

Patch apply_transform(const Patch& patch, const Transform& transform,
                      const AugmentationConfig& config) {
  validate_patch(patch);
  return std::visit(
      Overloaded{
          [&](const Translate& t) {
            const double limit = config.translation_max_fraction;
            require(std::abs(t.vertical_fraction) <= limit && std::abs(t.horizontal_fraction) <= limit,
                    "translate: fraction exceeds translation_max_fraction");
            return translate(patch, fraction_to_pixels(t.vertical_fraction, patch.rows()),
                             fraction_to_pixels(t.horizontal_fraction, patch.cols()),
                             config.fill_value);
          },
          [&](const Erase& e) {
            const auto in_range = [&](double f) {
              return f >= config.erase_min_fraction && f <= config.erase_max_fraction;
            };
            require(in_range(e.height_fraction) && in_range(e.width_fraction),
                    "erase: size fraction outside [erase_min_fraction, erase_max_fraction]");
            require(e.top_position >= 0.0 && e.top_position < 1.0 && e.left_position >= 0.0 &&
                        e.left_position < 1.0,
                    "erase: placement must lie in [0, 1)");
            const int h = std::clamp(fraction_to_pixels(e.height_fraction, patch.rows()), 1, patch.rows());
            const int w = std::clamp(fraction_to_pixels(e.width_fraction, patch.cols()), 1, patch.cols());
            const int top = placement(e.top_position, patch.rows() - h + 1);
            const int left = placement(e.left_position, patch.cols() - w + 1);
            return erase(patch, top, left, h, w, config.fill_value);
          },
          [&](const VerticalFlip&) { return flip_vertical(patch); },
          [&](const HorizontalFlip&) { return flip_horizontal(patch); },
          [&](const PhaseShift& p) { return phase_shift_augment(patch, p.theta); },
          [&](const EnvelopeDistort& e) {
            Rng noise_rng(e.noise_seed);
            return envelope_distort_augment(patch, config, noise_rng);
          },
      },
      transform);
}

Patch geometric_augment(const Patch& patch, GeometricKind kind, const AugmentationConfig& config,
                        Rng& rng) {
  config.validate();
  switch (kind) {
    case GeometricKind::translate: {
      const double m = config.translation_max_fraction;
      return apply_transform(patch, Translate{rng.uniform(-m, m), rng.uniform(-m, m)}, config);
    }
    case GeometricKind::erase: {
      Erase e;
      e.height_fraction = rng.uniform(config.erase_min_fraction, config.erase_max_fraction);
      e.width_fraction = rng.uniform(config.erase_min_fraction, config.erase_max_fraction);
      e.top_position = rng.uniform();
      e.left_position = rng.uniform();
      return apply_transform(patch, e, config);
    }
    case GeometricKind::vflip: return flip_vertical(patch);
    case GeometricKind::hflip: return flip_horizontal(patch);
  }
  throw InvalidArgument("geometric_augment: unknown kind");
}

std::vector<Transform> sample_augmentation(const AugmentationConfig& config, Rng& rng) {
  config.validate();
  std::vector<Transform> transforms;
  for (const auto category : kCategoryOrder) {
    if (!config.is_enabled(category)) continue;
    if (rng.bernoulli(config.skip_probability)) continue;
    switch (category) {
      case AugmentCategory::translation: {
        const double m = config.translation_max_fraction;
        const double vertical = rng.uniform(-m, m);
        const double horizontal = rng.uniform(-m, m);
        transforms.emplace_back(Translate{vertical, horizontal});
        break;
      }
      case AugmentCategory::erasing: {
        Erase e;
        e.height_fraction = rng.uniform(config.erase_min_fraction, config.erase_max_fraction);
        e.width_fraction = rng.uniform(config.erase_min_fraction, config.erase_max_fraction);
        e.top_position = rng.uniform();
        e.left_position = rng.uniform();
        transforms.emplace_back(e);
        break;
      }
      case AugmentCategory::vertical_flip: transforms.emplace_back(VerticalFlip{}); break;
      case AugmentCategory::horizontal_flip: transforms.emplace_back(HorizontalFlip{}); break;
      case AugmentCategory::phase_shift:
        transforms.emplace_back(PhaseShift{rng.uniform(0.0, 2.0 * std::numbers::pi)});
        break;
      case AugmentCategory::envelope_distort:
        transforms.emplace_back(EnvelopeDistort{rng.next_u64()});
        break;
    }
  }
  return transforms;
}

Patch apply_pipeline(const Patch& patch, std::span<const Transform> transforms,
                     const AugmentationConfig& config) {
  Patch current = patch;
  for (const auto& t : transforms) current = apply_transform(current, t, config);
  return current;
}

Patch augment(const Patch& patch, const AugmentationConfig& config, Rng& rng) {
  const auto transforms = sample_augmentation(config, rng);
  return apply_pipeline(patch, transforms, config);
}

}  // namespace rfssl::signal
