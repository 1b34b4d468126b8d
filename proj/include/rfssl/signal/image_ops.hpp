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

#include "rfssl/core/array2d.hpp"

namespace rfssl::signal {

/// Patch layout: rows are axial samples, columns are RF lines (lateral).
/// "Vertical" everywhere in this library means axial.
using Patch = Array2D;

inline constexpr int kCanonicalPatchSize = 256;

/// Throws if the patch is empty or holds non-finite pixels.
void validate_patch(const Patch& patch);

/// Bilinear resize on a corner-aligned grid: output (0,0) and (out_h-1,
/// out_w-1) sample the input corners exactly.
Patch resize_bilinear(const Array2D& raw, int out_h, int out_w);

struct NormalizedPatch {
  Patch patch;
  /// Set when the input had zero variance; the patch is then constant 0.5.
  bool degenerate = false;
};

inline constexpr double kTruncationSigmas = 4.0;

/// Clamps to mean +/- 4 std (population std) and maps that window affinely
/// onto [0, 1].
NormalizedPatch instance_normalize(const Patch& patch);

}  // namespace rfssl::signal
