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

#include "rfssl/signal/image_ops.hpp"

#include <algorithm>
#include <cmath>

namespace rfssl::signal {

void validate_patch(const Patch& patch) {
  if (patch.empty()) throw InvalidArgument("patch is empty");
  for (double v : patch.values())
    if (!std::isfinite(v)) throw InvalidArgument("patch holds a non-finite pixel");
}

namespace {

struct Tap {
  int lo;
  int hi;
  double frac;
};

std::vector<Tap> taps(int in, int out) {
  std::vector<Tap> result(static_cast<std::size_t>(out));
  for (int i = 0; i < out; ++i) {
    double pos = 0.0;
    if (out > 1 && in > 1) pos = static_cast<double>(i) * (in - 1) / (out - 1);
    int lo = static_cast<int>(std::floor(pos));
    lo = std::clamp(lo, 0, in - 1);
    const int hi = std::min(lo + 1, in - 1);
    result[static_cast<std::size_t>(i)] = {lo, hi, pos - lo};
  }
  return result;
}

}  // namespace

Patch resize_bilinear(const Array2D& raw, int out_h, int out_w) {
  if (raw.empty()) throw InvalidArgument("resize_bilinear: empty input");
  require(out_h >= 1 && out_w >= 1, "resize_bilinear: output dimensions must be positive");
  if (raw.rows() == out_h && raw.cols() == out_w) return raw;

  const auto row_taps = taps(raw.rows(), out_h);
  const auto col_taps = taps(raw.cols(), out_w);
  Patch out(out_h, out_w);
  for (int r = 0; r < out_h; ++r) {
    const Tap& rt = row_taps[static_cast<std::size_t>(r)];
    const auto top = raw.row(rt.lo);
    const auto bottom = raw.row(rt.hi);
    for (int c = 0; c < out_w; ++c) {
      const Tap& ct = col_taps[static_cast<std::size_t>(c)];
      const double t = top[static_cast<std::size_t>(ct.lo)] +
                       ct.frac * (top[static_cast<std::size_t>(ct.hi)] - top[static_cast<std::size_t>(ct.lo)]);
      const double b = bottom[static_cast<std::size_t>(ct.lo)] +
                       ct.frac * (bottom[static_cast<std::size_t>(ct.hi)] -
                                  bottom[static_cast<std::size_t>(ct.lo)]);
      out(r, c) = t + rt.frac * (b - t);
    }
  }
  return out;
}

NormalizedPatch instance_normalize(const Patch& patch) {
  validate_patch(patch);
  const auto values = patch.values();
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= n;
  const double sd = std::sqrt(var);

  NormalizedPatch out{Patch(patch.rows(), patch.cols(), 0.5), false};
  if (!(sd > 0.0)) {
    out.degenerate = true;
    return out;
  }
  const double lo = mean - kTruncationSigmas * sd;
  const double hi = mean + kTruncationSigmas * sd;
  const double width = hi - lo;
  auto dst = out.patch.values();
  for (std::size_t i = 0; i < values.size(); ++i)
    dst[i] = std::clamp((std::clamp(values[i], lo, hi) - lo) / width, 0.0, 1.0);
  return out;
}

}  // namespace rfssl::signal
