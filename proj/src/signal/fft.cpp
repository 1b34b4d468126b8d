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

#include "rfssl/signal/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "rfssl/core/error.hpp"

namespace rfssl::signal {

namespace {

// FFTW planning is not thread safe; execution with the new-array interface is.
// Plans are made once per (length, direction) with FFTW_UNALIGNED so they can
// run on any std::vector buffer.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find({n, sign});
    if (it != plans_.end()) return it->second;
    std::vector<Complex> in(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw Error(ErrorCategory::numeric, "fftw: plan creation failed");
    plans_.emplace(std::pair{n, sign}, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

std::vector<Complex> transform(std::span<const Complex> input, int sign) {
  require(!input.empty(), "fft: empty input");
  const int n = static_cast<int>(input.size());
  std::vector<Complex> in(input.begin(), input.end());
  std::vector<Complex> out(input.size());
  fftw_execute_dft(plan_cache().get(n, sign), reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace

std::vector<Complex> fft(std::span<const Complex> input) {
  return transform(input, FFTW_FORWARD);
}

std::vector<Complex> ifft(std::span<const Complex> input) {
  auto out = transform(input, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(input.size());
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace rfssl::signal
