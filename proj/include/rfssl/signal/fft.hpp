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

#include <complex>
#include <span>
#include <vector>

namespace rfssl::signal {

using Complex = std::complex<double>;

/// Unnormalized forward DFT: X[k] = sum_n x[n] exp(-2 pi i k n / N).
std::vector<Complex> fft(std::span<const Complex> input);

/// Inverse DFT including the 1/N factor, so ifft(fft(x)) == x.
std::vector<Complex> ifft(std::span<const Complex> input);

}  // namespace rfssl::signal
