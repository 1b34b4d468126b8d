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

#include <span>
#include <vector>

#include "rfssl/signal/fft.hpp"

namespace rfssl::signal {

/// Complex analytic representation of a real RF line. values[k].real()
/// reproduces the source sample; values[k].imag() is its Hilbert transform.
struct AnalyticLine {
  std::vector<Complex> values;
};

/// Instantaneous amplitude, unwrapped instantaneous phase (radians) and its
/// derivative (radians per sample).
struct EnvelopePhase {
  std::vector<double> envelope;
  std::vector<double> phase;
  std::vector<double> inst_frequency;
};

inline constexpr int kMinLineLength = 4;

/// Analytic signal via the one-sided DFT construction: bin 0 (and bin N/2 for
/// even N) kept, positive bins doubled, negative bins zeroed.
///
/// Throws InvalidArgument for lines shorter than kMinLineLength or containing
/// non-finite samples.
AnalyticLine analytic_signal(std::span<const double> line);

/// Modulus, unwrapped argument and central-difference instantaneous frequency
/// (one-sided at the ends). Samples with zero modulus get raw phase 0.
EnvelopePhase envelope_and_phase(const AnalyticLine& line);

/// Convenience: envelope of a real line.
std::vector<double> envelope(std::span<const double> line);

/// Unwraps a phase sequence so consecutive differences lie in (-pi, pi].
std::vector<double> unwrap_phase(std::span<const double> wrapped);

}  // namespace rfssl::signal
