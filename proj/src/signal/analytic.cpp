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

#include "rfssl/signal/analytic.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rfssl/core/error.hpp"

namespace rfssl::signal {

AnalyticLine analytic_signal(std::span<const double> line) {
  const std::size_t n = line.size();
  if (n < static_cast<std::size_t>(kMinLineLength))
    throw InvalidArgument("analytic_signal: line length " + std::to_string(n) +
                          " is below the minimum of 4");
  std::vector<Complex> buffer(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(line[k]))
      throw InvalidArgument("analytic_signal: non-finite sample at index " + std::to_string(k));
    buffer[k] = Complex(line[k], 0.0);
  }

  auto spectrum = fft(buffer);
  // Bins 1 .. ceil(N/2)-1 double; bin N/2 (even N) and bin 0 stay; the rest vanish.
  const std::size_t half = n / 2;
  const std::size_t last_doubled = (n % 2 == 0) ? half - 1 : half;
  for (std::size_t k = 1; k <= last_doubled; ++k) spectrum[k] *= 2.0;
  for (std::size_t k = last_doubled + 1 + (n % 2 == 0 ? 1 : 0); k < n; ++k) spectrum[k] = 0.0;

  AnalyticLine out;
  out.values = ifft(spectrum);
  return out;
}

std::vector<double> unwrap_phase(std::span<const double> wrapped) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> out(wrapped.begin(), wrapped.end());
  for (std::size_t k = 1; k < wrapped.size(); ++k) {
    const double delta = wrapped[k] - wrapped[k - 1];
    // Principal value in (-pi, pi].
    const double step = delta - two_pi * std::ceil((delta - std::numbers::pi) / two_pi);
    out[k] = out[k - 1] + step;
  }
  return out;
}

EnvelopePhase envelope_and_phase(const AnalyticLine& line) {
  const std::size_t n = line.values.size();
  EnvelopePhase out;
  out.envelope.resize(n);
  std::vector<double> raw_phase(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex v = line.values[k];
    out.envelope[k] = std::abs(v);
    raw_phase[k] = out.envelope[k] == 0.0 ? 0.0 : std::arg(v);
  }
  out.phase = unwrap_phase(raw_phase);
  out.inst_frequency.resize(n);
  if (n == 1) return out;
  out.inst_frequency[0] = out.phase[1] - out.phase[0];
  out.inst_frequency[n - 1] = out.phase[n - 1] - out.phase[n - 2];
  for (std::size_t k = 1; k + 1 < n; ++k)
    out.inst_frequency[k] = 0.5 * (out.phase[k + 1] - out.phase[k - 1]);
  return out;
}

std::vector<double> envelope(std::span<const double> line) {
  const auto analytic = analytic_signal(line);
  std::vector<double> out(analytic.values.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::abs(analytic.values[k]);
  return out;
}

}  // namespace rfssl::signal
