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

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "rfssl/signal/analytic.hpp"
#include "rfssl/signal/augment.hpp"
#include "rfssl/signal/image_ops.hpp"
#include "test_util.hpp"

using namespace rfssl;
using namespace rfssl::signal;
using std::numbers::pi;

TEST_CASE("analytic signal of a pure tone is a complex exponential") {
  const int n = 256;
  std::vector<double> s(n);
  for (int k = 0; k < n; ++k) s[k] = std::cos(2 * pi * 8 * k / n);
  const auto a = analytic_signal(s);
  for (int k = 0; k < n; ++k) {
    const Complex expected = std::polar(1.0, 2 * pi * 8 * k / n);
    CHECK(std::abs(a.values[k] - expected) < 1e-10);
  }
  const auto ep = envelope_and_phase(a);
  for (double e : ep.envelope) CHECK(e == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("analytic signal of zeros is zero") {
  const std::vector<double> s(32, 0.0);
  const auto a = analytic_signal(s);
  for (auto v : a.values) CHECK(v == Complex(0.0, 0.0));
  const auto ep = envelope_and_phase(a);
  for (std::size_t k = 0; k < s.size(); ++k) {
    CHECK(ep.envelope[k] == 0.0);
    CHECK(ep.phase[k] == 0.0);
  }
}

TEST_CASE("FFT Hilbert path matches the O(N^2) kernel oracle") {
  Rng rng(11);
  for (int n : {4, 5, 7, 64, 63, 128, 255, 256}) {
    std::vector<double> s(n);
    for (auto& v : s) v = rng.normal();
    const auto a = analytic_signal(s);
    const auto oracle = testing::hilbert_bruteforce(s);
    for (int k = 0; k < n; ++k) {
      CHECK(std::abs(a.values[k].real() - s[k]) <= 1e-10);
      CHECK(std::abs(a.values[k].imag() - oracle[k]) <= 1e-8);
    }
  }
}

TEST_CASE("even-length kernel oracle agrees with the closed-form cotangent kernel") {
  // For even N the DFT Hilbert kernel is (2/N) cot(pi m / N) on odd m, else 0.
  const int n = 64;
  Rng rng(3);
  std::vector<double> s(n);
  for (auto& v : s) v = rng.uniform(-1, 1);
  const auto oracle = testing::hilbert_bruteforce(s);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int m = 1; m < n; m += 2) acc += 2.0 / n / std::tan(pi * m / n) * s[(i - m + n) % n];
    CHECK(oracle[i] == doctest::Approx(acc).epsilon(1e-10));
  }
}

TEST_CASE("analytic signal rejects short or non-finite lines") {
  CHECK_THROWS_AS(analytic_signal(std::vector<double>{1, 2, 3}), InvalidArgument);
  CHECK_THROWS_AS(analytic_signal(std::vector<double>{1, 2, NAN, 4}), InvalidArgument);
  CHECK_THROWS_AS(analytic_signal(std::vector<double>{1, 2, INFINITY, 4}), InvalidArgument);
}

TEST_CASE("negative-frequency spectrum of the analytic signal vanishes") {
  Rng rng(5);
  for (int n : {16, 17}) {
    std::vector<double> s(n);
    for (auto& v : s) v = rng.normal();
    const auto spectrum = fft(analytic_signal(s).values);
    for (int k = n / 2 + 1; k < n; ++k) CHECK(std::abs(spectrum[k]) < 1e-12);
  }
}

TEST_CASE("instantaneous frequency of a tone is 2 pi f") {
  const int n = 512;
  const double f = 20.0 / n;
  std::vector<double> s(n);
  for (int k = 0; k < n; ++k) s[k] = std::sin(2 * pi * f * k + 0.3);
  const auto ep = envelope_and_phase(analytic_signal(s));
  for (int k = 5; k < n - 5; ++k) CHECK(std::abs(ep.inst_frequency[k] - 2 * pi * f) < 1e-3);
}

TEST_CASE("envelope of an amplitude-modulated tone recovers the modulation") {
  const int n = 512;
  std::vector<double> s(n), a(n);
  for (int k = 0; k < n; ++k) {
    a[k] = 1.0 + 0.5 * std::cos(2 * pi * 2 * k / n);
    s[k] = a[k] * std::cos(2 * pi * 16 * k / n);
  }
  const auto ep = envelope_and_phase(analytic_signal(s));
  const int margin = n / 20;
  for (int k = margin; k < n - margin; ++k) CHECK(std::abs(ep.envelope[k] - a[k]) < 2e-2);
}

TEST_CASE("unwrap_phase removes 2 pi jumps") {
  std::vector<double> truth(100), wrapped(100);
  for (int k = 0; k < 100; ++k) {
    truth[k] = 0.4 * k;
    wrapped[k] = std::remainder(truth[k], 2 * pi);
  }
  const auto unwrapped = unwrap_phase(wrapped);
  for (int k = 0; k < 100; ++k) CHECK(unwrapped[k] == doctest::Approx(truth[k]).epsilon(1e-12));
}

TEST_CASE("phase shift by zero is the identity") {
  Rng rng(1);
  const Patch p = testing::random_patch(32, 8, rng);
  const Patch out = phase_shift_augment(p, 0.0);
  CHECK(testing::max_abs_diff(p, out) <= 1e-10);
}

TEST_CASE("phase shift rotates a tone column") {
  const int n = 256;
  Patch p(n, 3);
  for (int k = 0; k < n; ++k)
    for (int c = 0; c < 3; ++c) p(k, c) = std::cos(2 * pi * 8 * k / n);
  const Patch out = phase_shift_augment(p, pi / 2);
  for (int k = 0; k < n; ++k)
    for (int c = 0; c < 3; ++c) CHECK(std::abs(out(k, c) + std::sin(2 * pi * 8 * k / n)) < 1e-6);
}

TEST_CASE("phase shift by pi twice restores the patch") {
  Rng rng(2);
  const Patch p = testing::random_patch(64, 16, rng);
  const Patch twice = phase_shift_augment(phase_shift_augment(p, pi), pi);
  CHECK(testing::max_abs_diff(p, twice) <= 1e-8);
}

TEST_CASE("phase shift keeps the column mean and the envelope of the zero-mean part") {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    Patch p = testing::bandlimited_patch(128, 6, 3, 60, rng);
    for (double& v : p.values()) v += 0.5;  // normalized patches sit around 0.5
    const double theta = rng.uniform(0, 2 * pi);
    const Patch out = phase_shift_augment(p, theta);
    for (int c = 0; c < p.cols(); ++c) {
      auto in_col = p.column(c), out_col = out.column(c);
      CHECK(testing::mean(out_col) == doctest::Approx(testing::mean(in_col)).epsilon(1e-12));
      for (auto& v : in_col) v -= 0.5;
      for (auto& v : out_col) v -= 0.5;
      const auto e_in = envelope(in_col), e_out = envelope(out_col);
      const double scale = *std::max_element(e_in.begin(), e_in.end());
      for (std::size_t k = 0; k < e_in.size(); ++k)
        CHECK(std::abs(e_out[k] - e_in[k]) / scale <= 1e-5);
    }
  }
}

TEST_CASE("phase shift rejects theta outside [0, 2 pi)") {
  Patch p(8, 2, 0.0);
  CHECK_THROWS_AS(phase_shift_augment(p, -0.1), InvalidArgument);
  CHECK_THROWS_AS(phase_shift_augment(p, 2 * pi), InvalidArgument);
}

TEST_CASE("envelope noise is band limited, scaled and clamped") {
  Rng rng(9);
  const int n = 256;
  const auto noise = envelope_noise(n, 0.2, 0.1, rng);
  CHECK(testing::stddev(noise) == doctest::Approx(0.2).epsilon(0.05));
  for (double v : noise) CHECK(std::abs(v) <= 0.9);
  std::vector<Complex> c(noise.begin(), noise.end());
  const auto spectrum = fft(c);
  // Cutoff at 0.1 Nyquist is bin 12.8 for N=256.
  for (int k = 13; k <= n - 13; ++k) CHECK(std::abs(spectrum[k]) < 1e-9);
}

TEST_CASE("envelope distortion with zero noise is the identity") {
  Rng rng(1);
  AugmentationConfig cfg;
  cfg.envelope_noise_std = 0.0;
  const Patch p = testing::random_patch(64, 4, rng);
  const Patch out = envelope_distort_augment(p, cfg, rng);
  CHECK(testing::max_abs_diff(p, out) <= 1e-10);
}

TEST_CASE("envelope distortion rejects noise std >= 1") {
  Rng rng(1);
  AugmentationConfig cfg;
  cfg.envelope_noise_std = 1.0;
  CHECK_THROWS_AS(envelope_distort_augment(Patch(16, 2, 0.1), cfg, rng), InvalidArgument);
}

TEST_CASE("envelope distortion leaves a tone's instantaneous frequency unchanged") {
  const int n = 256;
  Patch p(n, 2);
  for (int k = 0; k < n; ++k) {
    p(k, 0) = std::cos(2 * pi * 32 * k / n);
    p(k, 1) = std::sin(2 * pi * 40 * k / n);
  }
  AugmentationConfig cfg;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const Patch out = envelope_distort_augment(p, cfg, rng);
    for (int c = 0; c < 2; ++c) {
      const auto before = envelope_and_phase(analytic_signal(p.column(c)));
      const auto after = envelope_and_phase(analytic_signal(out.column(c)));
      for (int k = 8; k < n - 8; ++k)
        CHECK(std::abs(before.inst_frequency[k] - after.inst_frequency[k]) < 1e-3);
    }
  }
}

TEST_CASE("envelope distortion scales the envelope by 1 + n and keeps the phase") {
  Rng rng(21);
  const int n = 256;
  AugmentationConfig cfg;
  for (int trial = 0; trial < 5; ++trial) {
    // Column spectra sit in bins 14..114, above the noise band (<= 12) and
    // away from Nyquist, so the product stays analytic.
    const Patch p = testing::bandlimited_patch(n, 4, 14, 114, rng);
    Rng noise_rng(100 + trial);
    const auto noise = envelope_noise(n, cfg.envelope_noise_std, cfg.envelope_noise_cutoff, noise_rng);
    const Patch out = apply_envelope_noise(p, noise);
    for (int c = 0; c < p.cols(); ++c) {
      const auto before = envelope_and_phase(analytic_signal(p.column(c)));
      const auto after = envelope_and_phase(analytic_signal(out.column(c)));
      const double peak = *std::max_element(before.envelope.begin(), before.envelope.end());
      for (int k = 0; k < n; ++k) {
        CHECK(std::abs(after.envelope[k] - before.envelope[k] * (1 + noise[k])) <= 1e-5 * peak);
        if (before.envelope[k] > 1e-3 * peak)
          CHECK(std::abs(after.phase[k] - before.phase[k]) <= 1e-3);
      }
    }
  }
}

TEST_CASE("geometric transforms") {
  Rng rng(8);
  const Patch p = testing::random_patch(20, 30, rng);
  SUBCASE("horizontal flip twice is the identity") {
    CHECK(flip_horizontal(flip_horizontal(p)) == p);
    CHECK(flip_vertical(flip_vertical(p)) == p);
    CHECK(flip_horizontal(p)(3, 0) == p(3, 29));
    CHECK(flip_vertical(p)(0, 4) == p(19, 4));
  }
  SUBCASE("translation by zero is the identity") {
    AugmentationConfig cfg;
    CHECK(apply_transform(p, Translate{0.0, 0.0}, cfg) == p);
  }
  SUBCASE("translation fills vacated pixels") {
    const Patch t = translate(p, 2, -3, 0.5);
    CHECK(t(0, 0) == 0.5);
    CHECK(t(1, 10) == 0.5);
    CHECK(t(2, 0) == p(0, 3));
    CHECK(t(5, 27) == 0.5);
    CHECK(t(5, 26) == p(3, 29));
  }
  SUBCASE("out of range parameters are rejected") {
    AugmentationConfig cfg;
    CHECK_THROWS_AS(apply_transform(p, Translate{0.25, 0.0}, cfg), InvalidArgument);
    CHECK_THROWS_AS(apply_transform(p, Erase{0.2, 0.05, 0.1, 0.1}, cfg), InvalidArgument);
    CHECK_THROWS_AS(apply_transform(p, Erase{0.05, 0.01, 0.1, 0.1}, cfg), InvalidArgument);
  }
}

TEST_CASE("erase on 100x100 with 0.05 fractions touches exactly a 5x5 block") {
  Rng rng(12);
  Patch p(100, 100);
  for (double& v : p.values()) v = rng.uniform(0.6, 1.0);
  AugmentationConfig cfg;
  const Patch out = apply_transform(p, Erase{0.05, 0.05, 0.37, 0.81}, cfg);
  int changed = 0, min_r = 100, max_r = -1, min_c = 100, max_c = -1;
  for (int r = 0; r < 100; ++r)
    for (int c = 0; c < 100; ++c)
      if (out(r, c) != p(r, c)) {
        ++changed;
        CHECK(out(r, c) == 0.5);
        min_r = std::min(min_r, r), max_r = std::max(max_r, r);
        min_c = std::min(min_c, c), max_c = std::max(max_c, c);
      }
  CHECK(changed == 25);
  CHECK(max_r - min_r == 4);
  CHECK(max_c - min_c == 4);
}

TEST_CASE("sample_augmentation respects skip probability and order") {
  AugmentationConfig cfg;
  Rng rng(77);
  cfg.skip_probability = 1.0;
  CHECK(sample_augmentation(cfg, rng).empty());

  cfg.skip_probability = 0.0;
  const auto all = sample_augmentation(cfg, rng);
  REQUIRE(all.size() == kCategoryOrder.size());
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(category_of(all[i]) == kCategoryOrder[i]);

  cfg.enabled = {AugmentCategory::phase_shift, AugmentCategory::translation};
  const auto two = sample_augmentation(cfg, rng);
  REQUIRE(two.size() == 2);
  CHECK(category_of(two[0]) == AugmentCategory::translation);
  CHECK(category_of(two[1]) == AugmentCategory::phase_shift);
}

TEST_CASE("each category is present in about half of the draws") {
  AugmentationConfig cfg;
  Rng rng(2024);
  std::map<AugmentCategory, int> counts;
  for (int i = 0; i < 10000; ++i)
    for (const auto& t : sample_augmentation(cfg, rng)) ++counts[category_of(t)];
  for (auto category : kCategoryOrder) {
    INFO(to_string(category));
    CHECK(std::abs(counts[category] - 5000) <= 150);
  }
}

TEST_CASE("augmentation is deterministic given the rng state") {
  Rng data(5);
  const Patch p = testing::random_patch(64, 64, data);
  AugmentationConfig cfg;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng a(seed), b(seed);
    CHECK(augment(p, cfg, a) == augment(p, cfg, b));
  }
}

TEST_CASE("instance normalization") {
  SUBCASE("constant patch is degenerate") {
    const auto out = instance_normalize(Patch(5, 5, 3.0));
    CHECK(out.degenerate);
    for (double v : out.patch.values()) CHECK(v == 0.5);
  }
  SUBCASE("window endpoints map to 0, 0.5, 1") {
    // 32 pixels: 30 zeros, +a and -a. Mean 0, population std a/4.
    Patch p(4, 8, 0.0);
    p(1, 1) = 2.0;
    p(2, 5) = -2.0;
    const auto out = instance_normalize(p);
    CHECK_FALSE(out.degenerate);
    CHECK(out.patch(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(out.patch(2, 5) == doctest::Approx(0.0));
    CHECK(out.patch(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("far outliers clamp to exactly 1") {
    Patch p(16, 16, 0.0);
    p(7, 7) = 100.0;  // sqrt(255) > 10 sigma above the mean
    const double m = testing::mean(p.values());
    const double s = testing::stddev(p.values());
    REQUIRE(p(7, 7) >= m + 10 * s);
    CHECK(instance_normalize(p).patch(7, 7) == 1.0);
  }
  SUBCASE("outputs lie in [0,1]") {
    Rng rng(3);
    Patch p(32, 32);
    for (double& v : p.values()) v = std::pow(rng.normal(), 3);
    for (double v : instance_normalize(p).patch.values()) CHECK((v >= 0.0 && v <= 1.0));
  }
}

TEST_CASE("instance normalization is idempotent on clamp-free inputs") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    Patch p(8 + trial % 5, 7 + trial % 3);
    for (double& v : p.values()) v = rng.uniform(-3, 5);  // uniform never exceeds 4 sigma
    const auto once = instance_normalize(p).patch;
    const auto twice = instance_normalize(once).patch;
    CHECK(testing::max_abs_diff(once, twice) <= 1e-12);
  }
}

TEST_CASE("bilinear resize") {
  SUBCASE("constant input stays constant") {
    const Patch out = resize_bilinear(Array2D(7, 13, 7.0), 20, 5);
    for (double v : out.values()) CHECK(v == doctest::Approx(7.0).epsilon(1e-15));
  }
  SUBCASE("identity size copies") {
    Rng rng(1);
    const Patch p = testing::random_patch(9, 4, rng);
    CHECK(resize_bilinear(p, 9, 4) == p);
  }
  SUBCASE("2x2 to 3x3 has the bilinear center") {
    Array2D in(2, 2, std::vector<double>{0, 1, 1, 2});
    const Patch out = resize_bilinear(in, 3, 3);
    CHECK(out(1, 1) == doctest::Approx(1.0));
    CHECK(out(0, 0) == 0.0);
    CHECK(out(2, 2) == 2.0);
    CHECK(out(0, 1) == doctest::Approx(0.5));
  }
  SUBCASE("empty input is rejected") {
    CHECK_THROWS_AS(resize_bilinear(Array2D(), 3, 3), InvalidArgument);
  }
}
