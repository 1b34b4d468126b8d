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

// Shared helpers and independent oracles for the test suites. Nothing here
// calls into the library code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "rfssl/core/array2d.hpp"
#include "rfssl/core/rng.hpp"

namespace rfssl::testing {

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Population standard deviation.
inline double stddev(std::span<const double> v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

inline double max_abs_diff(const Array2D& a, const Array2D& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
  return worst;
}

inline Array2D random_patch(int rows, int cols, Rng& rng) {
  Array2D p(rows, cols);
  for (double& v : p.values()) v = rng.uniform();
  return p;
}

/// Columns are sums of random-phase sinusoids on DFT bins [bin_lo, bin_hi],
/// so each column is zero-mean with known spectral support.
inline Array2D bandlimited_patch(int rows, int cols, int bin_lo, int bin_hi, Rng& rng) {
  Array2D p(rows, cols, 0.0);
  for (int c = 0; c < cols; ++c)
    for (int bin = bin_lo; bin <= bin_hi; ++bin) {
      const double amp = rng.normal() / std::sqrt(static_cast<double>(bin_hi - bin_lo + 1));
      const double phase = rng.uniform(0, 2 * std::numbers::pi);
      for (int r = 0; r < rows; ++r)
        p(r, c) += amp * std::cos(2 * std::numbers::pi * bin * r / rows + phase);
    }
  return p;
}

/// Discrete Hilbert transform by explicit circular convolution with the
/// kernel h[m] = (2/N) * sum_{k=1}^{ceil(N/2)-1} sin(2 pi k m / N).
inline std::vector<double> hilbert_bruteforce(std::span<const double> s) {
  const int n = static_cast<int>(s.size());
  const int last = (n + 1) / 2 - 1;
  std::vector<double> kernel(static_cast<std::size_t>(n), 0.0);
  for (int m = 0; m < n; ++m) {
    double acc = 0.0;
    for (int k = 1; k <= last; ++k) acc += std::sin(2 * std::numbers::pi * k * m / n);
    kernel[static_cast<std::size_t>(m)] = 2.0 * acc / n;
  }
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int m = 0; m < n; ++m)
      out[static_cast<std::size_t>(i)] +=
          kernel[static_cast<std::size_t>(m)] * s[static_cast<std::size_t>((i - m + n) % n)];
  return out;
}

/// Row-major n x d matrix as nested vectors, for the explicit-loop oracles.
using Rows = std::vector<std::vector<double>>;

inline Rows random_rows(int n, int d, Rng& rng, double scale = 1.0) {
  Rows z(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(d)));
  for (auto& row : z)
    for (double& v : row) v = rng.normal(0.0, scale);
  return z;
}

struct NaiveVicreg {
  double s = 0, v = 0, vp = 0, c = 0, cp = 0, total = 0;
};

inline double naive_invariance(const Rows& z, const Rows& zp) {
  double acc = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = 0; j < z[i].size(); ++j) acc += (z[i][j] - zp[i][j]) * (z[i][j] - zp[i][j]);
  return acc / static_cast<double>(z.size());
}

inline double naive_column_mean(const Rows& z, std::size_t j) {
  double m = 0.0;
  for (const auto& row : z) m += row[j];
  return m / static_cast<double>(z.size());
}

inline double naive_covariance_entry(const Rows& z, std::size_t j, std::size_t k) {
  const double mj = naive_column_mean(z, j), mk = naive_column_mean(z, k);
  double acc = 0.0;
  for (const auto& row : z) acc += (row[j] - mj) * (row[k] - mk);
  return acc / static_cast<double>(z.size() - 1);
}

inline double naive_variance(const Rows& z, double gamma, double eps) {
  const std::size_t d = z[0].size();
  double acc = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(eps + naive_covariance_entry(z, j, j));
    acc += std::max(0.0, gamma - sd);
  }
  return acc / static_cast<double>(d);
}

inline double naive_covariance(const Rows& z) {
  const std::size_t d = z[0].size();
  double acc = 0.0;
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < d; ++k)
      if (j != k) {
        const double c = naive_covariance_entry(z, j, k);
        acc += c * c;
      }
  return acc / static_cast<double>(d);
}

inline NaiveVicreg naive_vicreg(const Rows& z, const Rows& zp, double lambda, double mu, double nu,
                                double gamma, double eps) {
  NaiveVicreg r;
  r.s = naive_invariance(z, zp);
  r.v = naive_variance(z, gamma, eps);
  r.vp = naive_variance(zp, gamma, eps);
  r.c = naive_covariance(z);
  r.cp = naive_covariance(zp);
  r.total = lambda * r.s + mu * (r.v + r.vp) + nu * (r.c + r.cp);
  return r;
}

}  // namespace rfssl::testing
