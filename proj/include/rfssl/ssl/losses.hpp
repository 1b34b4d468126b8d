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

#include "rfssl/nn/tensor.hpp"

namespace rfssl::ssl {

using nn::Tensor;

struct VicregWeights {
  double lambda = 25.0;  // invariance
  double mu = 25.0;      // variance
  double nu = 1.0;       // covariance
  double gamma = 1.0;    // std target
  double epsilon = 1e-4;

  void validate() const;
};

struct VicregComponents {
  double invariance = 0.0;
  double variance_z = 0.0;
  double variance_zp = 0.0;
  double covariance_z = 0.0;
  double covariance_zp = 0.0;
};

struct VicregResult {
  double total = 0.0;
  VicregComponents components;
  Tensor grad_z;   // empty unless requested
  Tensor grad_zp;
};

/// (1/n) sum_i |z_i - z'_i|^2 over {n,d} batches.
double invariance_term(const Tensor& z, const Tensor& zp);
/// (1/d) sum_j max(0, gamma - sqrt(eps + Var_j)), unbiased variance, n >= 2.
double variance_term(const Tensor& z, double gamma, double epsilon);
/// (1/d) sum of squared off-diagonal entries of the unbiased covariance.
double covariance_term(const Tensor& z);

VicregResult vicreg_loss(const Tensor& z, const Tensor& zp, const VicregWeights& w, bool with_grad = true);

struct PairLoss {
  double loss = 0.0;
  Tensor grad_a;
  Tensor grad_b;
};

/// NT-Xent over the 2n views: rows are L2-normalized, similarities divided by
/// the temperature, each view's positive is its counterpart and the other
/// 2n-2 views are negatives; mean over all 2n anchors.
PairLoss nt_xent_loss(const Tensor& z, const Tensor& zp, double temperature);

/// 2 - 2 * mean_i cos(p_i, t_i). Only grad_a (w.r.t. p) is filled; the
/// target side is treated as a constant.
PairLoss byol_cosine_loss(const Tensor& p, const Tensor& t);

}  // namespace rfssl::ssl
