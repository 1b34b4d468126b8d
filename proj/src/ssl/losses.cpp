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

#include "rfssl/ssl/losses.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "rfssl/core/error.hpp"

namespace rfssl::ssl {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

RowMatrix as_matrix(const Tensor& t) {
  return Eigen::Map<const RowMatrix>(t.data(), t.dim(0), t.dim(1));
}

Tensor as_tensor(const RowMatrix& m) {
  Tensor t({static_cast<int>(m.rows()), static_cast<int>(m.cols())});
  Eigen::Map<RowMatrix>(t.data(), m.rows(), m.cols()) = m;
  return t;
}

void check_batch(const Tensor& z, const char* what, int min_rows = 2) {
  if (z.rank() != 2 || z.dim(1) < 1) throw ShapeMismatch(std::string(what) + ": expected an {n,d} batch");
  if (z.dim(0) < min_rows)
    throw InvalidArgument(std::string(what) + ": need at least " + std::to_string(min_rows) + " rows");
  for (double v : z.values())
    if (!std::isfinite(v)) throw NumericError(std::string(what) + ": non-finite entry");
}

void check_pair(const Tensor& z, const Tensor& zp, const char* what) {
  check_batch(z, what);
  check_batch(zp, what);
  if (!z.same_shape(zp)) throw ShapeMismatch(std::string(what) + ": batch shapes differ");
}

RowMatrix centered(const RowMatrix& z) { return z.rowwise() - z.colwise().mean(); }

// Value and dZ of mu * v(Z) + nu * c(Z).
double regularizer(const RowMatrix& z, const VicregWeights& w, double& v_out, double& c_out, RowMatrix* grad) {
  const auto n = static_cast<double>(z.rows());
  const auto d = static_cast<double>(z.cols());
  const RowMatrix zc = centered(z);
  RowMatrix cov = (zc.transpose() * zc) / (n - 1.0);

  double v = 0.0;
  Eigen::RowVectorXd dv_scale = Eigen::RowVectorXd::Zero(z.cols());
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    const double sigma = std::sqrt(w.epsilon + cov(j, j));
    if (w.gamma > sigma) {
      v += w.gamma - sigma;
      // Hinge open: d/dz_ij = -(z_ij - m_j) / (d (n-1) sigma_j); sigma_j > 0
      // requires eps > 0 or non-zero variance.
      dv_scale(j) = sigma > 0.0 ? -1.0 / (d * (n - 1.0) * sigma) : 0.0;
    }
  }
  v /= d;

  RowMatrix off = cov;
  off.diagonal().setZero();
  const double c = off.squaredNorm() / d;

  v_out = v;
  c_out = c;
  if (grad) {
    *grad = w.mu * (zc.array().rowwise() * dv_scale.array()).matrix() +
            w.nu * (4.0 / (d * (n - 1.0))) * (zc * off);
  }
  return w.mu * v + w.nu * c;
}

}  // namespace

void VicregWeights::validate() const {
  if (!(lambda >= 0.0) || !(mu >= 0.0) || !(nu >= 0.0) || !(epsilon >= 0.0))
    throw ConfigError("vicreg: weights and epsilon must be non-negative");
  if (!(gamma > 0.0)) throw ConfigError("vicreg: gamma must be positive");
}

double invariance_term(const Tensor& z, const Tensor& zp) {
  check_pair(z, zp, "invariance_term");
  return (as_matrix(z) - as_matrix(zp)).squaredNorm() / z.dim(0);
}

double variance_term(const Tensor& z, double gamma, double epsilon) {
  check_batch(z, "variance_term");
  VicregWeights w;
  w.gamma = gamma;
  w.epsilon = epsilon;
  double v = 0.0, c = 0.0;
  regularizer(as_matrix(z), w, v, c, nullptr);
  return v;
}

double covariance_term(const Tensor& z) {
  check_batch(z, "covariance_term");
  double v = 0.0, c = 0.0;
  regularizer(as_matrix(z), VicregWeights{}, v, c, nullptr);
  return c;
}

VicregResult vicreg_loss(const Tensor& z, const Tensor& zp, const VicregWeights& w, bool with_grad) {
  w.validate();
  check_pair(z, zp, "vicreg_loss");
  const RowMatrix a = as_matrix(z), b = as_matrix(zp);
  const auto n = static_cast<double>(a.rows());
  VicregResult r;
  const RowMatrix diff = a - b;
  r.components.invariance = diff.squaredNorm() / n;

  RowMatrix ga, gb;
  regularizer(a, w, r.components.variance_z, r.components.covariance_z, with_grad ? &ga : nullptr);
  regularizer(b, w, r.components.variance_zp, r.components.covariance_zp, with_grad ? &gb : nullptr);
  const auto& c = r.components;
  r.total = w.lambda * c.invariance + w.mu * (c.variance_z + c.variance_zp) +
            w.nu * (c.covariance_z + c.covariance_zp);
  if (!std::isfinite(r.total)) throw NumericError("vicreg_loss: non-finite loss");
  if (with_grad) {
    const RowMatrix ds = (2.0 * w.lambda / n) * diff;
    r.grad_z = as_tensor(ga + ds);
    r.grad_zp = as_tensor(gb - ds);
  }
  return r;
}

PairLoss nt_xent_loss(const Tensor& z, const Tensor& zp, double temperature) {
  check_pair(z, zp, "nt_xent_loss");
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    throw InvalidArgument("nt_xent_loss: temperature must be positive");
  const Eigen::Index n = z.dim(0), d = z.dim(1), m = 2 * n;
  RowMatrix x(m, d);
  x.topRows(n) = as_matrix(z);
  x.bottomRows(n) = as_matrix(zp);
  const Eigen::VectorXd norms = x.rowwise().norm();
  for (Eigen::Index i = 0; i < m; ++i)
    if (!(norms(i) > 0.0)) throw NumericError("nt_xent_loss: zero-norm row " + std::to_string(i));
  const RowMatrix u = norms.cwiseInverse().asDiagonal() * x;
  const RowMatrix s = (u * u.transpose()) / temperature;

  // g(a, k) = dL/ds(a, k)
  RowMatrix g = RowMatrix::Zero(m, m);
  double loss = 0.0;
  for (Eigen::Index a = 0; a < m; ++a) {
    const Eigen::Index pos = a < n ? a + n : a - n;
    double peak = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < m; ++k)
      if (k != a) peak = std::max(peak, s(a, k));
    double sum = 0.0;
    for (Eigen::Index k = 0; k < m; ++k)
      if (k != a) sum += std::exp(s(a, k) - peak);
    const double log_z = peak + std::log(sum);
    loss += log_z - s(a, pos);
    for (Eigen::Index k = 0; k < m; ++k)
      if (k != a) g(a, k) = std::exp(s(a, k) - log_z) / static_cast<double>(m);
    g(a, pos) -= 1.0 / static_cast<double>(m);
  }
  loss /= static_cast<double>(m);

  const RowMatrix du = ((g + g.transpose()) * u) / temperature;
  // Through u = x / |x|: dx = (du - u (u . du)) / |x|.
  const Eigen::VectorXd radial = (u.array() * du.array()).rowwise().sum();
  const RowMatrix dx = norms.cwiseInverse().asDiagonal() * (du - radial.asDiagonal() * u);
  return {loss, as_tensor(dx.topRows(n)), as_tensor(dx.bottomRows(n))};
}

PairLoss byol_cosine_loss(const Tensor& p, const Tensor& t) {
  check_batch(p, "byol_cosine_loss", 1);
  check_batch(t, "byol_cosine_loss", 1);
  if (!p.same_shape(t)) throw ShapeMismatch("byol_cosine_loss: batch shapes differ");
  const RowMatrix a = as_matrix(p), b = as_matrix(t);
  const auto n = static_cast<double>(a.rows());
  RowMatrix grad(a.rows(), a.cols());
  double mean_cos = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double na = a.row(i).norm(), nb = b.row(i).norm();
    if (!(na > 0.0) || !(nb > 0.0)) throw NumericError("byol_cosine_loss: zero-norm row");
    const Eigen::RowVectorXd ua = a.row(i) / na, ub = b.row(i) / nb;
    const double cos = ua.dot(ub);
    mean_cos += cos;
    grad.row(i) = (-2.0 / n) * (ub - cos * ua) / na;
  }
  mean_cos /= n;
  return {2.0 - 2.0 * mean_cos, as_tensor(grad), Tensor()};
}

}  // namespace rfssl::ssl
