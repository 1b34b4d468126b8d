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

#include "rfssl/nn/layers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>

#include "rfssl/core/error.hpp"

namespace rfssl::nn {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

struct ConvGeometry {
  int channels, batch, height, width, out_h, out_w, kernel, stride, padding;
  std::size_t rows() const { return static_cast<std::size_t>(channels) * kernel * kernel; }
  std::size_t cols() const { return static_cast<std::size_t>(batch) * out_h * out_w; }
};

// Output columns [lo, hi) whose input column ox*stride + kx - padding is in range.
std::pair<int, int> valid_range(const ConvGeometry& g, int kx) {
  const int off = kx - g.padding;
  int lo = off >= 0 ? 0 : (-off + g.stride - 1) / g.stride;
  int hi = (g.width - 1 - off) >= 0 ? (g.width - 1 - off) / g.stride + 1 : 0;
  hi = std::min(hi, g.out_w);
  return {std::min(lo, hi), hi};
}

void im2col(const double* x, const ConvGeometry& g, double* cols) {
  const std::size_t ncols = g.cols();
  for (int c = 0; c < g.channels; ++c)
    for (int ky = 0; ky < g.kernel; ++ky)
      for (int kx = 0; kx < g.kernel; ++kx) {
        double* dst = cols + (static_cast<std::size_t>(c * g.kernel + ky) * g.kernel + kx) * ncols;
        const auto [lo, hi] = valid_range(g, kx);
        const int off = kx - g.padding;
        for (int n = 0; n < g.batch; ++n) {
          const double* plane = x + (static_cast<std::size_t>(c) * g.batch + n) * g.height * g.width;
          for (int oy = 0; oy < g.out_h; ++oy) {
            const int iy = oy * g.stride + ky - g.padding;
            double* out_row = dst + (static_cast<std::size_t>(n) * g.out_h + oy) * g.out_w;
            if (iy < 0 || iy >= g.height) {
              std::fill(out_row, out_row + g.out_w, 0.0);
              continue;
            }
            const double* in_row = plane + static_cast<std::size_t>(iy) * g.width + off;
            std::fill(out_row, out_row + lo, 0.0);
            if (g.stride == 1) {
              std::copy(in_row + lo, in_row + hi, out_row + lo);
            } else {
              for (int ox = lo; ox < hi; ++ox) out_row[ox] = in_row[ox * g.stride];
            }
            std::fill(out_row + hi, out_row + g.out_w, 0.0);
          }
        }
      }
}

void col2im(const double* cols, const ConvGeometry& g, double* dx) {
  const std::size_t ncols = g.cols();
  for (int c = 0; c < g.channels; ++c)
    for (int ky = 0; ky < g.kernel; ++ky)
      for (int kx = 0; kx < g.kernel; ++kx) {
        const double* src = cols + (static_cast<std::size_t>(c * g.kernel + ky) * g.kernel + kx) * ncols;
        const auto [lo, hi] = valid_range(g, kx);
        const int off = kx - g.padding;
        for (int n = 0; n < g.batch; ++n) {
          double* plane = dx + (static_cast<std::size_t>(c) * g.batch + n) * g.height * g.width;
          for (int oy = 0; oy < g.out_h; ++oy) {
            const int iy = oy * g.stride + ky - g.padding;
            if (iy < 0 || iy >= g.height) continue;
            const double* in_row = src + (static_cast<std::size_t>(n) * g.out_h + oy) * g.out_w;
            double* out_row = plane + static_cast<std::size_t>(iy) * g.width + off;
            for (int ox = lo; ox < hi; ++ox) out_row[ox * g.stride] += in_row[ox];
          }
        }
      }
}

std::vector<double> to_vector(const Tensor& t) { return {t.values().begin(), t.values().end()}; }

ConvGeometry geometry(const Conv2d& conv, const std::vector<int>& in_shape) {
  return {conv.in_channels(), in_shape[1], in_shape[2], in_shape[3], conv.output_size(in_shape[2]),
          conv.output_size(in_shape[3]), conv.kernel(), conv.stride(), conv.padding()};
}

bool is_pointwise(const ConvGeometry& g) {
  return g.kernel == 1 && g.stride == 1 && g.padding == 0;
}

}  // namespace

// ---------------------------------------------------------------- Conv2d

Conv2d::Conv2d(std::string name, int in_channels, int out_channels, int kernel, int stride,
               int padding)
    : in_channels_(in_channels),
      out_channels_(out_channels),
      kernel_(kernel),
      stride_(stride),
      padding_(padding) {
  require(in_channels > 0 && out_channels > 0 && kernel > 0 && stride > 0 && padding >= 0,
          "conv2d: invalid geometry");
  weight.name = std::move(name) + ".weight";
  weight.value = Tensor({out_channels, in_channels, kernel, kernel}, 0.0);
}

void Conv2d::init(Rng& rng) {
  const double stddev = std::sqrt(2.0 / (in_channels_ * kernel_ * kernel_));
  for (double& w : weight.value.values()) w = rng.normal(0.0, stddev);
}

Tensor Conv2d::forward(const Tensor& x, Cache* cache) const {
  if (x.rank() != 4 || x.dim(0) != in_channels_)
    throw ShapeMismatch("conv2d " + weight.name + ": expected {" + std::to_string(in_channels_) +
                        ",N,H,W}, got " + x.shape_string());
  const ConvGeometry g = geometry(*this, x.shape());
  if (g.out_h < 1 || g.out_w < 1) throw ShapeMismatch("conv2d: input smaller than kernel");

  Tensor y({out_channels_, g.batch, g.out_h, g.out_w});
  const ConstMatrixMap w(weight.value.data(), out_channels_, static_cast<Eigen::Index>(g.rows()));
  MatrixMap out(y.data(), out_channels_, static_cast<Eigen::Index>(g.cols()));
  AlignedVector cols;
  const double* cols_ptr = x.data();
  if (!is_pointwise(g)) {
    cols.resize(g.rows() * g.cols());
    im2col(x.data(), g, cols.data());
    cols_ptr = cols.data();
  } else if (cache) {
    cols.assign(x.data(), x.data() + x.size());
  }
  out.noalias() = w * ConstMatrixMap(cols_ptr, static_cast<Eigen::Index>(g.rows()),
                                     static_cast<Eigen::Index>(g.cols()));
  if (cache) {
    cache->input_shape = x.shape();
    cache->columns = std::move(cols);
  }
  return y;
}

Tensor Conv2d::backward(const Cache& cache, const Tensor& grad_out, bool param_grads,
                        bool input_grad) {
  if (cache.input_shape.size() != 4) throw InvalidArgument("conv2d " + weight.name + ": backward without forward");
  const ConvGeometry g = geometry(*this, cache.input_shape);
  const auto rows = static_cast<Eigen::Index>(g.rows());
  const auto ncols = static_cast<Eigen::Index>(g.cols());
  if (grad_out.rank() != 4 || grad_out.dim(0) != out_channels_ || grad_out.size() != g.cols() * out_channels_)
    throw ShapeMismatch("conv2d " + weight.name + ": gradient shape mismatch");
  const ConstMatrixMap dy(grad_out.data(), out_channels_, ncols);

  if (param_grads) {
    MatrixMap dw(weight.grad_buffer().data(), out_channels_, rows);
    dw.noalias() += dy * ConstMatrixMap(cache.columns.data(), rows, ncols).transpose();
  }
  if (!input_grad) return {};

  Tensor dx(cache.input_shape, 0.0);
  const ConstMatrixMap w(weight.value.data(), out_channels_, rows);
  if (is_pointwise(g)) {
    MatrixMap(dx.data(), rows, ncols).noalias() = w.transpose() * dy;
  } else {
    AlignedVector dcols(g.rows() * g.cols());
    MatrixMap(dcols.data(), rows, ncols).noalias() = w.transpose() * dy;
    col2im(dcols.data(), g, dx.data());
  }
  return dx;
}

// ------------------------------------------------------------- BatchNorm

BatchNorm::BatchNorm(std::string name, int channels, bool spatial)
    : channels_(channels), spatial_(spatial) {
  require(channels > 0, "batchnorm: channels must be positive");
  gamma = {name + ".gamma", Tensor({channels}, 1.0), {}};
  beta = {name + ".beta", Tensor({channels}, 0.0), {}};
  running_mean = {name + ".running_mean", Tensor({channels}, 0.0)};
  running_var = {name + ".running_var", Tensor({channels}, 1.0)};
}

namespace {

// Per-channel element addressing for the two supported layouts.
struct ChannelView {
  bool spatial;
  int channels;
  std::size_t per_channel;

  static ChannelView of(const Tensor& x, int channels, bool spatial) {
    if (spatial) {
      if (x.rank() != 4 || x.dim(0) != channels)
        throw ShapeMismatch("batchnorm: expected {C,N,H,W} with C=" + std::to_string(channels) +
                            ", got " + x.shape_string());
      return {true, channels, x.size() / static_cast<std::size_t>(channels)};
    }
    if (x.rank() != 2 || x.dim(1) != channels)
      throw ShapeMismatch("batchnorm: expected {N,D} with D=" + std::to_string(channels) +
                          ", got " + x.shape_string());
    return {false, channels, static_cast<std::size_t>(x.dim(0))};
  }
  std::size_t index(int c, std::size_t i) const {
    return spatial ? static_cast<std::size_t>(c) * per_channel + i
                   : i * static_cast<std::size_t>(channels) + static_cast<std::size_t>(c);
  }
};

}  // namespace

Tensor BatchNorm::forward(const Tensor& x, Mode mode, Cache* cache) {
  if (cache) cache->mode = mode;
  if (mode == Mode::eval) {
    if (!cache) return infer(x);
    return normalize(x, to_vector(running_mean.value), to_vector(running_var.value), cache);
  }
  const auto view = ChannelView::of(x, channels_, spatial_);
  const std::size_t m = view.per_channel;
  if (m < 2) throw ShapeMismatch("batchnorm: train mode needs at least 2 values per channel");
  std::vector<double> mean(static_cast<std::size_t>(channels_)), var(mean.size());
  for (int c = 0; c < channels_; ++c) {
    double mu = 0.0;
    for (std::size_t i = 0; i < m; ++i) mu += x[view.index(c, i)];
    mu /= static_cast<double>(m);
    double v = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = x[view.index(c, i)] - mu;
      v += d * d;
    }
    v /= static_cast<double>(m);
    mean[static_cast<std::size_t>(c)] = mu;
    var[static_cast<std::size_t>(c)] = v;
  }
  Tensor y = normalize(x, mean, var, cache);
  const double unbias = static_cast<double>(m) / static_cast<double>(m - 1);
  for (int c = 0; c < channels_; ++c) {
    const auto k = static_cast<std::size_t>(c);
    running_mean.value[k] = momentum * running_mean.value[k] + (1.0 - momentum) * mean[k];
    running_var.value[k] = momentum * running_var.value[k] + (1.0 - momentum) * var[k] * unbias;
  }
  return y;
}

Tensor BatchNorm::infer(const Tensor& x) const {
  return normalize(x, to_vector(running_mean.value), to_vector(running_var.value), nullptr);
}

Tensor BatchNorm::normalize(const Tensor& x, const std::vector<double>& mean,
                            const std::vector<double>& var, Cache* cache) const {
  const auto view = ChannelView::of(x, channels_, spatial_);
  const std::size_t m = view.per_channel;
  Tensor y(x.shape());
  Tensor normalized = cache ? Tensor(x.shape()) : Tensor();
  std::vector<double> inv_std(static_cast<std::size_t>(channels_));
  for (int c = 0; c < channels_; ++c) {
    const auto ci = static_cast<std::size_t>(c);
    const double is = 1.0 / std::sqrt(var[ci] + eps);
    inv_std[ci] = is;
    const double g = gamma.value[ci], b = beta.value[ci], mu = mean[ci];
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t k = view.index(c, i);
      const double xh = (x[k] - mu) * is;
      if (cache) normalized[k] = xh;
      y[k] = g * xh + b;
    }
  }
  if (cache) {
    cache->normalized = std::move(normalized);
    cache->inv_std = std::move(inv_std);
  }
  return y;
}

Tensor BatchNorm::backward(const Cache& cache, const Tensor& grad_out, bool param_grads) {
  if (cache.normalized.empty()) throw InvalidArgument("batchnorm " + gamma.name + ": backward without forward");
  const auto view = ChannelView::of(grad_out, channels_, spatial_);
  const std::size_t m = view.per_channel;
  Tensor dx(grad_out.shape());
  std::vector<double> dgamma(static_cast<std::size_t>(channels_)), dbeta(static_cast<std::size_t>(channels_));

  for (int c = 0; c < channels_; ++c) {
    double sum_dy = 0.0, sum_dy_xh = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t k = view.index(c, i);
      sum_dy += grad_out[k];
      sum_dy_xh += grad_out[k] * cache.normalized[k];
    }
    dgamma[static_cast<std::size_t>(c)] = sum_dy_xh;
    dbeta[static_cast<std::size_t>(c)] = sum_dy;
    const double scale = gamma.value[c] * cache.inv_std[static_cast<std::size_t>(c)];
    if (cache.mode == Mode::train) {
      const double mean_dy = sum_dy / static_cast<double>(m);
      const double mean_dy_xh = sum_dy_xh / static_cast<double>(m);
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t k = view.index(c, i);
        dx[k] = scale * (grad_out[k] - mean_dy - cache.normalized[k] * mean_dy_xh);
      }
    } else {
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t k = view.index(c, i);
        dx[k] = scale * grad_out[k];
      }
    }
  }
  if (param_grads) {
    gamma.accumulate(dgamma);
    beta.accumulate(dbeta);
  }
  return dx;
}

// ------------------------------------------------------------------ ReLU

Tensor relu_forward(const Tensor& x, ReluCache* cache) {
  Tensor y = x;
  for (double& v : y.values()) v = v > 0.0 ? v : 0.0;
  if (cache) cache->output = y;
  return y;
}

Tensor relu_backward(const ReluCache& cache, const Tensor& grad_out) {
  if (!cache.output.same_shape(grad_out)) throw ShapeMismatch("relu: gradient shape mismatch");
  Tensor dx = grad_out;
  for (std::size_t i = 0; i < dx.size(); ++i)
    if (!(cache.output[i] > 0.0)) dx[i] = 0.0;
  return dx;
}

// ---------------------------------------------------------------- Linear

Linear::Linear(std::string name, int in_features, int out_features)
    : in_(in_features), out_(out_features) {
  require(in_features > 0 && out_features > 0, "linear: invalid size");
  weight = {name + ".weight", Tensor({out_features, in_features}, 0.0), {}};
  bias = {name + ".bias", Tensor({out_features}, 0.0), {}};
}

void Linear::init(Rng& rng) {
  const double stddev = std::sqrt(2.0 / in_);
  for (double& w : weight.value.values()) w = rng.normal(0.0, stddev);
  bias.value.fill(0.0);
}

Tensor Linear::forward(const Tensor& x, Cache* cache) const {
  if (x.rank() != 2 || x.dim(1) != in_)
    throw ShapeMismatch(weight.name + ": expected {N," + std::to_string(in_) + "}, got " +
                        x.shape_string());
  const int n = x.dim(0);
  Tensor y({n, out_});
  MatrixMap out(y.data(), n, out_);
  out.noalias() = ConstMatrixMap(x.data(), n, in_) *
                  ConstMatrixMap(weight.value.data(), out_, in_).transpose();
  out.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(bias.value.data(), out_);
  if (cache) cache->input = x;
  return y;
}

Tensor Linear::backward(const Cache& cache, const Tensor& grad_out, bool param_grads,
                        bool input_grad) {
  if (cache.input.empty()) throw InvalidArgument(weight.name + ": backward without forward");
  const int n = cache.input.dim(0);
  if (grad_out.rank() != 2 || grad_out.dim(0) != n || grad_out.dim(1) != out_)
    throw ShapeMismatch(weight.name + ": gradient shape mismatch");
  const ConstMatrixMap dy(grad_out.data(), n, out_);
  if (param_grads) {
    MatrixMap(weight.grad_buffer().data(), out_, in_).noalias() +=
        dy.transpose() * ConstMatrixMap(cache.input.data(), n, in_);
    Eigen::Map<Eigen::RowVectorXd>(bias.grad_buffer().data(), out_) += dy.colwise().sum();
  }
  if (!input_grad) return {};
  Tensor dx({n, in_});
  MatrixMap(dx.data(), n, in_).noalias() = dy * ConstMatrixMap(weight.value.data(), out_, in_);
  return dx;
}

// --------------------------------------------------------------- Pooling

Tensor global_avg_pool_forward(const Tensor& x) {
  if (x.rank() != 4) throw ShapeMismatch("global_avg_pool: expected {C,N,H,W}");
  const int c = x.dim(0), n = x.dim(1);
  const std::size_t hw = static_cast<std::size_t>(x.dim(2)) * x.dim(3);
  Tensor y({n, c});
  for (int ci = 0; ci < c; ++ci)
    for (int ni = 0; ni < n; ++ni) {
      const double* plane = x.data() + (static_cast<std::size_t>(ci) * n + ni) * hw;
      double s = 0.0;
      for (std::size_t i = 0; i < hw; ++i) s += plane[i];
      y[static_cast<std::size_t>(ni) * c + ci] = s / static_cast<double>(hw);
    }
  return y;
}

Tensor global_avg_pool_backward(const std::vector<int>& input_shape, const Tensor& grad_out) {
  const int c = input_shape[0], n = input_shape[1];
  const std::size_t hw = static_cast<std::size_t>(input_shape[2]) * input_shape[3];
  if (grad_out.rank() != 2 || grad_out.dim(0) != n || grad_out.dim(1) != c)
    throw ShapeMismatch("global_avg_pool: gradient shape mismatch");
  Tensor dx(input_shape);
  for (int ci = 0; ci < c; ++ci)
    for (int ni = 0; ni < n; ++ni) {
      const double g = grad_out[static_cast<std::size_t>(ni) * c + ci] / static_cast<double>(hw);
      double* plane = dx.data() + (static_cast<std::size_t>(ci) * n + ni) * hw;
      std::fill(plane, plane + hw, g);
    }
  return dx;
}

Tensor images_to_channel_major(const Tensor& batch) {
  if (batch.rank() == 4 && batch.dim(1) == 1)
    return batch.reshaped({1, batch.dim(0), batch.dim(2), batch.dim(3)});
  if (batch.rank() == 3) return batch.reshaped({1, batch.dim(0), batch.dim(1), batch.dim(2)});
  throw ShapeMismatch("expected an {N,1,H,W} image batch, got " + batch.shape_string());
}

void add_inplace(Tensor& target, const Tensor& other) {
  if (!target.same_shape(other)) throw ShapeMismatch("add: shape mismatch");
  for (std::size_t i = 0; i < target.size(); ++i) target[i] += other[i];
}

}  // namespace rfssl::nn
