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

#include <string>
#include <vector>

#include "rfssl/core/rng.hpp"
#include "rfssl/nn/tensor.hpp"

namespace rfssl::nn {

enum class Mode { train, eval };

/// 2D convolution without bias over {C, N, H, W} activations, computed as
/// im2col + one GEMM per batch.
class Conv2d {
 public:
  struct Cache {
    std::vector<int> input_shape;
    AlignedVector columns;  // im2col matrix of the input
  };

  Conv2d() = default;
  Conv2d(std::string name, int in_channels, int out_channels, int kernel, int stride, int padding);

  Tensor forward(const Tensor& x, Cache* cache) const;
  /// Accumulates dL/dW when `param_grads`; returns dL/dx when `input_grad`
  /// (otherwise an empty tensor).
  Tensor backward(const Cache& cache, const Tensor& grad_out, bool param_grads, bool input_grad);

  /// He normal initialization, std = sqrt(2 / fan_in).
  void init(Rng& rng);
  int output_size(int input) const { return (input + 2 * padding_ - kernel_) / stride_ + 1; }
  int in_channels() const noexcept { return in_channels_; }
  int out_channels() const noexcept { return out_channels_; }
  int kernel() const noexcept { return kernel_; }
  int stride() const noexcept { return stride_; }
  int padding() const noexcept { return padding_; }

  Parameter weight;  // {out, in, k, k}

 private:
  int in_channels_ = 0;
  int out_channels_ = 0;
  int kernel_ = 1;
  int stride_ = 1;
  int padding_ = 0;
};

/// Batch normalization. Spatial instances normalize {C, N, H, W} per channel;
/// flat instances normalize {N, D} per feature. Train mode uses batch
/// statistics and updates running estimates with
/// running = momentum * running + (1 - momentum) * batch.
class BatchNorm {
 public:
  struct Cache {
    Mode mode = Mode::train;
    Tensor normalized;
    std::vector<double> inv_std;
  };

  BatchNorm() = default;
  BatchNorm(std::string name, int channels, bool spatial);

  Tensor forward(const Tensor& x, Mode mode, Cache* cache);
  /// Eval-mode forward that touches no state.
  Tensor infer(const Tensor& x) const;
  Tensor backward(const Cache& cache, const Tensor& grad_out, bool param_grads);

  int channels() const noexcept { return channels_; }

  Parameter gamma;
  Parameter beta;
  Buffer running_mean;
  Buffer running_var;
  double momentum = 0.9;
  double eps = 1e-5;

 private:
  Tensor normalize(const Tensor& x, const std::vector<double>& mean, const std::vector<double>& var,
                   Cache* cache) const;

  int channels_ = 0;
  bool spatial_ = true;
};

struct ReluCache {
  Tensor output;
};
Tensor relu_forward(const Tensor& x, ReluCache* cache);
Tensor relu_backward(const ReluCache& cache, const Tensor& grad_out);

/// y = x W^T + b on {N, in} inputs.
class Linear {
 public:
  struct Cache {
    Tensor input;
  };

  Linear() = default;
  Linear(std::string name, int in_features, int out_features);

  Tensor forward(const Tensor& x, Cache* cache) const;
  Tensor backward(const Cache& cache, const Tensor& grad_out, bool param_grads, bool input_grad);
  void init(Rng& rng);
  int in_features() const noexcept { return in_; }
  int out_features() const noexcept { return out_; }

  Parameter weight;  // {out, in}
  Parameter bias;    // {out}

 private:
  int in_ = 0;
  int out_ = 0;
};

/// {C, N, H, W} -> {N, C} spatial mean.
Tensor global_avg_pool_forward(const Tensor& x);
Tensor global_avg_pool_backward(const std::vector<int>& input_shape, const Tensor& grad_out);

/// Converts {N, 1, H, W} (or {N, H, W}) image batches to the {1, N, H, W}
/// channel-major layout; the memory is shared so this only relabels.
Tensor images_to_channel_major(const Tensor& batch);

void add_inplace(Tensor& target, const Tensor& other);

}  // namespace rfssl::nn
