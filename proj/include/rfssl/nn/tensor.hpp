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

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "rfssl/core/aligned.hpp"

namespace rfssl::nn {

/// Dense row-major float64 tensor.
///
/// Convolutional activations use channel-major layout {C, N, H, W} so that a
/// whole batch is one GEMM and per-channel statistics are contiguous. A batch
/// of single-channel images {N, 1, H, W} has the same memory as {1, N, H, W}.
/// Fully connected activations are {N, D}.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape, double fill = 0.0);
  Tensor(std::vector<int> shape, std::vector<double> data);

  const std::vector<int>& shape() const noexcept { return shape_; }
  int rank() const noexcept { return static_cast<int>(shape_.size()); }
  int dim(int axis) const { return shape_.at(static_cast<std::size_t>(axis)); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  /// Same data, different shape; sizes must agree.
  Tensor reshaped(std::vector<int> shape) const;
  void fill(double value);
  bool same_shape(const Tensor& other) const noexcept { return shape_ == other.shape_; }
  std::string shape_string() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<int> shape_;
  AlignedVector data_;
};

std::size_t element_count(const std::vector<int>& shape);

/// Trainable tensor. `grad` stays empty until a backward pass writes to it,
/// which lets tests tell "no gradient" apart from "zero gradient".
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  bool has_grad() const noexcept { return !grad.empty(); }
  /// grad += delta, allocating on first use.
  void accumulate(std::span<const double> delta);
  Tensor& grad_buffer();
  void zero_grad() { grad = Tensor(); }
};

/// Non-trainable state saved in checkpoints (normalization running stats).
struct Buffer {
  std::string name;
  Tensor value;
};

}  // namespace rfssl::nn
