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
#include "rfssl/nn/layers.hpp"

namespace rfssl::nn {

/// Shape of the residual backbone and its heads.
///
/// Backbone: stem conv (kernel/stride as given, padding 0) followed by one
/// stage per entry of `stage_channels`. Every stage halves the resolution in
/// its first block. Blocks are pre-activation residual units
/// (BN, ReLU, 3x3 conv, BN, ReLU, 3x3 conv) with a 1x1 projection shortcut
/// when the shape changes. A final BN + ReLU + global average pool gives the
/// d_h = stage_channels.back() embedding.
struct ArchitectureDescriptor {
  int input_size = 64;
  int stem_channels = 16;
  int stem_kernel = 4;
  int stem_stride = 4;
  std::vector<int> stage_channels{32, 64, 128};
  std::vector<int> stage_blocks{1, 1, 1};
  int projector_hidden = 512;
  int projector_out = 128;
  int num_classes = 2;

  int embedding_dim() const { return stage_channels.back(); }
  /// Spatial size after the stem.
  int stem_output_size() const { return (input_size - stem_kernel) / stem_stride + 1; }
  void validate() const;

  /// Desk-scale reference: 64x64 input, about 0.3M backbone parameters.
  static ArchitectureDescriptor tiny();
  /// 256x256 input, close to 6M backbone parameters.
  static ArchitectureDescriptor full();
  /// Few-hundred-parameter network for finite-difference checks.
  static ArchitectureDescriptor micro();
  static ArchitectureDescriptor preset(const std::string& name);

  friend bool operator==(const ArchitectureDescriptor&, const ArchitectureDescriptor&) = default;
};

class ResidualBlock {
 public:
  struct Cache {
    BatchNorm::Cache bn1, bn2;
    ReluCache relu1, relu2;
    Conv2d::Cache conv1, conv2, shortcut;
  };

  ResidualBlock() = default;
  ResidualBlock(const std::string& name, int in_channels, int out_channels, int stride);

  Tensor forward(const Tensor& x, Mode mode, Cache* cache);
  Tensor infer(const Tensor& x) const;
  Tensor backward(const Cache& cache, const Tensor& grad_out, bool param_grads);
  void init(Rng& rng);
  void collect(std::vector<Parameter*>& params, std::vector<Buffer*>& buffers);
  bool has_shortcut() const noexcept { return has_shortcut_; }

  BatchNorm bn1, bn2;
  Conv2d conv1, conv2, shortcut;

 private:
  bool has_shortcut_ = false;
};

class Backbone {
 public:
  struct Cache {
    Conv2d::Cache stem;
    std::vector<ResidualBlock::Cache> blocks;
    BatchNorm::Cache bn;
    ReluCache relu;
    std::vector<int> pooled_shape;
  };

  Backbone() = default;
  explicit Backbone(const ArchitectureDescriptor& arch);

  /// {N,1,H,W} images -> {N, d_h}.
  Tensor forward(const Tensor& images, Mode mode, Cache* cache);
  Tensor infer(const Tensor& images) const;
  void backward(const Cache& cache, const Tensor& grad_out, bool param_grads);
  void init(Rng& rng);
  void collect(std::vector<Parameter*>& params, std::vector<Buffer*>& buffers);

  Conv2d stem;
  std::vector<ResidualBlock> blocks;
  BatchNorm final_bn;

 private:
  Tensor prepare(const Tensor& images) const;
  int input_size_ = 0;
};

/// Linear -> BN -> ReLU -> Linear.
class Mlp {
 public:
  struct Cache {
    Linear::Cache fc1, fc2;
    BatchNorm::Cache bn;
    ReluCache relu;
  };

  Mlp() = default;
  Mlp(const std::string& name, int in_features, int hidden, int out_features);

  Tensor forward(const Tensor& x, Mode mode, Cache* cache);
  Tensor infer(const Tensor& x) const;
  Tensor backward(const Cache& cache, const Tensor& grad_out, bool param_grads, bool input_grad);
  void init(Rng& rng);
  void collect(std::vector<Parameter*>& params, std::vector<Buffer*>& buffers);
  int in_features() const noexcept { return fc1.in_features(); }
  int out_features() const noexcept { return fc2.out_features(); }

  Linear fc1;
  BatchNorm bn;
  Linear fc2;
};

struct FreezeFlags {
  bool backbone = false;
  bool projector = false;
  bool head = false;
};

enum class Head { projector, classifier };

/// Backbone f_theta, projector g_phi and linear classifier k_psi.
struct ModelState {
  ArchitectureDescriptor arch;
  Backbone backbone;
  Mlp projector;
  Linear classifier;
  FreezeFlags freeze;

  std::vector<Parameter*> backbone_parameters();
  std::vector<Parameter*> projector_parameters();
  std::vector<Parameter*> head_parameters();
  std::vector<Parameter*> parameters();
  std::vector<Buffer*> buffers();
  /// Parameters not excluded by the freeze flags.
  std::vector<Parameter*> trainable_parameters();
  void zero_grad();
  std::size_t parameter_count();
  /// Throws NumericError naming the first non-finite parameter.
  void check_finite();
};

ModelState make_model(const ArchitectureDescriptor& arch, Rng& init_rng);
std::size_t count_parameters(const std::vector<Parameter*>& params);

struct ForwardCache {
  Backbone::Cache backbone;
  Mlp::Cache projector;
  Linear::Cache classifier;
  bool backbone_recorded = false;
  Head head = Head::projector;
  bool head_recorded = false;
};

/// Records activations in `cache` when non-null (required for backward).
Tensor forward_backbone(ModelState& model, const Tensor& images, Mode mode, ForwardCache* cache);
Tensor forward_heads(ModelState& model, const Tensor& h, Head which, Mode mode, ForwardCache* cache);
/// Read-only eval-mode pass; safe to call concurrently.
Tensor infer_backbone(const ModelState& model, const Tensor& images);
Tensor infer_heads(const ModelState& model, const Tensor& h, Head which);

/// Backpropagates dL/d(head output) through the recorded head and returns
/// dL/dh. Frozen parameter groups receive no gradient.
Tensor backward_heads(ModelState& model, const ForwardCache& cache, const Tensor& grad_out);
void backward_backbone(ModelState& model, const ForwardCache& cache, const Tensor& grad_h);

/// Row-wise softmax of {N,2} logits; returns the class-1 probability.
std::vector<double> softmax_positive(const Tensor& logits);

}  // namespace rfssl::nn
