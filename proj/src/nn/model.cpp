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

#include "rfssl/nn/model.hpp"

#include <cmath>

#include "rfssl/core/error.hpp"

namespace rfssl::nn {

// ------------------------------------------------------------ descriptor

void ArchitectureDescriptor::validate() const {
  if (input_size < 4 || stem_channels < 1 || stem_kernel < 1 || stem_stride < 1)
    throw ConfigError("architecture: invalid stem/input geometry");
  if (stage_channels.empty() || stage_channels.size() != stage_blocks.size())
    throw ConfigError("architecture: stage_channels and stage_blocks must be non-empty and equal length");
  for (std::size_t i = 0; i < stage_channels.size(); ++i)
    if (stage_channels[i] < 1 || stage_blocks[i] < 1)
      throw ConfigError("architecture: stage widths and block counts must be positive");
  if (projector_hidden < 1 || projector_out < 1 || num_classes < 2)
    throw ConfigError("architecture: invalid head sizes");
  int size = stem_output_size();
  if (stem_kernel > input_size || size < 1) throw ConfigError("architecture: stem larger than input");
  for (std::size_t i = 0; i < stage_channels.size(); ++i) size = (size - 1) / 2 + 1;
  if (size < 1) throw ConfigError("architecture: too many downsampling stages for the input size");
}

ArchitectureDescriptor ArchitectureDescriptor::tiny() { return {}; }

ArchitectureDescriptor ArchitectureDescriptor::full() {
  ArchitectureDescriptor a;
  a.input_size = 256;
  a.stem_channels = 64;
  a.stage_channels = {64, 128, 256, 512};
  a.stage_blocks = {1, 1, 2, 1};
  return a;
}

ArchitectureDescriptor ArchitectureDescriptor::micro() {
  ArchitectureDescriptor a;
  a.input_size = 8;
  a.stem_channels = 2;
  a.stem_kernel = 2;
  a.stem_stride = 2;
  a.stage_channels = {2, 3};
  a.stage_blocks = {1, 1};
  a.projector_hidden = 4;
  a.projector_out = 3;
  return a;
}

ArchitectureDescriptor ArchitectureDescriptor::preset(const std::string& name) {
  if (name == "tiny") return tiny();
  if (name == "full") return full();
  if (name == "micro") return micro();
  throw ConfigError("unknown architecture preset '" + name + "' (expected tiny, full, micro)");
}

// --------------------------------------------------------- residual block

ResidualBlock::ResidualBlock(const std::string& name, int in_channels, int out_channels, int stride)
    : bn1(name + ".bn1", in_channels, true),
      bn2(name + ".bn2", out_channels, true),
      conv1(name + ".conv1", in_channels, out_channels, 3, stride, 1),
      conv2(name + ".conv2", out_channels, out_channels, 3, 1, 1),
      has_shortcut_(stride != 1 || in_channels != out_channels) {
  if (has_shortcut_) shortcut = Conv2d(name + ".shortcut", in_channels, out_channels, 1, stride, 0);
}

Tensor ResidualBlock::forward(const Tensor& x, Mode mode, Cache* c) {
  Tensor a = relu_forward(bn1.forward(x, mode, c ? &c->bn1 : nullptr), c ? &c->relu1 : nullptr);
  Tensor skip = has_shortcut_ ? shortcut.forward(a, c ? &c->shortcut : nullptr) : x;
  Tensor t = conv1.forward(a, c ? &c->conv1 : nullptr);
  t = relu_forward(bn2.forward(t, mode, c ? &c->bn2 : nullptr), c ? &c->relu2 : nullptr);
  Tensor y = conv2.forward(t, c ? &c->conv2 : nullptr);
  add_inplace(y, skip);
  return y;
}

Tensor ResidualBlock::infer(const Tensor& x) const {
  Tensor a = relu_forward(bn1.infer(x), nullptr);
  Tensor y = conv2.forward(relu_forward(bn2.infer(conv1.forward(a, nullptr)), nullptr), nullptr);
  add_inplace(y, has_shortcut_ ? shortcut.forward(a, nullptr) : x);
  return y;
}

Tensor ResidualBlock::backward(const Cache& c, const Tensor& grad_out, bool param_grads) {
  Tensor g = conv2.backward(c.conv2, grad_out, param_grads, true);
  g = bn2.backward(c.bn2, relu_backward(c.relu2, g), param_grads);
  Tensor da = conv1.backward(c.conv1, g, param_grads, true);
  if (has_shortcut_)
    add_inplace(da, shortcut.backward(c.shortcut, grad_out, param_grads, true));
  Tensor dx = bn1.backward(c.bn1, relu_backward(c.relu1, da), param_grads);
  if (!has_shortcut_) add_inplace(dx, grad_out);
  return dx;
}

void ResidualBlock::init(Rng& rng) {
  conv1.init(rng);
  conv2.init(rng);
  if (has_shortcut_) shortcut.init(rng);
}

void ResidualBlock::collect(std::vector<Parameter*>& params, std::vector<Buffer*>& buffers) {
  for (BatchNorm* bn : {&bn1, &bn2}) {
    params.push_back(&bn->gamma);
    params.push_back(&bn->beta);
    buffers.push_back(&bn->running_mean);
    buffers.push_back(&bn->running_var);
  }
  params.push_back(&conv1.weight);
  params.push_back(&conv2.weight);
  if (has_shortcut_) params.push_back(&shortcut.weight);
}

// --------------------------------------------------------------- backbone

Backbone::Backbone(const ArchitectureDescriptor& arch) : input_size_(arch.input_size) {
  arch.validate();
  stem = Conv2d("backbone.stem", 1, arch.stem_channels, arch.stem_kernel, arch.stem_stride, 0);
  int channels = arch.stem_channels;
  for (std::size_t s = 0; s < arch.stage_channels.size(); ++s)
    for (int b = 0; b < arch.stage_blocks[s]; ++b) {
      const int stride = b == 0 ? 2 : 1;
      const std::string name = "backbone.stage" + std::to_string(s) + ".block" + std::to_string(b);
      blocks.emplace_back(name, channels, arch.stage_channels[s], stride);
      channels = arch.stage_channels[s];
    }
  final_bn = BatchNorm("backbone.final_bn", channels, true);
}

Tensor Backbone::prepare(const Tensor& images) const {
  if (images.rank() != 4 || images.dim(1) != 1 || images.dim(2) != input_size_ ||
      images.dim(3) != input_size_)
    throw ShapeMismatch("backbone: expected {N,1," + std::to_string(input_size_) + "," +
                        std::to_string(input_size_) + "} images, got " + images.shape_string());
  if (images.dim(0) < 1) throw ShapeMismatch("backbone: empty batch");
  return images_to_channel_major(images);
}

Tensor Backbone::forward(const Tensor& images, Mode mode, Cache* c) {
  Tensor x = stem.forward(prepare(images), c ? &c->stem : nullptr);
  if (c) c->blocks.resize(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i)
    x = blocks[i].forward(x, mode, c ? &c->blocks[i] : nullptr);
  x = relu_forward(final_bn.forward(x, mode, c ? &c->bn : nullptr), c ? &c->relu : nullptr);
  if (c) c->pooled_shape = x.shape();
  return global_avg_pool_forward(x);
}

Tensor Backbone::infer(const Tensor& images) const {
  Tensor x = stem.forward(prepare(images), nullptr);
  for (const auto& block : blocks) x = block.infer(x);
  return global_avg_pool_forward(relu_forward(final_bn.infer(x), nullptr));
}

void Backbone::backward(const Cache& c, const Tensor& grad_out, bool param_grads) {
  if (c.pooled_shape.empty() || c.blocks.size() != blocks.size())
    throw InvalidArgument("backbone: backward without a recorded forward pass");
  Tensor g = global_avg_pool_backward(c.pooled_shape, grad_out);
  g = final_bn.backward(c.bn, relu_backward(c.relu, g), param_grads);
  for (std::size_t i = blocks.size(); i-- > 0;) g = blocks[i].backward(c.blocks[i], g, param_grads);
  stem.backward(c.stem, g, param_grads, false);
}

void Backbone::init(Rng& rng) {
  stem.init(rng);
  for (auto& block : blocks) block.init(rng);
}

void Backbone::collect(std::vector<Parameter*>& params, std::vector<Buffer*>& buffers) {
  params.push_back(&stem.weight);
  for (auto& block : blocks) block.collect(params, buffers);
  params.push_back(&final_bn.gamma);
  params.push_back(&final_bn.beta);
  buffers.push_back(&final_bn.running_mean);
  buffers.push_back(&final_bn.running_var);
}

// -------------------------------------------------------------------- MLP

Mlp::Mlp(const std::string& name, int in_features, int hidden, int out_features)
    : fc1(name + ".fc1", in_features, hidden),
      bn(name + ".bn", hidden, false),
      fc2(name + ".fc2", hidden, out_features) {}

Tensor Mlp::forward(const Tensor& x, Mode mode, Cache* c) {
  Tensor t = fc1.forward(x, c ? &c->fc1 : nullptr);
  t = relu_forward(bn.forward(t, mode, c ? &c->bn : nullptr), c ? &c->relu : nullptr);
  return fc2.forward(t, c ? &c->fc2 : nullptr);
}

Tensor Mlp::infer(const Tensor& x) const {
  return fc2.forward(relu_forward(bn.infer(fc1.forward(x, nullptr)), nullptr), nullptr);
}

Tensor Mlp::backward(const Cache& c, const Tensor& grad_out, bool param_grads, bool input_grad) {
  Tensor g = fc2.backward(c.fc2, grad_out, param_grads, true);
  g = bn.backward(c.bn, relu_backward(c.relu, g), param_grads);
  return fc1.backward(c.fc1, g, param_grads, input_grad);
}

void Mlp::init(Rng& rng) {
  fc1.init(rng);
  fc2.init(rng);
}

void Mlp::collect(std::vector<Parameter*>& params, std::vector<Buffer*>& buffers) {
  params.insert(params.end(), {&fc1.weight, &fc1.bias, &bn.gamma, &bn.beta, &fc2.weight, &fc2.bias});
  buffers.insert(buffers.end(), {&bn.running_mean, &bn.running_var});
}

// ------------------------------------------------------------ model state

std::vector<Parameter*> ModelState::backbone_parameters() {
  std::vector<Parameter*> p;
  std::vector<Buffer*> b;
  backbone.collect(p, b);
  return p;
}

std::vector<Parameter*> ModelState::projector_parameters() {
  std::vector<Parameter*> p;
  std::vector<Buffer*> b;
  projector.collect(p, b);
  return p;
}

std::vector<Parameter*> ModelState::head_parameters() { return {&classifier.weight, &classifier.bias}; }

std::vector<Parameter*> ModelState::parameters() {
  auto p = backbone_parameters();
  for (auto* q : projector_parameters()) p.push_back(q);
  for (auto* q : head_parameters()) p.push_back(q);
  return p;
}

std::vector<Buffer*> ModelState::buffers() {
  std::vector<Parameter*> p;
  std::vector<Buffer*> b;
  backbone.collect(p, b);
  projector.collect(p, b);
  return b;
}

std::vector<Parameter*> ModelState::trainable_parameters() {
  std::vector<Parameter*> p;
  if (!freeze.backbone) p = backbone_parameters();
  if (!freeze.projector)
    for (auto* q : projector_parameters()) p.push_back(q);
  if (!freeze.head)
    for (auto* q : head_parameters()) p.push_back(q);
  return p;
}

void ModelState::zero_grad() {
  for (auto* p : parameters()) p->zero_grad();
}

std::size_t count_parameters(const std::vector<Parameter*>& params) {
  std::size_t n = 0;
  for (const auto* p : params) n += p->value.size();
  return n;
}

std::size_t ModelState::parameter_count() { return count_parameters(parameters()); }

void ModelState::check_finite() {
  for (auto* p : parameters())
    for (double v : p->value.values())
      if (!std::isfinite(v)) throw NumericError("parameter " + p->name + " has a non-finite value");
}

ModelState make_model(const ArchitectureDescriptor& arch, Rng& init_rng) {
  arch.validate();
  ModelState m;
  m.arch = arch;
  m.backbone = Backbone(arch);
  m.projector = Mlp("projector", arch.embedding_dim(), arch.projector_hidden, arch.projector_out);
  m.classifier = Linear("classifier", arch.embedding_dim(), arch.num_classes);
  m.backbone.init(init_rng);
  m.projector.init(init_rng);
  m.classifier.init(init_rng);
  return m;
}

// ------------------------------------------------------- forward/backward

Tensor forward_backbone(ModelState& model, const Tensor& images, Mode mode, ForwardCache* cache) {
  Tensor h = model.backbone.forward(images, mode, cache ? &cache->backbone : nullptr);
  if (cache) cache->backbone_recorded = true;
  return h;
}

namespace {

void check_embedding(const ModelState& model, const Tensor& h) {
  if (h.rank() != 2 || h.dim(1) != model.arch.embedding_dim())
    throw ShapeMismatch("heads: expected {N," + std::to_string(model.arch.embedding_dim()) +
                        "} embeddings, got " + h.shape_string());
}

}  // namespace

Tensor forward_heads(ModelState& model, const Tensor& h, Head which, Mode mode, ForwardCache* cache) {
  check_embedding(model, h);
  Tensor out = which == Head::projector
                   ? model.projector.forward(h, mode, cache ? &cache->projector : nullptr)
                   : model.classifier.forward(h, cache ? &cache->classifier : nullptr);
  if (cache) {
    cache->head = which;
    cache->head_recorded = true;
  }
  return out;
}

Tensor infer_backbone(const ModelState& model, const Tensor& images) {
  return model.backbone.infer(images);
}

Tensor infer_heads(const ModelState& model, const Tensor& h, Head which) {
  check_embedding(model, h);
  return which == Head::projector ? model.projector.infer(h) : model.classifier.forward(h, nullptr);
}

Tensor backward_heads(ModelState& model, const ForwardCache& cache, const Tensor& grad_out) {
  if (!cache.head_recorded) throw InvalidArgument("backward without a recorded head forward pass");
  const bool need_input = !model.freeze.backbone;
  if (cache.head == Head::projector)
    return model.projector.backward(cache.projector, grad_out, !model.freeze.projector, need_input);
  return model.classifier.backward(cache.classifier, grad_out, !model.freeze.head, need_input);
}

void backward_backbone(ModelState& model, const ForwardCache& cache, const Tensor& grad_h) {
  if (!cache.backbone_recorded) throw InvalidArgument("backward without a recorded backbone forward pass");
  if (model.freeze.backbone) return;
  model.backbone.backward(cache.backbone, grad_h, true);
}

std::vector<double> softmax_positive(const Tensor& logits) {
  if (logits.rank() != 2 || logits.dim(1) != 2) throw ShapeMismatch("softmax: expected {N,2} logits");
  std::vector<double> p(static_cast<std::size_t>(logits.dim(0)));
  for (std::size_t i = 0; i < p.size(); ++i) {
    // 1 / (1 + exp(l0 - l1)) is the two-class softmax and never overflows to NaN.
    p[i] = 1.0 / (1.0 + std::exp(logits[2 * i] - logits[2 * i + 1]));
  }
  return p;
}

}  // namespace rfssl::nn
