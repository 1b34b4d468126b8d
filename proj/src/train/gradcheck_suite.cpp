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

#include "rfssl/train/gradcheck_suite.hpp"

#include <cmath>
#include <functional>

#include "rfssl/core/rng.hpp"
#include "rfssl/nn/layers.hpp"
#include "rfssl/nn/loss.hpp"
#include "rfssl/nn/model.hpp"
#include "rfssl/ssl/losses.hpp"

namespace rfssl::train {

using nn::GradcheckResult;
using nn::Mode;
using nn::Tensor;

namespace {

class Suite {
 public:
  Suite(std::uint64_t seed, double tol, double step) : rng_(Rng::substream(seed, "gradcheck")), tol_(tol), step_(step) {}

  Tensor random(std::vector<int> shape, double scale = 1.0) {
    Tensor t(std::move(shape));
    for (double& v : t.values()) v = rng_.normal(0.0, scale);
    return t;
  }

  // Random values with |x| >= margin so ReLU kinks stay out of reach of the
  // finite-difference step.
  Tensor away_from_zero(std::vector<int> shape, double margin) {
    Tensor t = random(std::move(shape));
    for (double& v : t.values()) v = std::copysign(std::abs(v) + margin, v);
    return t;
  }

  void check(const std::string& name, std::span<double> values, const Tensor& analytic,
             const std::function<double()>& loss) {
    if (analytic.size() != values.size()) {
      results_.push_back({name, values.size(), INFINITY, false});
      return;
    }
    const double err = nn::finite_difference_error(values, analytic.values(), loss, step_);
    results_.push_back({name, values.size(), err, err < tol_});
  }

  static double dot(const Tensor& a, const Tensor& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }

  void conv(const std::string& name, int cin, int cout, int k, int stride, int pad, int n, int hw) {
    nn::Conv2d layer("conv", cin, cout, k, stride, pad);
    layer.init(rng_);
    Tensor x = random({cin, n, hw, hw});
    const int oh = layer.output_size(hw);
    const Tensor r = random({cout, n, oh, oh});
    auto loss = [&] { return dot(layer.forward(x, nullptr), r); };
    nn::Conv2d::Cache cache;
    layer.forward(x, &cache);
    const Tensor dx = layer.backward(cache, r, true, true);
    check(name + ".weight", layer.weight.value.values(), layer.weight.grad, loss);
    check(name + ".input", x.values(), dx, loss);
  }

  void batchnorm(const std::string& name, bool spatial, Mode mode) {
    const int c = 3;
    nn::BatchNorm bn("bn", c, spatial);
    bn.gamma.value = random({c});
    bn.beta.value = random({c});
    if (mode == Mode::eval) {
      bn.running_mean.value = random({c});
      for (int i = 0; i < c; ++i) bn.running_var.value[i] = 0.5 + rng_.uniform();
    }
    Tensor x = spatial ? random({c, 4, 3, 3}) : random({6, c});
    const Tensor r = random(x.shape());
    auto loss = [&] { return dot(bn.forward(x, mode, nullptr), r); };
    nn::BatchNorm::Cache cache;
    bn.forward(x, mode, &cache);
    const Tensor dx = bn.backward(cache, r, true);
    check(name + ".gamma", bn.gamma.value.values(), bn.gamma.grad, loss);
    check(name + ".beta", bn.beta.value.values(), bn.beta.grad, loss);
    check(name + ".input", x.values(), dx, loss);
  }

  void relu() {
    Tensor x = away_from_zero({4, 5, 6}, 1e-2);
    const Tensor r = random(x.shape());
    auto loss = [&] { return dot(nn::relu_forward(x, nullptr), r); };
    nn::ReluCache cache;
    nn::relu_forward(x, &cache);
    check("relu.input", x.values(), nn::relu_backward(cache, r), loss);
  }

  void linear() {
    nn::Linear fc("fc", 7, 5);
    fc.init(rng_);
    fc.bias.value = random({5});
    Tensor x = random({6, 7});
    const Tensor r = random({6, 5});
    auto loss = [&] { return dot(fc.forward(x, nullptr), r); };
    nn::Linear::Cache cache;
    fc.forward(x, &cache);
    const Tensor dx = fc.backward(cache, r, true, true);
    check("linear.weight", fc.weight.value.values(), fc.weight.grad, loss);
    check("linear.bias", fc.bias.value.values(), fc.bias.grad, loss);
    check("linear.input", x.values(), dx, loss);
  }

  void pool() {
    Tensor x = random({3, 4, 5, 5});
    const Tensor r = random({4, 3});
    auto loss = [&] { return dot(nn::global_avg_pool_forward(x), r); };
    check("global_avg_pool.input", x.values(), nn::global_avg_pool_backward(x.shape(), r), loss);
  }

  void block(const std::string& name, int cin, int cout, int stride) {
    nn::ResidualBlock b("block", cin, cout, stride);
    b.init(rng_);
    for (nn::BatchNorm* bn : {&b.bn1, &b.bn2}) {
      bn->gamma.value = random({bn->channels()}, 0.5);
      for (double& g : bn->gamma.value.values()) g += 1.0;
      bn->beta.value = random({bn->channels()}, 0.3);
    }
    Tensor x = random({cin, 3, 4, 4});
    Tensor probe = b.forward(x, Mode::train, nullptr);
    const Tensor r = random(probe.shape());
    auto loss = [&] { return dot(b.forward(x, Mode::train, nullptr), r); };
    nn::ResidualBlock::Cache cache;
    b.forward(x, Mode::train, &cache);
    const Tensor dx = b.backward(cache, r, true);
    std::vector<nn::Parameter*> params;
    std::vector<nn::Buffer*> buffers;
    b.collect(params, buffers);
    for (auto* p : params) check(name + "." + p->name.substr(6), p->value.values(), p->grad, loss);
    check(name + ".input", x.values(), dx, loss);
  }

  void model() {
    auto arch = nn::ArchitectureDescriptor::micro();
    nn::ModelState m = nn::make_model(arch, rng_);
    for (auto* p : m.parameters())
      if (p->name.find(".beta") != std::string::npos) p->value = random(p->value.shape(), 0.3);
    const Tensor images = random({4, 1, arch.input_size, arch.input_size});
    const Tensor r = random({4, arch.projector_out});
    const std::vector<int> labels{0, 1, 1, 0};

    auto projector_loss = [&] {
      const Tensor h = nn::forward_backbone(m, images, Mode::train, nullptr);
      return dot(nn::forward_heads(m, h, nn::Head::projector, Mode::train, nullptr), r);
    };
    {
      nn::ForwardCache cache;
      const Tensor h = nn::forward_backbone(m, images, Mode::train, &cache);
      nn::forward_heads(m, h, nn::Head::projector, Mode::train, &cache);
      nn::backward_backbone(m, cache, nn::backward_heads(m, cache, r));
      for (auto* p : m.backbone_parameters()) check("model.projector_path." + p->name, p->value.values(), p->grad, projector_loss);
      for (auto* p : m.projector_parameters()) check("model.projector_path." + p->name, p->value.values(), p->grad, projector_loss);
    }
    m.zero_grad();
    auto classifier_loss = [&] {
      const Tensor h = nn::forward_backbone(m, images, Mode::train, nullptr);
      return nn::cross_entropy(nn::forward_heads(m, h, nn::Head::classifier, Mode::train, nullptr), labels).loss;
    };
    {
      nn::ForwardCache cache;
      const Tensor h = nn::forward_backbone(m, images, Mode::train, &cache);
      const Tensor logits = nn::forward_heads(m, h, nn::Head::classifier, Mode::train, &cache);
      const auto ce = nn::cross_entropy(logits, labels);
      nn::backward_backbone(m, cache, nn::backward_heads(m, cache, ce.grad));
      for (auto* p : m.head_parameters()) check("model.classifier_path." + p->name, p->value.values(), p->grad, classifier_loss);
      check("model.classifier_path.backbone.stem.weight", m.backbone.stem.weight.value.values(),
            m.backbone.stem.weight.grad, classifier_loss);
    }
  }

  void cross_entropy() {
    Tensor logits = random({6, 2});
    const std::vector<int> labels{0, 1, 1, 0, 1, 0};
    auto loss = [&] { return nn::cross_entropy(logits, labels).loss; };
    check("cross_entropy.logits", logits.values(), nn::cross_entropy(logits, labels).grad, loss);
  }

  void vicreg() {
    Tensor z = random({8, 5}, 0.6);
    Tensor zp = random({8, 5}, 0.6);
    ssl::VicregWeights w;
    auto loss = [&] { return ssl::vicreg_loss(z, zp, w, false).total; };
    const auto r = ssl::vicreg_loss(z, zp, w);
    check("vicreg.z", z.values(), r.grad_z, loss);
    check("vicreg.z_prime", zp.values(), r.grad_zp, loss);
  }

  void nt_xent() {
    Tensor z = random({6, 4});
    Tensor zp = random({6, 4});
    auto loss = [&] { return ssl::nt_xent_loss(z, zp, 0.5).loss; };
    const auto r = ssl::nt_xent_loss(z, zp, 0.5);
    check("nt_xent.z", z.values(), r.grad_a, loss);
    check("nt_xent.z_prime", zp.values(), r.grad_b, loss);
  }

  void byol() {
    Tensor p = random({6, 4});
    const Tensor t = random({6, 4});
    auto loss = [&] { return ssl::byol_cosine_loss(p, t).loss; };
    check("byol_cosine.prediction", p.values(), ssl::byol_cosine_loss(p, t).grad_a, loss);
  }

  std::vector<GradcheckResult> take() { return std::move(results_); }

 private:
  Rng rng_;
  double tol_, step_;
  std::vector<GradcheckResult> results_;
};

}  // namespace

std::vector<GradcheckResult> run_gradcheck_suite(std::uint64_t seed, double tolerance, double step) {
  Suite s(seed, tolerance, step);
  s.conv("conv3x3_s1", 2, 3, 3, 1, 1, 3, 5);
  s.conv("conv3x3_s2", 2, 3, 3, 2, 1, 2, 6);
  s.conv("conv1x1_s2", 3, 4, 1, 2, 0, 2, 5);
  s.conv("conv1x1_s1", 3, 4, 1, 1, 0, 2, 4);
  s.conv("conv4x4_s4", 1, 3, 4, 4, 0, 3, 8);
  s.batchnorm("batchnorm_spatial_train", true, Mode::train);
  s.batchnorm("batchnorm_flat_train", false, Mode::train);
  s.batchnorm("batchnorm_spatial_eval", true, Mode::eval);
  s.relu();
  s.linear();
  s.pool();
  s.block("residual_identity", 3, 3, 1);
  s.block("residual_projection", 2, 3, 2);
  s.model();
  s.cross_entropy();
  s.vicreg();
  s.nt_xent();
  s.byol();
  return s.take();
}

}  // namespace rfssl::train
