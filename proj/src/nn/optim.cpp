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

#include "rfssl/nn/optim.hpp"

#include <cmath>

#include "rfssl/core/error.hpp"

namespace rfssl::nn {

std::string to_string(OptimizerKind kind) { return kind == OptimizerKind::adam ? "adam" : "novograd"; }

OptimizerKind optimizer_from_string(const std::string& name) {
  if (name == "adam") return OptimizerKind::adam;
  if (name == "novograd") return OptimizerKind::novograd;
  throw ConfigError("unknown optimizer '" + name + "' (expected adam or novograd)");
}

OptimizerConfig OptimizerConfig::defaults(OptimizerKind kind) {
  if (kind == OptimizerKind::novograd) return {kind, 0.95, 0.98, 1e-8, 0.0};
  return {kind, 0.9, 0.999, 1e-8, 0.0};
}

void OptimizerConfig::validate() const {
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw ConfigError("optimizer: betas must lie in [0, 1)");
  if (!(eps >= 0.0) || !(weight_decay >= 0.0))
    throw ConfigError("optimizer: eps and weight_decay must be non-negative");
}

namespace {

void prepare(OptimizerState& opt, const std::vector<Parameter*>& params, bool scalar_second) {
  for (const auto* p : params) {
    if (!p->has_grad()) continue;
    if (p->grad.size() != p->value.size())
      throw ShapeMismatch("optimizer: gradient shape mismatch for " + p->name);
    for (double g : p->grad.values())
      if (!std::isfinite(g)) throw NumericError("optimizer: non-finite gradient in " + p->name);
  }
  if (opt.first_moment.empty()) {
    for (const auto* p : params) {
      opt.first_moment.emplace_back(p->value.shape(), 0.0);
      opt.second_moment.push_back(scalar_second ? Tensor({1}, 0.0) : Tensor(p->value.shape(), 0.0));
    }
  }
  if (opt.first_moment.size() != params.size())
    throw ShapeMismatch("optimizer: parameter list changed between steps");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!opt.first_moment[i].same_shape(params[i]->value))
      throw ShapeMismatch("optimizer: moment shape mismatch for " + params[i]->name);
    if (opt.second_moment[i].size() != (scalar_second ? 1 : params[i]->value.size()))
      throw ShapeMismatch("optimizer: second moment layout does not match optimizer kind");
  }
}

}  // namespace

void adam_step(OptimizerState& opt, const std::vector<Parameter*>& params, double lr) {
  const auto& c = opt.config;
  prepare(opt, params, false);
  ++opt.step;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(opt.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(opt.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    if (!p.has_grad()) continue;
    Tensor& m = opt.first_moment[i];
    Tensor& v = opt.second_moment[i];
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      const double g = p.grad[k] + c.weight_decay * p.value[k];
      m[k] = c.beta1 * m[k] + (1.0 - c.beta1) * g;
      v[k] = c.beta2 * v[k] + (1.0 - c.beta2) * g * g;
      p.value[k] -= lr * (m[k] / bc1) / (std::sqrt(v[k] / bc2) + c.eps);
    }
  }
}

void novograd_step(OptimizerState& opt, const std::vector<Parameter*>& params, double lr) {
  const auto& c = opt.config;
  prepare(opt, params, true);
  ++opt.step;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    if (!p.has_grad()) continue;
    double norm2 = 0.0;
    for (double g : p.grad.values()) norm2 += g * g;
    double& v = opt.second_moment[i][0];
    v = c.beta2 * v + (1.0 - c.beta2) * norm2;
    const double denom = std::sqrt(v) + c.eps;
    Tensor& m = opt.first_moment[i];
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      m[k] = c.beta1 * m[k] + p.grad[k] / denom + c.weight_decay * p.value[k];
      p.value[k] -= lr * m[k];
    }
  }
}

void optimizer_step(OptimizerState& opt, const std::vector<Parameter*>& params, double lr) {
  if (!std::isfinite(lr) || lr < 0.0) throw InvalidArgument("optimizer: learning rate must be finite and >= 0");
  if (opt.config.kind == OptimizerKind::adam)
    adam_step(opt, params, lr);
  else
    novograd_step(opt, params, lr);
}

}  // namespace rfssl::nn
