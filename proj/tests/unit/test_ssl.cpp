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

#include <cmath>

#include "doctest.h"
#include "rfssl/core/error.hpp"
#include "rfssl/ssl/byol.hpp"
#include "rfssl/ssl/losses.hpp"
#include "test_util.hpp"

using namespace rfssl;
using namespace rfssl::ssl;
using testing::Rows;

namespace {

Tensor to_tensor(const Rows& rows) {
  Tensor t({static_cast<int>(rows.size()), static_cast<int>(rows[0].size())});
  std::size_t k = 0;
  for (const auto& r : rows)
    for (double v : r) t[k++] = v;
  return t;
}

Tensor from(std::vector<int> shape, std::vector<double> values) { return Tensor(std::move(shape), std::move(values)); }

}  // namespace

TEST_CASE("invariance term examples") {
  const Tensor z = from({2, 1}, {0, 0}), zp = from({2, 1}, {1, 3});
  CHECK(invariance_term(z, zp) == 5.0);
  CHECK(invariance_term(zp, zp) == 0.0);
  Tensor a = from({2, 2}, {1, 2, 3, 4}), b = from({2, 2}, {0, 1, 5, 2});
  const double base = invariance_term(a, b);
  for (std::size_t i = 0; i < 4; ++i) {
    a[i] += (i % 2 ? 7.5 : -3.0);
    b[i] += (i % 2 ? 7.5 : -3.0);
  }
  CHECK(invariance_term(a, b) == doctest::Approx(base).epsilon(1e-14));
  CHECK_THROWS_AS(invariance_term(z, from({2, 2}, {0, 0, 0, 0})), ShapeMismatch);
}

TEST_CASE("variance term examples") {
  // Identical rows: hinge fully open.
  CHECK(variance_term(from({3, 2}, {1, 2, 1, 2, 1, 2}), 1.0, 0.0) == 1.0);
  // Column stds 0.5 and 2.0 (unbiased, n = 2: values m +- s/sqrt(2)).
  const double a = 0.5 / std::sqrt(2.0), b = 2.0 / std::sqrt(2.0);
  CHECK(variance_term(from({2, 2}, {a, b, -a, -b}), 1.0, 0.0) == doctest::Approx(0.25).epsilon(1e-14));
  // Saturated hinge.
  CHECK(variance_term(from({2, 1}, {3.0, -3.0}), 1.0, 1e-4) == 0.0);
  CHECK_THROWS_AS(variance_term(from({1, 2}, {1, 2}), 1.0, 0.0), InvalidArgument);
}

TEST_CASE("covariance term examples and brute-force oracle") {
  Rng rng(1);
  CHECK(covariance_term(to_tensor(testing::random_rows(6, 1, rng))) == 0.0);

  // Two equal columns: C_jk = C_jj so the off-diagonal sum contains 2 Var^2.
  Rows eq = testing::random_rows(5, 2, rng);
  for (auto& r : eq) r[1] = r[0];
  const double var = testing::naive_covariance_entry(eq, 0, 0);
  CHECK(covariance_term(to_tensor(eq)) == doctest::Approx(2.0 * var * var / 2.0).epsilon(1e-12));

  const Rows z = testing::random_rows(8, 4, rng);
  CHECK(std::abs(covariance_term(to_tensor(z)) - testing::naive_covariance(z)) < 1e-10);
  CHECK_THROWS_AS(covariance_term(from({1, 2}, {1, 2})), InvalidArgument);
}

TEST_CASE("variance and covariance ignore a constant row offset") {
  Rng rng(2);
  Rows z = testing::random_rows(7, 5, rng, 0.7);
  const double v = variance_term(to_tensor(z), 1.0, 1e-4), c = covariance_term(to_tensor(z));
  for (auto& r : z)
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += 3.0 - static_cast<double>(j);
  CHECK(variance_term(to_tensor(z), 1.0, 1e-4) == doctest::Approx(v).epsilon(1e-12));
  CHECK(covariance_term(to_tensor(z)) == doctest::Approx(c).epsilon(1e-12));
}

TEST_CASE("vicreg total examples") {
  Rng rng(3);
  const Tensor z = to_tensor(testing::random_rows(6, 3, rng)), zp = to_tensor(testing::random_rows(6, 3, rng));
  CHECK(vicreg_loss(z, zp, VicregWeights{0, 0, 0, 1, 1e-4}).total == 0.0);

  // Ideal embedding: identical views, orthogonal centered columns with unit std.
  const double s = std::sqrt(3.0 / 4.0);
  const Tensor ideal = from({4, 3}, {s, s, s, s, -s, -s, -s, s, -s, -s, -s, s});
  const auto r = vicreg_loss(ideal, ideal, VicregWeights{});
  CHECK(std::abs(r.total) < 1e-12);
}

TEST_CASE("vicreg matches the explicit-loop oracle") {
  Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = rng.uniform_int(2, 16), d = rng.uniform_int(1, 8);
    const Rows z = testing::random_rows(n, d, rng, 0.8), zp = testing::random_rows(n, d, rng, 0.8);
    VicregWeights w;
    const auto r = vicreg_loss(to_tensor(z), to_tensor(zp), w);
    const auto o = testing::naive_vicreg(z, zp, w.lambda, w.mu, w.nu, w.gamma, w.epsilon);
    CHECK(std::abs(r.total - o.total) < 1e-8);
    CHECK(std::abs(r.components.invariance - o.s) < 1e-8);
    CHECK(std::abs(r.components.variance_z - o.v) < 1e-8);
    CHECK(std::abs(r.components.variance_zp - o.vp) < 1e-8);
    CHECK(std::abs(r.components.covariance_z - o.c) < 1e-8);
    CHECK(std::abs(r.components.covariance_zp - o.cp) < 1e-8);
  }
}

TEST_CASE("vicreg validates inputs") {
  const Tensor z = from({2, 1}, {0, 1});
  CHECK_THROWS_AS(vicreg_loss(z, from({3, 1}, {0, 1, 2}), VicregWeights{}), ShapeMismatch);
  CHECK_THROWS_AS(vicreg_loss(z, z, VicregWeights{-1, 25, 1, 1, 1e-4}), ConfigError);
  CHECK_THROWS_AS(vicreg_loss(z, z, VicregWeights{25, 25, 1, 0, 1e-4}), ConfigError);
  CHECK_THROWS_AS(vicreg_loss(z, from({2, 1}, {0, NAN}), VicregWeights{}), NumericError);
}

TEST_CASE("nt-xent closed form for two orthogonal identical pairs") {
  const Tensor z = from({2, 2}, {1, 0, 0, 1});
  const double expected = std::log(1.0 + 2.0 / std::exp(1.0));
  CHECK(nt_xent_loss(z, z, 1.0).loss == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.5514).epsilon(1e-4));
}

TEST_CASE("nt-xent at very high temperature approaches log(2n - 1)") {
  Rng rng(5);
  const Tensor z = to_tensor(testing::random_rows(4, 3, rng)), zp = to_tensor(testing::random_rows(4, 3, rng));
  CHECK(std::abs(nt_xent_loss(z, zp, 1e6).loss - std::log(7.0)) < 1e-3);
}

TEST_CASE("nt-xent is invariant to row permutation and row rescaling") {
  Rng rng(6);
  const Rows a = testing::random_rows(5, 4, rng), b = testing::random_rows(5, 4, rng);
  const double base = nt_xent_loss(to_tensor(a), to_tensor(b), 0.2).loss;
  const std::vector<int> perm{3, 0, 4, 1, 2};
  Rows pa, pb;
  for (int i : perm) {
    pa.push_back(a[static_cast<std::size_t>(i)]);
    pb.push_back(b[static_cast<std::size_t>(i)]);
  }
  CHECK(nt_xent_loss(to_tensor(pa), to_tensor(pb), 0.2).loss == doctest::Approx(base).epsilon(1e-12));
  Rows sa = a;
  for (std::size_t i = 0; i < sa.size(); ++i)
    for (double& v : sa[i]) v *= 0.1 + 3.0 * static_cast<double>(i);
  CHECK(nt_xent_loss(to_tensor(sa), to_tensor(b), 0.2).loss == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("nt-xent rejects zero rows and bad temperature") {
  const Tensor z = from({2, 2}, {1, 0, 0, 0});
  CHECK_THROWS_AS(nt_xent_loss(z, from({2, 2}, {1, 0, 0, 1}), 0.1), NumericError);
  CHECK_THROWS_AS(nt_xent_loss(from({2, 2}, {1, 0, 0, 1}), from({2, 2}, {1, 0, 0, 1}), 0.0), InvalidArgument);
}

TEST_CASE("byol cosine loss is zero for aligned predictions") {
  const Tensor t = from({2, 3}, {1, 2, 3, -1, 0, 2});
  Tensor p = t;
  for (std::size_t i = 0; i < 3; ++i) p[i] *= 4.0;
  const auto r = byol_cosine_loss(p, t);
  CHECK(std::abs(r.loss) < 1e-14);
  const auto opposite = byol_cosine_loss(from({1, 2}, {1, 0}), from({1, 2}, {-1, 0}));
  CHECK(opposite.loss == doctest::Approx(4.0));
}

TEST_CASE("ema update follows the geometric closed form") {
  Rng rng(7);
  nn::ModelState online = nn::make_model(nn::ArchitectureDescriptor::micro(), rng);
  nn::ModelState target = nn::make_model(nn::ArchitectureDescriptor::micro(), rng);
  nn::ModelState target0 = target;
  const int k = 25;
  for (int i = 0; i < k; ++i) ema_update(target, online, 0.99);
  auto t = target.backbone_parameters(), o = online.backbone_parameters();
  auto q = target0.backbone_parameters();
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t[i]->value.size(); ++j) {
      const double p = o[i]->value[j];
      CHECK(t[i]->value[j] == doctest::Approx(p + std::pow(0.99, k) * (q[i]->value[j] - p)).epsilon(1e-12));
    }

  ema_update(target, online, 0.0);
  auto t2 = target.parameters(), o2 = online.parameters();
  // Backbone and projector follow the online network exactly; the classifier is not part of BYOL.
  for (std::size_t i = 0; i + 2 < t2.size(); ++i) CHECK(t2[i]->value == o2[i]->value);

  nn::ModelState other = nn::make_model(nn::ArchitectureDescriptor::tiny(), rng);
  CHECK_THROWS_AS(ema_update(other, online, 0.5), InvalidArgument);
}

TEST_CASE("byol step trains the online side only and is reproducible") {
  auto run = [] {
    Rng rng(8);
    nn::ModelState online = nn::make_model(nn::ArchitectureDescriptor::micro(), rng);
    ByolState state = make_byol_state(online, 0.9, rng);
    nn::OptimizerState opt(nn::OptimizerConfig::defaults(nn::OptimizerKind::adam));
    Tensor v1({4, 1, 8, 8}), v2({4, 1, 8, 8});
    for (double& v : v1.values()) v = rng.normal();
    for (double& v : v2.values()) v = rng.normal();
    nn::ModelState target_before = state.target;
    const double loss = byol_step(online, state, v1, v2, opt, 1e-2);
    CHECK(std::isfinite(loss));
    CHECK(loss >= 0.0);
    CHECK(loss <= 8.0);
    for (auto* p : state.target.parameters()) CHECK_FALSE(p->has_grad());
    for (auto* p : online.backbone_parameters()) CHECK(p->has_grad());
    for (auto* p : byol_trainable(online, state)) CHECK(p->has_grad());
    // The target moved by exactly (1 - decay) toward the updated online weights.
    auto t = state.target.backbone_parameters(), o = online.backbone_parameters();
    auto b = target_before.backbone_parameters();
    for (std::size_t i = 0; i < t.size(); ++i)
      for (std::size_t j = 0; j < t[i]->value.size(); ++j)
        CHECK(t[i]->value[j] == 0.9 * b[i]->value[j] + (1.0 - 0.9) * o[i]->value[j]);
    std::vector<double> all;
    for (auto* p : state.target.parameters()) all.insert(all.end(), p->value.values().begin(), p->value.values().end());
    all.push_back(loss);
    return all;
  };
  CHECK(run() == run());
}

TEST_CASE("byol rejects invalid decay") {
  Rng rng(9);
  nn::ModelState online = nn::make_model(nn::ArchitectureDescriptor::micro(), rng);
  CHECK_THROWS_AS(make_byol_state(online, 1.0, rng), ConfigError);
  CHECK_THROWS_AS(make_byol_state(online, -0.1, rng), ConfigError);
}
