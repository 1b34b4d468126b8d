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

#include "rfssl/data/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "rfssl/core/rng.hpp"

namespace rfssl::data {

namespace {

template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i)
    std::swap(items[i - 1], items[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i - 1)))]);
}

}  // namespace

void SplitConfig::validate() const {
  if (!(test_cancer_fraction >= 0.0 && test_cancer_fraction <= 1.0))
    throw ConfigError("split: test_cancer_fraction must lie in [0, 1]");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
    throw ConfigError("split: validation_fraction must lie in [0, 1)");
}

SplitManifest split_patients(const std::vector<CoreInfo>& cores, const SplitConfig& config,
                             std::uint64_t seed) {
  config.validate();
  std::map<std::string, int> cancer_per_patient;
  int total_cancer = 0;
  for (const auto& c : cores) {
    c.validate();
    cancer_per_patient[c.patient_id] += c.label;
    total_cancer += c.label;
  }
  const auto with_cancer = std::count_if(cancer_per_patient.begin(), cancer_per_patient.end(),
                                         [](const auto& kv) { return kv.second > 0; });
  if (with_cancer < 2) throw InvalidArgument("split_patients: need at least two patients with cancer cores");

  std::vector<std::string> order;
  for (const auto& kv : cancer_per_patient) order.push_back(kv.first);
  Rng rng = Rng::substream(seed, "split");
  shuffle(order, rng);

  SplitManifest m;
  m.seed = seed;
  int test_cancer = 0;
  std::size_t next = 0;
  while (test_cancer < config.test_cancer_fraction * total_cancer - 1e-12) {
    if (next == order.size()) throw InvalidArgument("split_patients: test fraction unreachable");
    test_cancer += cancer_per_patient[order[next]];
    m.test_patients.push_back(order[next++]);
  }
  std::vector<std::string> rest(order.begin() + static_cast<std::ptrdiff_t>(next), order.end());
  const auto n_val = static_cast<std::size_t>(std::lround(config.validation_fraction * static_cast<double>(rest.size())));
  m.val_patients.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(n_val));
  m.train_patients.assign(rest.begin() + static_cast<std::ptrdiff_t>(n_val), rest.end());
  for (auto* s : {&m.train_patients, &m.val_patients, &m.test_patients}) std::sort(s->begin(), s->end());
  m.validate();
  return m;
}

std::vector<CoreInfo> balance_and_filter(const std::vector<CoreInfo>& cores, double min_involvement,
                                         bool balance, std::uint64_t seed) {
  std::vector<std::size_t> benign;
  std::vector<bool> keep(cores.size(), false);
  std::size_t cancer = 0;
  for (std::size_t i = 0; i < cores.size(); ++i) {
    cores[i].validate();
    if (cores[i].label == 1) {
      if (cores[i].involvement_percent >= min_involvement) {
        keep[i] = true;
        ++cancer;
      }
    } else {
      benign.push_back(i);
    }
  }
  if (balance && benign.size() > cancer) {
    Rng rng = Rng::substream(seed, "balance");
    shuffle(benign, rng);
    benign.resize(cancer);
  }
  for (std::size_t i : benign) keep[i] = true;
  std::vector<CoreInfo> out;
  for (std::size_t i = 0; i < cores.size(); ++i)
    if (keep[i]) out.push_back(cores[i]);
  return out;
}

std::vector<CoreInfo> cores_of(const std::vector<CoreInfo>& cores,
                               const std::vector<std::string>& patients) {
  const std::set<std::string> wanted(patients.begin(), patients.end());
  std::vector<CoreInfo> out;
  for (const auto& c : cores)
    if (wanted.count(c.patient_id)) out.push_back(c);
  return out;
}

}  // namespace rfssl::data
