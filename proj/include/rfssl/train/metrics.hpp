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

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rfssl::train {

inline constexpr double kDecisionThreshold = 0.5;
inline constexpr double kMinInvolvement = 40.0;

struct CorePrediction {
  std::string core_id;
  std::vector<double> patch_probabilities;
  std::vector<int> patch_classes;
  /// Mean of patch_classes; meaningless when the core has no patches.
  double core_probability = 0.0;
  int true_label = 0;
  double involvement_percent = 0.0;

  bool empty() const noexcept { return patch_classes.empty(); }
};

/// Thresholds each probability and averages the classes.
CorePrediction make_core_prediction(std::string core_id, std::vector<double> patch_probabilities,
                                    int true_label, double involvement_percent,
                                    double threshold = kDecisionThreshold);

/// Fraction of patches predicted cancer. Throws on an empty core.
double predicted_involvement(const CorePrediction& pred);

enum class MetricLevel { patch, core };
std::string_view to_string(MetricLevel level);

struct MetricReport {
  double auroc = 0.0;
  double avg_precision = 0.0;
  double balanced_accuracy = 0.0;
  MetricLevel level = MetricLevel::core;
  int n_positive = 0;
  int n_negative = 0;
};

/// Mann-Whitney statistic with ties counted one half. Throws unless both
/// classes are present.
double auroc(std::span<const double> scores, std::span<const int> labels);
/// Sum over distinct thresholds (descending) of (R_k - R_{k-1}) * P_k.
double average_precision(std::span<const double> scores, std::span<const int> labels);
/// (sensitivity + specificity) / 2 with "score >= threshold" as positive.
double balanced_accuracy(std::span<const double> scores, std::span<const int> labels,
                         double threshold = kDecisionThreshold);

/// Core level scores each non-empty core by core_probability; patch level
/// pools every patch probability with its core's label. Cancer cores below
/// min_involvement are dropped in both cases.
MetricReport compute_metrics(const std::vector<CorePrediction>& preds, MetricLevel level,
                             double min_involvement = kMinInvolvement,
                             double threshold = kDecisionThreshold);

}  // namespace rfssl::train
