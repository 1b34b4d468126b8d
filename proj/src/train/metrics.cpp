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

#include "rfssl/train/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "rfssl/core/error.hpp"

namespace rfssl::train {

namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ShapeMismatch("metrics: scores and labels differ in length");
  for (int y : labels)
    if (y != 0 && y != 1) throw InvalidArgument("metrics: labels must be 0 or 1");
  const auto pos = std::count(labels.begin(), labels.end(), 1);
  if (pos == 0 || pos == static_cast<long>(labels.size()))
    throw InvalidArgument("metrics: need at least one positive and one negative");
}

std::vector<std::size_t> order_by_score(std::span<const double> scores, bool descending) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return descending ? scores[a] > scores[b] : scores[a] < scores[b];
  });
  return idx;
}

}  // namespace

CorePrediction make_core_prediction(std::string core_id, std::vector<double> patch_probabilities,
                                    int true_label, double involvement_percent, double threshold) {
  CorePrediction p;
  p.core_id = std::move(core_id);
  p.true_label = true_label;
  p.involvement_percent = involvement_percent;
  int positives = 0;
  for (double prob : patch_probabilities) {
    const int c = prob >= threshold ? 1 : 0;
    p.patch_classes.push_back(c);
    positives += c;
  }
  p.patch_probabilities = std::move(patch_probabilities);
  if (!p.patch_classes.empty())
    p.core_probability = static_cast<double>(positives) / static_cast<double>(p.patch_classes.size());
  return p;
}

double predicted_involvement(const CorePrediction& pred) {
  if (pred.empty()) throw InvalidArgument("predicted_involvement: core " + pred.core_id + " has no patches");
  return pred.core_probability;
}

std::string_view to_string(MetricLevel level) { return level == MetricLevel::core ? "core" : "patch"; }

double auroc(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  const auto idx = order_by_score(scores, false);
  // Average 1-based ranks over tie groups; every rank sum stays a
  // half-integer, so the statistic is exact.
  double rank_sum = 0.0;
  double pos = 0.0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      if (labels[idx[k]] == 1) {
        rank_sum += avg_rank;
        pos += 1.0;
      }
    i = j;
  }
  const double neg = static_cast<double>(scores.size()) - pos;
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

double average_precision(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  const auto idx = order_by_score(scores, true);
  const double total_pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  double tp = 0.0, seen = 0.0, prev_recall = 0.0, ap = 0.0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      tp += labels[idx[j]];
      seen += 1.0;
      ++j;
    }
    const double recall = tp / total_pos;
    ap += (recall - prev_recall) * (tp / seen);
    prev_recall = recall;
    i = j;
  }
  return ap;
}

double balanced_accuracy(std::span<const double> scores, std::span<const int> labels, double threshold) {
  check_inputs(scores, labels);
  double tp = 0, tn = 0, p = 0, n = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i] == 1) {
      p += 1;
      tp += predicted;
    } else {
      n += 1;
      tn += !predicted;
    }
  }
  return 0.5 * (tp / p + tn / n);
}

MetricReport compute_metrics(const std::vector<CorePrediction>& preds, MetricLevel level,
                             double min_involvement, double threshold) {
  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& p : preds) {
    if (p.empty()) continue;
    if (p.true_label == 1 && p.involvement_percent < min_involvement) continue;
    if (level == MetricLevel::core) {
      scores.push_back(p.core_probability);
      labels.push_back(p.true_label);
    } else {
      for (double prob : p.patch_probabilities) {
        scores.push_back(prob);
        labels.push_back(p.true_label);
      }
    }
  }
  MetricReport r;
  r.level = level;
  r.auroc = auroc(scores, labels);
  r.avg_precision = average_precision(scores, labels);
  r.balanced_accuracy = balanced_accuracy(scores, labels, threshold);
  r.n_positive = static_cast<int>(std::count(labels.begin(), labels.end(), 1));
  r.n_negative = static_cast<int>(labels.size()) - r.n_positive;
  return r;
}

}  // namespace rfssl::train
