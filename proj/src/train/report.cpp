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

#include "rfssl/train/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "rfssl/core/error.hpp"

namespace rfssl::train {

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out.flush()) throw IoError("write failed for '" + path.string() + "'");
}

void write_curve(const std::filesystem::path& path, const std::vector<double>& loss,
                 const std::vector<double>& val_auroc) {
  std::string text = "epoch,loss,val_auroc\n";
  for (std::size_t e = 0; e < loss.size(); ++e)
    text += std::to_string(e) + "," + format_double(loss[e]) + "," +
            format_double(e < val_auroc.size() ? val_auroc[e] : std::nan("")) + "\n";
  write_text(path, text);
}

nlohmann::json metrics_json(const MetricReport& m) {
  return {{"auroc", m.auroc},
          {"avg_precision", m.avg_precision},
          {"balanced_accuracy", m.balanced_accuracy},
          {"n_positive", m.n_positive},
          {"n_negative", m.n_negative}};
}

}  // namespace rfssl::train
