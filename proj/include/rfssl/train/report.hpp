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

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfssl/train/metrics.hpp"

namespace rfssl::train {

/// Shortest round-tripping decimal form; NaN becomes an empty string.
std::string format_double(double v);

/// Writes `text` verbatim, replacing any existing file.
void write_text(const std::filesystem::path& path, const std::string& text);

/// CSV with columns epoch,loss,val_auroc. Missing validation values stay empty.
void write_curve(const std::filesystem::path& path, const std::vector<double>& loss,
                 const std::vector<double>& val_auroc);

nlohmann::json metrics_json(const MetricReport& m);

}  // namespace rfssl::train
