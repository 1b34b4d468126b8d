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

#include <json.hpp>

#include "rfssl/data/phantom.hpp"
#include "rfssl/train/run.hpp"

namespace rfssl::train {

// JSON views of the configuration structs. Readers start from a defaults
// value, overwrite the keys present and reject unknown keys with ConfigError.

nlohmann::json to_json(const signal::AugmentationConfig& c);
signal::AugmentationConfig augmentation_from_json(const nlohmann::json& j, signal::AugmentationConfig defaults = {});

nlohmann::json to_json(const ssl::VicregWeights& w);
ssl::VicregWeights vicreg_from_json(const nlohmann::json& j, ssl::VicregWeights defaults = {});

nlohmann::json to_json(const nn::OptimizerConfig& c);
nn::OptimizerConfig optimizer_from_json(const nlohmann::json& j, nn::OptimizerConfig defaults = {});

nlohmann::json to_json(const TrainRun& run);
TrainRun train_run_from_json(const nlohmann::json& j, TrainRun defaults);

nlohmann::json to_json(const data::PhantomConfig& c);
data::PhantomConfig phantom_from_json(const nlohmann::json& j, data::PhantomConfig defaults = {});

/// Replaces the value at a dotted path ("pretrain.vicreg.mu", or "arms.0.loss"
/// where numeric parts index arrays). The path must already exist and the new
/// value must have a compatible JSON type. `text` is parsed as JSON when
/// possible and taken as a string otherwise.
void apply_override(nlohmann::json& root, const std::string& dotted_key, const std::string& text);

/// Strict key reader used by the from_json functions.
class JsonReader {
 public:
  JsonReader(const nlohmann::json& j, std::string context);

  template <class T>
  void get(const char* key, T& out) {
    mark(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(context_ + "." + key + ": " + e.what());
    }
  }
  bool has(const char* key) const { return j_.contains(key); }
  const nlohmann::json& at(const char* key) {
    mark(key);
    return j_.at(key);
  }
  /// Throws ConfigError naming the first key that was never requested.
  void finish() const;

 private:
  void mark(const char* key);
  const nlohmann::json& j_;
  std::string context_;
  std::vector<std::string> known_;
};

}  // namespace rfssl::train
