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

#include "rfssl/train/config.hpp"

#include <algorithm>

namespace rfssl::train {

using nlohmann::json;

JsonReader::JsonReader(const json& j, std::string context) : j_(j), context_(std::move(context)) {
  if (!j_.is_object()) throw ConfigError(context_ + ": expected an object");
}

void JsonReader::mark(const char* key) { known_.emplace_back(key); }

void JsonReader::finish() const {
  for (const auto& [key, value] : j_.items())
    if (std::find(known_.begin(), known_.end(), key) == known_.end())
      throw ConfigError(context_ + ": unknown key '" + key + "'");
}

json to_json(const signal::AugmentationConfig& c) {
  json enabled = json::array();
  for (auto cat : c.enabled) enabled.push_back(std::string(signal::to_string(cat)));
  return {{"skip_probability", c.skip_probability},
          {"translation_max_fraction", c.translation_max_fraction},
          {"erase_min_fraction", c.erase_min_fraction},
          {"erase_max_fraction", c.erase_max_fraction},
          {"fill_value", c.fill_value},
          {"envelope_noise_std", c.envelope_noise_std},
          {"envelope_noise_cutoff", c.envelope_noise_cutoff},
          {"enabled", enabled}};
}

signal::AugmentationConfig augmentation_from_json(const json& j, signal::AugmentationConfig c) {
  JsonReader r(j, "augmentation");
  r.get("skip_probability", c.skip_probability);
  r.get("translation_max_fraction", c.translation_max_fraction);
  r.get("erase_min_fraction", c.erase_min_fraction);
  r.get("erase_max_fraction", c.erase_max_fraction);
  r.get("fill_value", c.fill_value);
  r.get("envelope_noise_std", c.envelope_noise_std);
  r.get("envelope_noise_cutoff", c.envelope_noise_cutoff);
  if (r.has("enabled")) {
    std::vector<std::string> names;
    r.get("enabled", names);
    c.enabled.clear();
    try {
      for (const auto& n : names) c.enabled.push_back(signal::category_from_string(n));
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("augmentation.enabled: ") + e.what());
    }
  }
  r.finish();
  return c;
}

json to_json(const ssl::VicregWeights& w) {
  return {{"lambda", w.lambda}, {"mu", w.mu}, {"nu", w.nu}, {"gamma", w.gamma}, {"epsilon", w.epsilon}};
}

ssl::VicregWeights vicreg_from_json(const json& j, ssl::VicregWeights w) {
  JsonReader r(j, "vicreg");
  r.get("lambda", w.lambda);
  r.get("mu", w.mu);
  r.get("nu", w.nu);
  r.get("gamma", w.gamma);
  r.get("epsilon", w.epsilon);
  r.finish();
  return w;
}

json to_json(const nn::OptimizerConfig& c) {
  return {{"kind", nn::to_string(c.kind)}, {"beta1", c.beta1}, {"beta2", c.beta2}, {"eps", c.eps},
          {"weight_decay", c.weight_decay}};
}

nn::OptimizerConfig optimizer_from_json(const json& j, nn::OptimizerConfig c) {
  JsonReader r(j, "optimizer");
  if (r.has("kind")) {
    std::string kind;
    r.get("kind", kind);
    const auto parsed = nn::optimizer_from_string(kind);
    // Switching the kind resets the moment constants to that kind's defaults
    // unless they are given explicitly.
    if (parsed != c.kind) c = nn::OptimizerConfig::defaults(parsed);
  }
  r.get("beta1", c.beta1);
  r.get("beta2", c.beta2);
  r.get("eps", c.eps);
  r.get("weight_decay", c.weight_decay);
  r.finish();
  return c;
}

json to_json(const TrainRun& run) {
  return {{"mode", to_string(run.mode)},
          {"epochs", run.epochs},
          {"batch_size", run.batch_size},
          {"base_lr", run.base_lr},
          {"warmup_epochs", run.warmup_epochs},
          {"optimizer", to_json(run.optimizer)},
          {"seed", run.seed},
          {"augmentation", to_json(run.augmentation)},
          {"loss", to_string(run.loss)},
          {"vicreg", to_json(run.vicreg)},
          {"temperature", run.temperature},
          {"ema_decay", run.ema_decay}};
}

TrainRun train_run_from_json(const json& j, TrainRun run) {
  JsonReader r(j, "train");
  std::string text;
  if (r.has("mode")) {
    r.get("mode", text);
    run.mode = run_mode_from_string(text);
  }
  r.get("epochs", run.epochs);
  r.get("batch_size", run.batch_size);
  r.get("base_lr", run.base_lr);
  r.get("warmup_epochs", run.warmup_epochs);
  if (r.has("optimizer")) run.optimizer = optimizer_from_json(r.at("optimizer"), run.optimizer);
  r.get("seed", run.seed);
  if (r.has("augmentation")) run.augmentation = augmentation_from_json(r.at("augmentation"), run.augmentation);
  if (r.has("loss")) {
    r.get("loss", text);
    run.loss = ssl_loss_from_string(text);
  }
  if (r.has("vicreg")) run.vicreg = vicreg_from_json(r.at("vicreg"), run.vicreg);
  r.get("temperature", run.temperature);
  r.get("ema_decay", run.ema_decay);
  r.finish();
  return run;
}

json to_json(const data::PhantomConfig& c) {
  return {{"axial_samples", c.axial_samples},
          {"lateral_lines", c.lateral_lines},
          {"axial_extent_mm", c.axial_extent_mm},
          {"lateral_extent_mm", c.lateral_extent_mm},
          {"density_per_mm2", c.density_per_mm2},
          {"cancer_density_ratio", c.cancer_density_ratio},
          {"benign_amplitude_shape", c.benign_amplitude_shape},
          {"cancer_amplitude_shape", c.cancer_amplitude_shape},
          {"center_frequency_mhz", c.center_frequency_mhz},
          {"fractional_bandwidth", c.fractional_bandwidth},
          {"sound_speed_mm_per_us", c.sound_speed_mm_per_us},
          {"beam_width_mm", c.beam_width_mm},
          {"gain_jitter_db", c.gain_jitter_db},
          {"modulation_std", c.modulation_std},
          {"modulation_min_wavelength_mm", c.modulation_min_wavelength_mm},
          {"noise_std", c.noise_std},
          {"prostate_area_fraction", c.prostate_area_fraction},
          {"needle_length_mm", c.needle_length_mm},
          {"needle_width_mm", c.needle_width_mm},
          {"needle_angle_deg", c.needle_angle_deg}};
}

data::PhantomConfig phantom_from_json(const json& j, data::PhantomConfig c) {
  JsonReader r(j, "phantom");
  r.get("axial_samples", c.axial_samples);
  r.get("lateral_lines", c.lateral_lines);
  r.get("axial_extent_mm", c.axial_extent_mm);
  r.get("lateral_extent_mm", c.lateral_extent_mm);
  r.get("density_per_mm2", c.density_per_mm2);
  r.get("cancer_density_ratio", c.cancer_density_ratio);
  r.get("benign_amplitude_shape", c.benign_amplitude_shape);
  r.get("cancer_amplitude_shape", c.cancer_amplitude_shape);
  r.get("center_frequency_mhz", c.center_frequency_mhz);
  r.get("fractional_bandwidth", c.fractional_bandwidth);
  r.get("sound_speed_mm_per_us", c.sound_speed_mm_per_us);
  r.get("beam_width_mm", c.beam_width_mm);
  r.get("gain_jitter_db", c.gain_jitter_db);
  r.get("modulation_std", c.modulation_std);
  r.get("modulation_min_wavelength_mm", c.modulation_min_wavelength_mm);
  r.get("noise_std", c.noise_std);
  r.get("prostate_area_fraction", c.prostate_area_fraction);
  r.get("needle_length_mm", c.needle_length_mm);
  r.get("needle_width_mm", c.needle_width_mm);
  r.get("needle_angle_deg", c.needle_angle_deg);
  r.finish();
  return c;
}

void apply_override(json& root, const std::string& dotted_key, const std::string& text) {
  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted_key.find('.', start);
    const std::string part = dotted_key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    const auto unknown = [&] { return ConfigError("unknown configuration key '" + dotted_key + "'"); };
    if (part.empty()) throw unknown();
    if (node->is_array()) {
      if (part.find_first_not_of("0123456789") != std::string::npos) throw unknown();
      const std::size_t index = std::stoul(part);
      if (index >= node->size()) throw unknown();
      node = &(*node)[index];
    } else {
      if (!node->is_object() || !node->contains(part)) throw unknown();
      node = &(*node)[part];
    }
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  const bool both_numbers = node->is_number() && value.is_number();
  if (!both_numbers && node->type() != value.type() && !node->is_null())
    throw ConfigError("configuration key '" + dotted_key + "' expects a " + std::string(node->type_name()) +
                      ", got '" + text + "'");
  if (node->is_number_integer() && !value.is_number_integer())
    throw ConfigError("configuration key '" + dotted_key + "' expects an integer, got '" + text + "'");
  *node = value;
}

}  // namespace rfssl::train
