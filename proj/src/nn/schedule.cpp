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

#include "rfssl/nn/schedule.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rfssl/core/error.hpp"

namespace rfssl::nn {

void ScheduleConfig::validate() const {
  if (!(base_lr > 0.0) || !std::isfinite(base_lr)) throw ConfigError("schedule: base_lr must be positive");
  if (warmup_epochs < 1 || warmup_epochs > total_epochs)
    throw ConfigError("schedule: need 0 < warmup_epochs <= total_epochs");
}

double lr_at_epoch(const ScheduleConfig& cfg, int epoch) {
  cfg.validate();
  if (epoch < 0 || epoch >= cfg.total_epochs)
    throw InvalidArgument("schedule: epoch " + std::to_string(epoch) + " outside [0, " +
                          std::to_string(cfg.total_epochs) + ")");
  if (epoch < cfg.warmup_epochs) return cfg.base_lr * (epoch + 1) / cfg.warmup_epochs;
  // warmup == total leaves no decay phase; every epoch is then a warmup epoch.
  const double t = static_cast<double>(epoch - cfg.warmup_epochs) / (cfg.total_epochs - cfg.warmup_epochs);
  return cfg.base_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * t));
}

}  // namespace rfssl::nn
