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

namespace rfssl::nn {

struct ScheduleConfig {
  double base_lr = 1e-4;
  int warmup_epochs = 10;
  int total_epochs = 200;

  void validate() const;
};

/// Linear warmup to base_lr, then half-cosine decay over the remaining epochs.
double lr_at_epoch(const ScheduleConfig& cfg, int epoch);

}  // namespace rfssl::nn
