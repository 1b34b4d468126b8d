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
#include <optional>

#include <json.hpp>

#include "rfssl/nn/model.hpp"
#include "rfssl/nn/optim.hpp"

namespace rfssl::nn {

nlohmann::json to_json(const ArchitectureDescriptor& arch);
/// Missing keys keep their tiny-preset defaults; unknown keys are rejected.
ArchitectureDescriptor architecture_from_json(const nlohmann::json& j);

struct Checkpoint {
  ModelState model;
  std::optional<OptimizerState> optimizer;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Layout: "RFSSLCKP", u32 version, u64 header size, JSON header
/// (architecture, tensor names and shapes, optimizer config and step), then
/// the raw float64 payload: parameters, buffers, optimizer moments.
void save_checkpoint(const std::filesystem::path& path, ModelState& model,
                     const OptimizerState* optimizer = nullptr);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace rfssl::nn
