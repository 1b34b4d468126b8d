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
#include <vector>

#include <json.hpp>

#include "rfssl/data/types.hpp"

namespace rfssl::data {

// Container layout: 8-byte magic, u32 version, u64 header length, JSON text
// header, then the raw payload. Pixels are stored as little-endian float32
// and masks as bytes.

inline constexpr std::uint32_t kDatasetVersion = 1;

void store_dataset(const std::vector<PatchRecord>& records, const std::filesystem::path& path);
std::vector<PatchRecord> load_dataset(const std::filesystem::path& path);

void store_cores(const std::vector<BiopsyCore>& cores, const std::filesystem::path& path);
std::vector<BiopsyCore> load_cores(const std::filesystem::path& path);

nlohmann::json to_json(const CoreInfo& info);
CoreInfo core_info_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SplitManifest& manifest);
SplitManifest manifest_from_json(const nlohmann::json& j);

/// Manifest file: the split plus per-core metadata.
void write_manifest(const SplitManifest& manifest, const std::vector<CoreInfo>& cores,
                    const std::filesystem::path& path);
struct ManifestFile {
  SplitManifest split;
  std::vector<CoreInfo> cores;
};
ManifestFile read_manifest(const std::filesystem::path& path);

}  // namespace rfssl::data
