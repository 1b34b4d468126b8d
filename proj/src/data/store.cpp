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

#include "rfssl/data/store.hpp"

#include <algorithm>
#include <fstream>
#include <cmath>
#include <functional>
#include <limits>

#include "rfssl/core/binary_io.hpp"

namespace rfssl::data {

namespace {

constexpr char kMagic[8] = {'R', 'F', 'S', 'S', 'L', 'D', 'A', 'T'};
constexpr std::uint64_t kMaxHeader = 1ull << 32;

void write_pixels(std::ostream& out, const Array2D& a) {
  std::vector<float> buf(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double v = a.values()[i];
    buf[i] = static_cast<float>(v);
    if (static_cast<double>(buf[i]) != v && !(std::isnan(v)))
      throw InvalidArgument("dataset: pixel value is not representable as float32");
  }
  io::write_array<float>(out, buf);
}

Array2D read_pixels(std::istream& in, int rows, int cols) {
  if (rows < 0 || cols < 0) throw FormatError("dataset: negative dimension");
  std::vector<float> buf(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  io::read_array<float>(in, buf, "pixel data");
  std::vector<double> values(buf.begin(), buf.end());
  return Array2D(rows, cols, std::move(values));
}

void write_mask(std::ostream& out, const Mask2D& m) { io::write_array<std::uint8_t>(out, m.values()); }

Mask2D read_mask(std::istream& in, int rows, int cols) {
  Mask2D m(rows, cols, 0);
  io::read_array<std::uint8_t>(in, m.values(), "mask data");
  return m;
}

void write_container(const std::filesystem::path& path, const nlohmann::json& header,
                     const std::function<void(std::ostream&)>& payload) {
  const std::string text = header.dump();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("dataset: cannot open '" + path.string() + "' for writing");
  out.write(kMagic, sizeof kMagic);
  io::write_pod(out, kDatasetVersion);
  io::write_pod(out, static_cast<std::uint64_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  payload(out);
  if (!out.flush()) throw IoError("dataset: write failed for '" + path.string() + "'");
}

template <class T>
T read_container(const std::filesystem::path& path, const std::string& kind,
                 const std::function<T(std::istream&, const nlohmann::json&)>& body) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("dataset: cannot open '" + path.string() + "'");
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kMagic))
    throw FormatError("dataset: '" + path.string() + "' is not a dataset file");
  const auto version = io::read_pod<std::uint32_t>(in, "dataset version");
  if (version != kDatasetVersion) throw FormatError("dataset: unsupported version " + std::to_string(version));
  const auto header_size = io::read_pod<std::uint64_t>(in, "dataset header size");
  if (header_size > kMaxHeader) throw FormatError("dataset: implausible header size");
  T result;
  try {
    const auto header = nlohmann::json::parse(io::read_bytes(in, header_size, "dataset header"));
    if (header.at("kind").get<std::string>() != kind)
      throw FormatError("dataset: expected a " + kind + " container");
    result = body(in, header);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("dataset: malformed header: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("dataset: ") + e.what());
  } catch (const ShapeMismatch& e) {
    throw FormatError(std::string("dataset: ") + e.what());
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("dataset: trailing bytes after payload");
  return result;
}

}  // namespace

nlohmann::json to_json(const CoreInfo& info) {
  nlohmann::json j{{"core_id", info.core_id},
                   {"patient_id", info.patient_id},
                   {"label", info.label},
                   {"involvement_percent", info.involvement_percent}};
  j["gleason_score"] = info.gleason_score ? nlohmann::json(*info.gleason_score) : nlohmann::json(nullptr);
  return j;
}

CoreInfo core_info_from_json(const nlohmann::json& j) {
  CoreInfo info;
  info.core_id = j.at("core_id").get<std::string>();
  info.patient_id = j.at("patient_id").get<std::string>();
  info.label = j.at("label").get<int>();
  info.involvement_percent = j.at("involvement_percent").get<double>();
  if (j.contains("gleason_score") && !j.at("gleason_score").is_null())
    info.gleason_score = j.at("gleason_score").get<int>();
  info.validate();
  return info;
}

void store_dataset(const std::vector<PatchRecord>& records, const std::filesystem::path& path) {
  nlohmann::json header{{"kind", "patches"}, {"records", nlohmann::json::array()}};
  for (const auto& r : records)
    header["records"].push_back({{"core_id", r.core_id},
                                 {"patient_id", r.patient_id},
                                 {"axial_origin_mm", r.axial_origin_mm},
                                 {"lateral_origin_mm", r.lateral_origin_mm},
                                 {"weak_label", r.weak_label},
                                 {"region", to_string(r.region)},
                                 {"involvement_percent", r.involvement_percent},
                                 {"rows", r.patch.rows()},
                                 {"cols", r.patch.cols()}});
  write_container(path, header, [&](std::ostream& out) {
    for (const auto& r : records) write_pixels(out, r.patch);
  });
}

std::vector<PatchRecord> load_dataset(const std::filesystem::path& path) {
  return read_container<std::vector<PatchRecord>>(
      path, "patches", [](std::istream& in, const nlohmann::json& header) {
        std::vector<PatchRecord> out;
        for (const auto& j : header.at("records")) {
          PatchRecord r;
          r.core_id = j.at("core_id").get<std::string>();
          r.patient_id = j.at("patient_id").get<std::string>();
          r.axial_origin_mm = j.at("axial_origin_mm").get<double>();
          r.lateral_origin_mm = j.at("lateral_origin_mm").get<double>();
          r.weak_label = j.at("weak_label").get<int>();
          r.region = region_from_string(j.at("region").get<std::string>());
          r.involvement_percent = j.at("involvement_percent").get<double>();
          r.patch = read_pixels(in, j.at("rows").get<int>(), j.at("cols").get<int>());
          out.push_back(std::move(r));
        }
        return out;
      });
}

void store_cores(const std::vector<BiopsyCore>& cores, const std::filesystem::path& path) {
  nlohmann::json header{{"kind", "cores"}, {"records", nlohmann::json::array()}};
  for (const auto& c : cores) {
    c.validate();
    header["records"].push_back({{"info", to_json(c.info)},
                                 {"frame_id", c.frame.frame_id},
                                 {"axial_extent_mm", c.frame.axial_extent_mm},
                                 {"lateral_extent_mm", c.frame.lateral_extent_mm},
                                 {"rows", c.frame.axial_count()},
                                 {"cols", c.frame.lateral_count()}});
  }
  write_container(path, header, [&](std::ostream& out) {
    for (const auto& c : cores) {
      write_pixels(out, c.frame.samples);
      write_mask(out, c.prostate_mask.mask);
      write_mask(out, c.needle_mask.mask);
    }
  });
}

std::vector<BiopsyCore> load_cores(const std::filesystem::path& path) {
  return read_container<std::vector<BiopsyCore>>(
      path, "cores", [](std::istream& in, const nlohmann::json& header) {
        std::vector<BiopsyCore> out;
        for (const auto& j : header.at("records")) {
          BiopsyCore c;
          c.info = core_info_from_json(j.at("info"));
          c.frame.frame_id = j.at("frame_id").get<std::string>();
          c.frame.axial_extent_mm = j.at("axial_extent_mm").get<double>();
          c.frame.lateral_extent_mm = j.at("lateral_extent_mm").get<double>();
          const int rows = j.at("rows").get<int>(), cols = j.at("cols").get<int>();
          c.frame.samples = read_pixels(in, rows, cols);
          c.prostate_mask = {read_mask(in, rows, cols), Region::prostate};
          c.needle_mask = {read_mask(in, rows, cols), Region::needle};
          c.validate();
          out.push_back(std::move(c));
        }
        return out;
      });
}

nlohmann::json to_json(const SplitManifest& m) {
  return {{"train_patients", m.train_patients},
          {"val_patients", m.val_patients},
          {"test_patients", m.test_patients},
          {"seed", m.seed}};
}

SplitManifest manifest_from_json(const nlohmann::json& j) {
  SplitManifest m;
  m.train_patients = j.at("train_patients").get<std::vector<std::string>>();
  m.val_patients = j.at("val_patients").get<std::vector<std::string>>();
  m.test_patients = j.at("test_patients").get<std::vector<std::string>>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.validate();
  return m;
}

void write_manifest(const SplitManifest& manifest, const std::vector<CoreInfo>& cores,
                    const std::filesystem::path& path) {
  nlohmann::json j{{"split", to_json(manifest)}, {"cores", nlohmann::json::array()}};
  for (const auto& c : cores) j["cores"].push_back(to_json(c));
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("manifest: cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out.flush()) throw IoError("manifest: write failed for '" + path.string() + "'");
}

ManifestFile read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("manifest: cannot open '" + path.string() + "'");
  try {
    const auto j = nlohmann::json::parse(in);
    ManifestFile f;
    f.split = manifest_from_json(j.at("split"));
    for (const auto& c : j.at("cores")) f.cores.push_back(core_info_from_json(c));
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
}

}  // namespace rfssl::data
