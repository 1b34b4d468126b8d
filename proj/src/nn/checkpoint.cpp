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

#include "rfssl/nn/checkpoint.hpp"

#include <fstream>

#include "rfssl/core/binary_io.hpp"
#include "rfssl/core/error.hpp"

namespace rfssl::nn {

namespace {

constexpr char kMagic[8] = {'R', 'F', 'S', 'S', 'L', 'C', 'K', 'P'};
constexpr std::uint64_t kMaxHeader = 64u << 20;

nlohmann::json tensor_entry(const std::string& name, const Tensor& t) {
  return {{"name", name}, {"shape", t.shape()}};
}

void expect_entry(const nlohmann::json& entry, const std::string& name, const Tensor& t) {
  if (entry.at("name").get<std::string>() != name || entry.at("shape").get<std::vector<int>>() != t.shape())
    throw FormatError("checkpoint: tensor layout differs from the architecture at '" + name + "'");
}

}  // namespace

nlohmann::json to_json(const ArchitectureDescriptor& a) {
  return {{"input_size", a.input_size},         {"stem_channels", a.stem_channels},
          {"stem_kernel", a.stem_kernel},       {"stem_stride", a.stem_stride},
          {"stage_channels", a.stage_channels}, {"stage_blocks", a.stage_blocks},
          {"projector_hidden", a.projector_hidden}, {"projector_out", a.projector_out},
          {"num_classes", a.num_classes}};
}

ArchitectureDescriptor architecture_from_json(const nlohmann::json& j) {
  if (j.is_string()) return ArchitectureDescriptor::preset(j.get<std::string>());
  if (!j.is_object()) throw ConfigError("architecture: expected an object or preset name");
  ArchitectureDescriptor a;
  if (j.contains("preset")) a = ArchitectureDescriptor::preset(j.at("preset").get<std::string>());
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "preset") continue;
      else if (key == "input_size") a.input_size = value.get<int>();
      else if (key == "stem_channels") a.stem_channels = value.get<int>();
      else if (key == "stem_kernel") a.stem_kernel = value.get<int>();
      else if (key == "stem_stride") a.stem_stride = value.get<int>();
      else if (key == "stage_channels") a.stage_channels = value.get<std::vector<int>>();
      else if (key == "stage_blocks") a.stage_blocks = value.get<std::vector<int>>();
      else if (key == "projector_hidden") a.projector_hidden = value.get<int>();
      else if (key == "projector_out") a.projector_out = value.get<int>();
      else if (key == "num_classes") a.num_classes = value.get<int>();
      else throw ConfigError("architecture: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("architecture: ") + e.what());
  }
  a.validate();
  return a;
}

void save_checkpoint(const std::filesystem::path& path, ModelState& model, const OptimizerState* opt) {
  const auto params = model.parameters();
  const auto buffers = model.buffers();
  nlohmann::json header;
  header["architecture"] = to_json(model.arch);
  header["freeze"] = {model.freeze.backbone, model.freeze.projector, model.freeze.head};
  header["parameters"] = nlohmann::json::array();
  for (const auto* p : params) header["parameters"].push_back(tensor_entry(p->name, p->value));
  header["buffers"] = nlohmann::json::array();
  for (const auto* b : buffers) header["buffers"].push_back(tensor_entry(b->name, b->value));
  if (opt) {
    const auto& c = opt->config;
    header["optimizer"] = {{"kind", to_string(c.kind)}, {"beta1", c.beta1}, {"beta2", c.beta2},
                           {"eps", c.eps}, {"weight_decay", c.weight_decay}, {"step", opt->step},
                           {"moments", opt->first_moment.size()}};
    if (!opt->first_moment.empty() && opt->first_moment.size() != params.size())
      throw InvalidArgument("checkpoint: optimizer state does not cover the full parameter list");
  }
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("checkpoint: cannot open '" + path.string() + "' for writing");
  out.write(kMagic, sizeof kMagic);
  io::write_pod(out, kCheckpointVersion);
  io::write_pod(out, static_cast<std::uint64_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto* p : params) io::write_array(out, p->value.values());
  for (const auto* b : buffers) io::write_array(out, b->value.values());
  if (opt)
    for (std::size_t i = 0; i < opt->first_moment.size(); ++i) {
      io::write_array(out, opt->first_moment[i].values());
      io::write_array(out, opt->second_moment[i].values());
    }
  if (!out.flush()) throw IoError("checkpoint: write failed for '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("checkpoint: cannot open '" + path.string() + "'");
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kMagic))
    throw FormatError("checkpoint: '" + path.string() + "' is not a checkpoint file");
  const auto version = io::read_pod<std::uint32_t>(in, "checkpoint version");
  if (version != kCheckpointVersion)
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  const auto header_size = io::read_pod<std::uint64_t>(in, "checkpoint header size");
  if (header_size > kMaxHeader) throw FormatError("checkpoint: implausible header size");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(io::read_bytes(in, header_size, "checkpoint header"));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint: bad header: ") + e.what());
  }

  Checkpoint ck;
  try {
    Rng unused(0);
    ck.model = make_model(architecture_from_json(header.at("architecture")), unused);
    const auto freeze = header.at("freeze").get<std::vector<bool>>();
    if (freeze.size() != 3) throw FormatError("checkpoint: bad freeze flags");
    ck.model.freeze = {freeze[0], freeze[1], freeze[2]};

    const auto params = ck.model.parameters();
    const auto buffers = ck.model.buffers();
    const auto& pj = header.at("parameters");
    const auto& bj = header.at("buffers");
    if (pj.size() != params.size() || bj.size() != buffers.size())
      throw FormatError("checkpoint: tensor count differs from the architecture");
    for (std::size_t i = 0; i < params.size(); ++i) expect_entry(pj[i], params[i]->name, params[i]->value);
    for (std::size_t i = 0; i < buffers.size(); ++i) expect_entry(bj[i], buffers[i]->name, buffers[i]->value);
    for (auto* p : params) io::read_array(in, p->value.values(), p->name);
    for (auto* b : buffers) io::read_array(in, b->value.values(), b->name);

    if (header.contains("optimizer")) {
      const auto& oj = header.at("optimizer");
      OptimizerState opt;
      opt.config = {optimizer_from_string(oj.at("kind").get<std::string>()), oj.at("beta1").get<double>(),
                    oj.at("beta2").get<double>(), oj.at("eps").get<double>(),
                    oj.at("weight_decay").get<double>()};
      opt.step = oj.at("step").get<std::int64_t>();
      const auto moments = oj.at("moments").get<std::size_t>();
      if (moments != 0 && moments != params.size()) throw FormatError("checkpoint: bad optimizer moment count");
      const bool scalar = opt.config.kind == OptimizerKind::novograd;
      for (std::size_t i = 0; i < moments; ++i) {
        opt.first_moment.emplace_back(params[i]->value.shape(), 0.0);
        opt.second_moment.push_back(scalar ? Tensor({1}, 0.0) : Tensor(params[i]->value.shape(), 0.0));
        io::read_array(in, opt.first_moment.back().values(), "optimizer moments");
        io::read_array(in, opt.second_moment.back().values(), "optimizer moments");
      }
      ck.optimizer = std::move(opt);
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint: malformed header: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("checkpoint: trailing bytes after payload");
  return ck;
}

}  // namespace rfssl::nn
