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

#include "rfssl/cli/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>

#include "rfssl/core/error.hpp"
#include "rfssl/core/parallel.hpp"
#include "rfssl/data/extract.hpp"
#include "rfssl/data/phantom.hpp"
#include "rfssl/data/split.hpp"
#include "rfssl/data/store.hpp"
#include "rfssl/nn/checkpoint.hpp"
#include "rfssl/train/config.hpp"
#include "rfssl/train/experiment.hpp"
#include "rfssl/train/gradcheck_suite.hpp"
#include "rfssl/train/heatmap.hpp"
#include "rfssl/train/predict.hpp"
#include "rfssl/train/report.hpp"
#include "rfssl/train/trainer.hpp"

namespace rfssl::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using train::JsonReader;

constexpr const char* kResolvedConfig = "config.resolved.json";

json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("'" + path.string() + "' is not valid JSON");
  return j;
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

void write_json(const fs::path& path, const json& j) { train::write_text(path, j.dump(2) + "\n"); }

/// The configuration document of one subcommand: defaults, then the --config
/// file, then --set overrides. Flags are applied by the caller afterwards.
template <class T>
T resolve(const T& defaults, const std::function<json(const T&)>& to_doc,
          const std::function<T(const json&, const T&)>& from_doc, const std::string& config_path,
          const std::vector<std::string>& sets) {
  T value = defaults;
  if (!config_path.empty()) value = from_doc(read_json_file(config_path), defaults);
  if (sets.empty()) return value;
  json doc = to_doc(value);
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + s + "'");
    train::apply_override(doc, s.substr(0, eq), s.substr(eq + 1));
  }
  return from_doc(doc, defaults);
}

json to_json(const data::SplitConfig& c) {
  return {{"test_cancer_fraction", c.test_cancer_fraction}, {"validation_fraction", c.validation_fraction}};
}

data::SplitConfig split_from_json(const json& j, data::SplitConfig c) {
  JsonReader r(j, "split");
  r.get("test_cancer_fraction", c.test_cancer_fraction);
  r.get("validation_fraction", c.validation_fraction);
  r.finish();
  return c;
}

json to_json(const data::ExtractionConfig& c) {
  return {{"patch_mm", c.patch_mm},
          {"stride_mm", c.stride_mm},
          {"needle_overlap_min", c.needle_overlap_min},
          {"prostate_overlap_min", c.prostate_overlap_min},
          {"output_size", c.output_size}};
}

data::ExtractionConfig extraction_from_json(const json& j, data::ExtractionConfig c) {
  JsonReader r(j, "extraction");
  r.get("patch_mm", c.patch_mm);
  r.get("stride_mm", c.stride_mm);
  r.get("needle_overlap_min", c.needle_overlap_min);
  r.get("prostate_overlap_min", c.prostate_overlap_min);
  r.get("output_size", c.output_size);
  r.finish();
  return c;
}

nn::ArchitectureDescriptor architecture_value(JsonReader& r, nn::ArchitectureDescriptor current) {
  if (!r.has("architecture")) return current;
  const json& a = r.at("architecture");
  if (a.is_string()) return nn::ArchitectureDescriptor::preset(a.get<std::string>());
  return nn::architecture_from_json(a);
}

// ------------------------------------------------------------ documents

struct SynthDoc {
  std::uint64_t seed = 0;
  int cores = 200;
  int cores_per_patient = 2;
  data::PhantomConfig phantom;
  data::SplitConfig split;
};

json synth_doc(const SynthDoc& d) {
  return {{"seed", d.seed},
          {"cores", d.cores},
          {"cores_per_patient", d.cores_per_patient},
          {"phantom", train::to_json(d.phantom)},
          {"split", to_json(d.split)}};
}

SynthDoc synth_from(const json& j, SynthDoc d) {
  JsonReader r(j, "synth-gen");
  r.get("seed", d.seed);
  r.get("cores", d.cores);
  r.get("cores_per_patient", d.cores_per_patient);
  if (r.has("phantom")) d.phantom = train::phantom_from_json(r.at("phantom"), d.phantom);
  if (r.has("split")) d.split = split_from_json(r.at("split"), d.split);
  r.finish();
  return d;
}

struct ExtractDoc {
  std::uint64_t seed = 0;
  std::string cores;
  std::string manifest;
  std::string split = "all";
  std::string region = "needle";
  data::ExtractionConfig extraction{5.0, 5.0, 0.66, 0.9, 64};
  double min_involvement = 0.0;
  bool balance = false;
};

json extract_doc(const ExtractDoc& d) {
  return {{"seed", d.seed},
          {"cores", d.cores},
          {"manifest", d.manifest},
          {"split", d.split},
          {"region", d.region},
          {"extraction", to_json(d.extraction)},
          {"min_involvement", d.min_involvement},
          {"balance", d.balance}};
}

ExtractDoc extract_from(const json& j, ExtractDoc d) {
  JsonReader r(j, "extract-patches");
  r.get("seed", d.seed);
  r.get("cores", d.cores);
  r.get("manifest", d.manifest);
  r.get("split", d.split);
  r.get("region", d.region);
  if (r.has("extraction")) d.extraction = extraction_from_json(r.at("extraction"), d.extraction);
  r.get("min_involvement", d.min_involvement);
  r.get("balance", d.balance);
  r.finish();
  return d;
}

struct TrainDoc {
  std::uint64_t seed = 0;
  std::string data;
  std::string val;
  std::string init;
  nn::ArchitectureDescriptor architecture = nn::ArchitectureDescriptor::tiny();
  double min_involvement = train::kMinInvolvement;
  train::TrainRun run;
};

TrainDoc train_defaults(train::RunMode mode) {
  TrainDoc d;
  d.run = train::TrainRun::defaults(mode);
  return d;
}

json train_doc(const TrainDoc& d) {
  return {{"seed", d.seed},
          {"data", d.data},
          {"val", d.val},
          {"init", d.init},
          {"architecture", nn::to_json(d.architecture)},
          {"min_involvement", d.min_involvement},
          {"run", train::to_json(d.run)}};
}

TrainDoc train_from(const json& j, TrainDoc d) {
  JsonReader r(j, "train");
  r.get("seed", d.seed);
  r.get("data", d.data);
  r.get("val", d.val);
  r.get("init", d.init);
  d.architecture = architecture_value(r, d.architecture);
  r.get("min_involvement", d.min_involvement);
  if (r.has("run")) d.run = train::train_run_from_json(r.at("run"), d.run);
  r.finish();
  return d;
}

struct EvalDoc {
  std::string model;
  std::string data;
  std::string cores;
  std::vector<std::string> core_ids;
  data::ExtractionConfig extraction{5.0, 1.0, 0.66, 0.9, 64};
  double threshold = train::kDecisionThreshold;
  double min_involvement = train::kMinInvolvement;
};

json eval_doc(const EvalDoc& d) {
  return {{"model", d.model},
          {"data", d.data},
          {"cores", d.cores},
          {"core_ids", d.core_ids},
          {"extraction", to_json(d.extraction)},
          {"threshold", d.threshold},
          {"min_involvement", d.min_involvement}};
}

EvalDoc eval_from(const json& j, EvalDoc d) {
  JsonReader r(j, "evaluate");
  r.get("model", d.model);
  r.get("data", d.data);
  r.get("cores", d.cores);
  r.get("core_ids", d.core_ids);
  if (r.has("extraction")) d.extraction = extraction_from_json(r.at("extraction"), d.extraction);
  r.get("threshold", d.threshold);
  r.get("min_involvement", d.min_involvement);
  r.finish();
  return d;
}

// ------------------------------------------------------------- helpers

train::PatchRefs refs_of(const std::vector<data::PatchRecord>& records) {
  train::PatchRefs refs;
  for (const auto& r : records) refs.push_back(&r.patch);
  return refs;
}

void check_patch_size(const std::vector<data::PatchRecord>& records, const nn::ArchitectureDescriptor& arch) {
  for (const auto& r : records)
    if (r.patch.rows() != arch.input_size || r.patch.cols() != arch.input_size)
      throw ShapeMismatch("patch of core " + r.core_id + " is " + std::to_string(r.patch.rows()) + "x" +
                          std::to_string(r.patch.cols()) + " but the model expects " +
                          std::to_string(arch.input_size) + "x" + std::to_string(arch.input_size));
}

/// Patch records grouped by core in order of first appearance.
std::vector<train::EvalCore> group_by_core(const std::vector<data::PatchRecord>& records) {
  std::vector<train::EvalCore> cores;
  std::map<std::string, std::size_t> index;
  for (const auto& r : records) {
    auto [it, fresh] = index.emplace(r.core_id, cores.size());
    if (fresh) {
      data::CoreInfo info{r.core_id, r.patient_id, r.weak_label, r.involvement_percent, std::nullopt};
      cores.push_back({info, {}});
    }
    cores[it->second].patches.push_back(r.patch);
  }
  return cores;
}

nn::ModelState load_model(const std::string& path) {
  if (path.empty()) throw InvalidArgument("a model checkpoint is required");
  return nn::load_checkpoint(path).model;
}

using Log = std::function<void(const std::string&)>;

// ------------------------------------------------------------ commands

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  int threads = 1;
};

void add_common(CLI::App* sub, Common& c, bool threads) {
  sub->add_option("--config", c.config, "JSON configuration file");
  sub->add_option("--set", c.sets, "Override a configuration value, key=value with a dotted key");
  sub->add_option("--out", c.out, "Output directory")->required();
  if (threads) sub->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
}

int synth_gen(const Common& c, std::optional<std::uint64_t> seed, std::optional<int> cores,
              std::optional<int> per_patient, std::ostream& out, const Log&) {
  SynthDoc d = resolve<SynthDoc>({}, synth_doc, synth_from, c.config, c.sets);
  d.seed = *seed;
  if (cores) d.cores = *cores;
  if (per_patient) d.cores_per_patient = *per_patient;
  d.phantom.validate();
  d.split.validate();
  const fs::path dir(c.out);
  prepare_dir(dir);
  const auto corpus = data::generate_phantom_corpus(d.phantom, d.cores, d.cores_per_patient, d.seed, c.threads);
  const auto infos = data::core_infos(corpus);
  const auto split = data::split_patients(infos, d.split, d.seed);
  data::store_cores(corpus, dir / "cores.rfd");
  data::write_manifest(split, infos, dir / "manifest.json");
  write_json(dir / kResolvedConfig, synth_doc(d));
  out << "wrote " << corpus.size() << " cores (" << split.train_patients.size() << " train, "
      << split.val_patients.size() << " val, " << split.test_patients.size() << " test patients) to "
      << dir.string() << "\n";
  return kExitOk;
}

int extract(const Common& c, ExtractDoc flags, const std::set<std::string>& given, std::ostream& out,
            const Log&) {
  ExtractDoc d = resolve<ExtractDoc>({}, extract_doc, extract_from, c.config, c.sets);
  if (given.count("seed")) d.seed = flags.seed;
  if (given.count("cores")) d.cores = flags.cores;
  if (given.count("manifest")) d.manifest = flags.manifest;
  if (given.count("split")) d.split = flags.split;
  if (given.count("region")) d.region = flags.region;
  if (given.count("patch")) d.extraction.patch_mm = flags.extraction.patch_mm;
  if (given.count("stride")) d.extraction.stride_mm = flags.extraction.stride_mm;
  if (given.count("size")) d.extraction.output_size = flags.extraction.output_size;
  if (given.count("min_involvement")) d.min_involvement = flags.min_involvement;
  if (given.count("balance")) d.balance = true;
  d.extraction.validate();
  const data::Region region = data::region_from_string(d.region);
  if (d.cores.empty()) throw InvalidArgument("extract-patches: --cores is required");

  auto cores = data::load_cores(d.cores);
  auto infos = data::core_infos(cores);
  if (d.split != "all") {
    if (d.manifest.empty()) throw InvalidArgument("extract-patches: --split needs --manifest");
    const auto m = data::read_manifest(d.manifest).split;
    const std::vector<std::string>* patients = d.split == "train" ? &m.train_patients
                                               : d.split == "val" ? &m.val_patients
                                               : d.split == "test" ? &m.test_patients
                                                                   : nullptr;
    if (!patients) throw InvalidArgument("extract-patches: split must be all, train, val or test");
    infos = data::cores_of(infos, *patients);
  }
  infos = data::balance_and_filter(infos, d.min_involvement, d.balance, d.seed);
  std::set<std::string> keep;
  for (const auto& i : infos) keep.insert(i.core_id);

  std::vector<data::PatchRecord> records;
  for (const auto& core : cores)
    if (keep.count(core.info.core_id))
      for (auto& r : data::extract_patches(core, region, d.extraction)) records.push_back(std::move(r));
  const fs::path dir(c.out);
  prepare_dir(dir);
  data::store_dataset(records, dir / "patches.rfd");
  write_json(dir / kResolvedConfig, extract_doc(d));
  out << "wrote " << records.size() << " " << d.region << " patches from " << keep.size() << " cores to "
      << (dir / "patches.rfd").string() << "\n";
  return kExitOk;
}

int pretrain_cmd(const Common& c, TrainDoc flags, const std::set<std::string>& given, std::ostream& out,
                 const Log& log) {
  TrainDoc d = resolve<TrainDoc>(train_defaults(train::RunMode::pretrain), train_doc, train_from,
                                 c.config, c.sets);
  d.seed = flags.seed;
  if (given.count("data")) d.data = flags.data;
  if (given.count("init")) d.init = flags.init;
  if (given.count("arch")) d.architecture = flags.architecture;
  if (given.count("epochs")) d.run.epochs = flags.run.epochs;
  if (given.count("loss")) d.run.loss = flags.run.loss;
  d.run.mode = train::RunMode::pretrain;
  d.run.seed = d.seed;
  d.run.validate();
  if (d.data.empty()) throw InvalidArgument("pretrain: --data is required");

  nn::ModelState model;
  if (!d.init.empty()) {
    model = load_model(d.init);
    d.architecture = model.arch;
  } else {
    Rng init = Rng::substream(d.seed, "init");
    model = nn::make_model(d.architecture, init);
  }
  const auto records = data::load_dataset(d.data);
  if (records.empty()) throw InvalidArgument("pretrain: dataset is empty");
  check_patch_size(records, d.architecture);
  const auto refs = refs_of(records);
  const fs::path dir(c.out);
  prepare_dir(dir);
  write_json(dir / kResolvedConfig, train_doc(d));
  const auto result = train::pretrain(d.run, refs, model, [&](int epoch, double loss) {
    log("epoch " + std::to_string(epoch) + " loss " + train::format_double(loss));
  });
  nn::save_checkpoint(dir / "model.ckpt", model);
  train::write_curve(dir / "loss.csv", result.loss_curve, {});
  out << "final loss " << train::format_double(result.loss_curve.back()) << ", embedding std "
      << train::format_double(train::mean_embedding_std(model, refs)) << "\n";
  return kExitOk;
}

int finetune_cmd(const Common& c, TrainDoc flags, const std::set<std::string>& given, std::ostream& out,
                 const Log& log) {
  TrainDoc d = resolve<TrainDoc>(train_defaults(train::RunMode::linear_finetune), train_doc,
                                 train_from, c.config, c.sets);
  d.seed = flags.seed;
  if (given.count("data")) d.data = flags.data;
  if (given.count("val")) d.val = flags.val;
  if (given.count("init")) d.init = flags.init;
  if (given.count("arch")) d.architecture = flags.architecture;
  if (given.count("epochs")) d.run.epochs = flags.run.epochs;
  if (given.count("mode")) d.run.mode = flags.run.mode;
  d.run.seed = d.seed;
  d.run.validate();
  if (d.run.mode == train::RunMode::pretrain) throw ConfigError("finetune: mode must be a finetuning mode");
  if (d.data.empty()) throw InvalidArgument("finetune: --data is required");

  nn::ModelState model;
  if (!d.init.empty()) {
    model = load_model(d.init);
    d.architecture = model.arch;
  } else {
    Rng init = Rng::substream(d.seed, "init");
    model = nn::make_model(d.architecture, init);
  }
  const auto records = data::load_dataset(d.data);
  check_patch_size(records, d.architecture);
  train::LabeledSet set{refs_of(records), {}};
  for (const auto& r : records) set.labels.push_back(r.weak_label);

  train::Validator validator;
  std::vector<train::EvalCore> val_cores;
  if (!d.val.empty()) {
    const auto val_records = data::load_dataset(d.val);
    check_patch_size(val_records, d.architecture);
    val_cores = group_by_core(val_records);
    validator = [&](const nn::ModelState& m) {
      std::vector<train::CorePrediction> preds;
      for (const auto& core : val_cores) preds.push_back(train::predict_eval_core(m, core));
      try {
        return train::compute_metrics(preds, train::MetricLevel::core, d.min_involvement).auroc;
      } catch (const InvalidArgument&) {
        return std::nan("");
      }
    };
  }
  const fs::path dir(c.out);
  prepare_dir(dir);
  write_json(dir / kResolvedConfig, train_doc(d));
  const auto result = train::finetune(d.run, set, model, validator, [&](int epoch, double loss) {
    log("epoch " + std::to_string(epoch) + " loss " + train::format_double(loss));
  });
  nn::save_checkpoint(dir / "model.ckpt", model);
  train::write_curve(dir / "curve.csv", result.train_loss, result.val_auroc);
  out << "final loss " << train::format_double(result.train_loss.back());
  if (result.best_epoch >= 0)
    out << ", restored epoch " << result.best_epoch << " (val AUROC "
        << train::format_double(result.val_auroc[static_cast<std::size_t>(result.best_epoch)]) << ")";
  out << "\n";
  return kExitOk;
}

int evaluate_cmd(const Common& c, EvalDoc flags, const std::set<std::string>& given, std::ostream& out,
                 const Log& log) {
  EvalDoc d = resolve<EvalDoc>({}, eval_doc, eval_from, c.config, c.sets);
  if (given.count("model")) d.model = flags.model;
  if (given.count("data")) d.data = flags.data;
  if (given.count("threshold")) d.threshold = flags.threshold;
  if (given.count("min_involvement")) d.min_involvement = flags.min_involvement;
  if (d.data.empty()) throw InvalidArgument("evaluate: --data is required");
  const nn::ModelState model = load_model(d.model);
  const auto records = data::load_dataset(d.data);
  check_patch_size(records, model.arch);
  const auto cores = group_by_core(records);
  std::vector<train::CorePrediction> preds(cores.size());
  parallel_for(cores.size(), c.threads,
               [&](std::size_t i) { preds[i] = train::predict_eval_core(model, cores[i], d.threshold); });

  const fs::path dir(c.out);
  prepare_dir(dir);
  write_json(dir / kResolvedConfig, eval_doc(d));
  json report{{"schema_version", train::kReportSchemaVersion}};
  const auto core = train::compute_metrics(preds, train::MetricLevel::core, d.min_involvement, d.threshold);
  const auto patch = train::compute_metrics(preds, train::MetricLevel::patch, d.min_involvement, d.threshold);
  report["core"] = train::metrics_json(core);
  report["patch"] = train::metrics_json(patch);
  std::string csv = "core_id,label,involvement_percent,predicted_involvement,patches\n";
  for (const auto& p : preds) {
    csv += p.core_id + "," + std::to_string(p.true_label) + "," + train::format_double(p.involvement_percent) + "," +
           train::format_double(train::predicted_involvement(p)) + "," + std::to_string(p.patch_classes.size()) + "\n";
  }
  write_json(dir / "report.json", report);
  train::write_text(dir / "involvement.csv", csv);
  log("evaluated " + std::to_string(records.size()) + " patches from " + std::to_string(cores.size()) + " cores");
  out << "core AUROC " << train::format_double(core.auroc) << ", patch AUROC " << train::format_double(patch.auroc)
      << "\n";
  return kExitOk;
}

int heatmap_cmd(const Common& c, EvalDoc flags, const std::set<std::string>& given, std::ostream& out,
                const Log& log) {
  EvalDoc d = resolve<EvalDoc>({}, eval_doc, eval_from, c.config, c.sets);
  if (given.count("model")) d.model = flags.model;
  if (given.count("cores")) d.cores = flags.cores;
  if (given.count("core_ids")) d.core_ids = flags.core_ids;
  if (given.count("stride")) d.extraction.stride_mm = flags.extraction.stride_mm;
  if (given.count("patch")) d.extraction.patch_mm = flags.extraction.patch_mm;
  if (given.count("threshold")) d.threshold = flags.threshold;
  if (d.cores.empty()) throw InvalidArgument("heatmap: --cores is required");
  const nn::ModelState model = load_model(d.model);
  d.extraction.output_size = model.arch.input_size;
  d.extraction.validate();
  const auto all = data::load_cores(d.cores);
  std::vector<const data::BiopsyCore*> chosen;
  for (const auto& core : all)
    if (d.core_ids.empty() || std::find(d.core_ids.begin(), d.core_ids.end(), core.info.core_id) != d.core_ids.end())
      chosen.push_back(&core);
  for (const auto& id : d.core_ids)
    if (std::none_of(chosen.begin(), chosen.end(), [&](const auto* k) { return k->info.core_id == id; }))
      throw InvalidArgument("heatmap: no core '" + id + "' in " + d.cores);

  const fs::path dir(c.out);
  prepare_dir(dir);
  write_json(dir / kResolvedConfig, eval_doc(d));
  std::vector<train::Heatmap> maps(chosen.size());
  parallel_for(chosen.size(), c.threads,
               [&](std::size_t i) { maps[i] = train::render_heatmap(model, *chosen[i], d.extraction, d.threshold); });
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    const std::string& id = chosen[i]->info.core_id;
    if (maps[i].overlay_pixels == 0) log("warning: core " + id + " has no needle-region patches; background only");
    train::write_ppm(maps[i].image, dir / (id + ".ppm"));
  }
  out << "wrote " << chosen.size() << " heatmaps to " << dir.string() << "\n";
  return kExitOk;
}

int experiment_cmd(const Common& c, std::uint64_t seed, bool threads_given, std::ostream& out, const Log& log) {
  const auto to = [](const train::ExperimentConfig& e) { return train::to_json(e); };
  const auto from = [](const json& j, const train::ExperimentConfig&) { return train::experiment_from_json(j); };
  train::ExperimentConfig cfg = resolve<train::ExperimentConfig>({}, to, from, c.config, c.sets);
  cfg.seed = seed;
  if (threads_given) cfg.threads = c.threads;
  cfg.validate();
  const fs::path dir(c.out);
  prepare_dir(dir);
  write_json(dir / kResolvedConfig, train::to_json(cfg));
  const json report = train::run_experiment(cfg, dir, log);
  for (const auto& arm : report["arms"]) {
    const auto& s = arm["summary"]["core"]["auroc"];
    out << arm["name"].get<std::string>() << ": core AUROC ";
    if (s["mean"].is_number())
      out << train::format_double(s["mean"].get<double>()) << " +/- " << train::format_double(s["std"].get<double>());
    else
      out << "n/a";
    out << " (" << arm["failed_runs"].get<int>() << " failed runs)\n";
  }
  return kExitOk;
}

int gradcheck_cmd(std::uint64_t seed, double tolerance, double step, std::ostream& out) {
  const auto results = train::run_gradcheck_suite(seed, tolerance, step);
  int failed = 0;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << " elements=" << r.elements
        << " rel_error=" << train::format_double(r.relative_error) << "\n";
    failed += !r.passed;
  }
  if (failed) throw NumericError(std::to_string(failed) + " of " + std::to_string(results.size()) + " gradient checks failed");
  out << "all " << results.size() << " gradient checks passed\n";
  return kExitOk;
}

std::set<std::string> given_of(const std::map<std::string, CLI::Option*>& options) {
  std::set<std::string> out;
  for (const auto& [k, opt] : options)
    if (opt->count() > 0) out.insert(k);
  return out;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Self-supervised representation learning toolkit for RF ultrasound", "rfssl"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  const Log log = [&err](const std::string& line) { err << line << "\n" << std::flush; };
  Common common;
  std::uint64_t seed = 0;

  auto* synth = app.add_subcommand("synth-gen", "Generate a synthetic phantom corpus and its patient split");
  add_common(synth, common, true);
  synth->add_option("--seed", seed, "Random seed")->required();
  int cores = 0, per_patient = 0;
  auto* cores_opt = synth->add_option("--cores", cores, "Number of cores")->check(CLI::NonNegativeNumber);
  auto* per_opt = synth->add_option("--cores-per-patient", per_patient, "Cores per patient")->check(CLI::PositiveNumber);

  ExtractDoc ex;
  auto* extract_sub = app.add_subcommand("extract-patches", "Cut normalized patches from stored cores");
  add_common(extract_sub, common, false);
  std::map<std::string, CLI::Option*> ex_opts{
      {"seed", extract_sub->add_option("--seed", ex.seed, "Random seed (required with --balance)")},
      {"cores", extract_sub->add_option("--cores", ex.cores, "Core container written by synth-gen")},
      {"manifest", extract_sub->add_option("--manifest", ex.manifest, "Manifest written by synth-gen")},
      {"split", extract_sub->add_option("--split", ex.split, "all, train, val or test")},
      {"region", extract_sub->add_option("--region", ex.region, "needle or prostate")},
      {"patch", extract_sub->add_option("--patch-mm", ex.extraction.patch_mm, "Patch side in mm")},
      {"stride", extract_sub->add_option("--stride-mm", ex.extraction.stride_mm, "Window stride in mm")},
      {"size", extract_sub->add_option("--size", ex.extraction.output_size, "Output patch size in pixels")},
      {"min_involvement", extract_sub->add_option("--min-involvement", ex.min_involvement,
                                                  "Drop cancer cores below this involvement")},
      {"balance", extract_sub->add_flag("--balance", "Undersample benign cores to the cancer count")}};

  TrainDoc tr;
  std::string arch_name, loss_name, mode_name;
  std::map<std::string, CLI::Option*> tr_opts;
  auto* pre = app.add_subcommand("pretrain", "Self-supervised pretraining on unlabeled patches");
  add_common(pre, common, false);
  pre->add_option("--seed", seed, "Random seed")->required();
  tr_opts["data"] = pre->add_option("--data", tr.data, "Patch dataset");
  tr_opts["init"] = pre->add_option("--init", tr.init, "Start from this checkpoint");
  tr_opts["arch"] = pre->add_option("--arch", arch_name, "Architecture preset: tiny, full or micro");
  tr_opts["epochs"] = pre->add_option("--epochs", tr.run.epochs, "Epochs")->check(CLI::PositiveNumber);
  tr_opts["loss"] = pre->add_option("--loss", loss_name, "vicreg, simclr or byol");

  TrainDoc ft;
  std::string ft_arch;
  std::map<std::string, CLI::Option*> ft_opts;
  auto* fin = app.add_subcommand("finetune", "Supervised training on labeled needle patches");
  add_common(fin, common, false);
  fin->add_option("--seed", seed, "Random seed")->required();
  ft_opts["data"] = fin->add_option("--data", ft.data, "Labeled patch dataset");
  ft_opts["val"] = fin->add_option("--val", ft.val, "Validation patch dataset (best epoch is restored)");
  ft_opts["init"] = fin->add_option("--model", ft.init, "Pretrained checkpoint; random init when absent");
  ft_opts["arch"] = fin->add_option("--arch", ft_arch, "Architecture preset for random init");
  ft_opts["epochs"] = fin->add_option("--epochs", ft.run.epochs, "Epochs")->check(CLI::PositiveNumber);
  ft_opts["mode"] = fin->add_option("--mode", mode_name, "linear_finetune, semisup_finetune or supervised");

  EvalDoc ev;
  auto* eval = app.add_subcommand("evaluate", "Core- and patch-level metrics of a model on a patch dataset");
  add_common(eval, common, true);
  std::map<std::string, CLI::Option*> ev_opts{
      {"model", eval->add_option("--model", ev.model, "Checkpoint")},
      {"data", eval->add_option("--data", ev.data, "Needle-region patch dataset")},
      {"threshold", eval->add_option("--threshold", ev.threshold, "Patch decision threshold")},
      {"min_involvement", eval->add_option("--min-involvement", ev.min_involvement,
                                           "Ignore cancer cores below this involvement")}};

  EvalDoc hm;
  auto* heat = app.add_subcommand("heatmap", "Render prediction overlays on B-mode images");
  add_common(heat, common, true);
  std::map<std::string, CLI::Option*> hm_opts{
      {"model", heat->add_option("--model", hm.model, "Checkpoint")},
      {"cores", heat->add_option("--cores", hm.cores, "Core container")},
      {"core_ids", heat->add_option("--core-id", hm.core_ids, "Core to render (repeatable; default all)")},
      {"stride", heat->add_option("--stride-mm", hm.extraction.stride_mm, "Window stride in mm")},
      {"patch", heat->add_option("--patch-mm", hm.extraction.patch_mm, "Patch side in mm")},
      {"threshold", heat->add_option("--threshold", hm.threshold, "Patch decision threshold")}};

  auto* exp = app.add_subcommand("run-experiment", "Phantom experiment comparing training arms over repeats");
  add_common(exp, common, true);
  exp->add_option("--seed", seed, "Random seed")->required();

  auto* grad = app.add_subcommand("gradcheck", "Finite-difference checks of every differentiable component");
  grad->add_option("--seed", seed, "Random seed")->required();
  double tolerance = 1e-5, step = 1e-4;
  grad->add_option("--tolerance", tolerance, "Maximum relative error");
  grad->add_option("--step", step, "Central-difference step");
  for (auto* sub : app.get_subcommands({})) sub->usage("Usage: rfssl " + sub->get_name() + " [OPTIONS]");

  std::vector<std::string> argv_store{"rfssl"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    const auto given_ex = given_of(ex_opts);
    if (app.got_subcommand(extract_sub) && given_ex.count("balance") && !given_ex.count("seed"))
      throw CLI::RequiredError("--seed is required with --balance");
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage: " << e.what() << "\n";
    err << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(synth)) {
      return synth_gen(common, seed, cores_opt->count() ? std::optional<int>(cores) : std::nullopt,
                       per_opt->count() ? std::optional<int>(per_patient) : std::nullopt, out, log);
    }
    if (app.got_subcommand(extract_sub)) return extract(common, ex, given_of(ex_opts), out, log);
    if (app.got_subcommand(pre)) {
      tr.seed = seed;
      if (tr_opts["arch"]->count()) tr.architecture = nn::ArchitectureDescriptor::preset(arch_name);
      if (tr_opts["loss"]->count()) tr.run.loss = train::ssl_loss_from_string(loss_name);
      return pretrain_cmd(common, tr, given_of(tr_opts), out, log);
    }
    if (app.got_subcommand(fin)) {
      ft.seed = seed;
      if (ft_opts["arch"]->count()) ft.architecture = nn::ArchitectureDescriptor::preset(ft_arch);
      if (ft_opts["mode"]->count()) ft.run.mode = train::run_mode_from_string(mode_name);
      return finetune_cmd(common, ft, given_of(ft_opts), out, log);
    }
    if (app.got_subcommand(eval)) return evaluate_cmd(common, ev, given_of(ev_opts), out, log);
    if (app.got_subcommand(heat)) return heatmap_cmd(common, hm, given_of(hm_opts), out, log);
    if (app.got_subcommand(exp)) return experiment_cmd(common, seed, exp->count("--threads") > 0, out, log);
    if (app.got_subcommand(grad)) return gradcheck_cmd(seed, tolerance, step, out);
  } catch (const Error& e) {
    err << to_string(e.category()) << ": " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "internal: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace rfssl::cli
