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

#include "rfssl/train/experiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>

#include "rfssl/core/parallel.hpp"
#include "rfssl/nn/checkpoint.hpp"
#include "rfssl/signal/analytic.hpp"
#include "rfssl/train/heatmap.hpp"
#include "rfssl/train/report.hpp"

namespace rfssl::train {

using nlohmann::json;

namespace {

constexpr ArmKind kArmKinds[] = {ArmKind::ssl_linear, ArmKind::ssl_semisup, ArmKind::sl_scratch,
                                 ArmKind::random_linear, ArmKind::summary_oracle};

json summarize(const std::vector<double>& values) {
  if (values.empty()) return {{"mean", nullptr}, {"std", nullptr}, {"n", 0}};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double sd = values.size() > 1 ? std::sqrt(var / static_cast<double>(values.size() - 1)) : 0.0;
  return {{"mean", mean}, {"std", sd}, {"n", values.size()}};
}

template <class T>
void shuffle_in_place(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i - 1)))]);
}

// Two-feature logistic regression fitted by Newton's method on standardized
// features, with a small ridge term for separable data.
class SummaryOracle {
 public:
  void fit(const std::vector<std::pair<double, double>>& x, const std::vector<int>& y) {
    const auto n = static_cast<double>(x.size());
    for (const auto& [a, b] : x) {
      mean_[0] += a / n;
      mean_[1] += b / n;
    }
    for (const auto& [a, b] : x) {
      scale_[0] += (a - mean_[0]) * (a - mean_[0]) / n;
      scale_[1] += (b - mean_[1]) * (b - mean_[1]) / n;
    }
    for (double& s : scale_) s = s > 0.0 ? std::sqrt(s) : 1.0;
    constexpr double kRidge = 1e-3;
    for (int iter = 0; iter < 50; ++iter) {
      double g[3] = {0, 0, 0};
      double h[3][3] = {{kRidge, 0, 0}, {0, kRidge, 0}, {0, 0, kRidge}};
      for (std::size_t i = 0; i < x.size(); ++i) {
        const auto f = features(x[i]);
        const double p = sigmoid(dot(f));
        for (int a = 0; a < 3; ++a) {
          g[a] += (p - y[i]) * f[static_cast<std::size_t>(a)] + kRidge * w_[a];
          for (int b = 0; b < 3; ++b) h[a][b] += p * (1 - p) * f[static_cast<std::size_t>(a)] * f[static_cast<std::size_t>(b)];
        }
      }
      double step[3];
      solve3(h, g, step);
      for (int a = 0; a < 3; ++a) w_[a] -= step[a];
    }
  }
  double probability(const std::pair<double, double>& x) const { return sigmoid(dot(features(x))); }

 private:
  std::array<double, 3> features(const std::pair<double, double>& x) const {
    return {(x.first - mean_[0]) / scale_[0], (x.second - mean_[1]) / scale_[1], 1.0};
  }
  double dot(const std::array<double, 3>& f) const { return w_[0] * f[0] + w_[1] * f[1] + w_[2] * f[2]; }
  static double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }
  static void solve3(double a[3][3], const double b[3], double x[3]) {
    double m[3][4];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) m[i][j] = a[i][j];
      m[i][3] = b[i];
    }
    for (int c = 0; c < 3; ++c) {
      int piv = c;
      for (int r = c + 1; r < 3; ++r)
        if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
      std::swap(m[c], m[piv]);
      for (int r = 0; r < 3; ++r) {
        if (r == c) continue;
        const double f = m[r][c] / m[c][c];
        for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
      }
    }
    for (int i = 0; i < 3; ++i) x[i] = m[i][3] / m[i][i];
  }

  double mean_[2] = {0, 0};
  double scale_[2] = {0, 0};
  double w_[3] = {0, 0, 0};
};

struct RepeatData {
  Corpus corpus;
  std::vector<signal::Patch> unlabeled;
  std::vector<signal::Patch> labeled;
  std::vector<EvalCore> val;
  std::vector<EvalCore> test;
  std::vector<std::vector<data::Window>> test_windows;
};

PatchRefs refs_of(const std::vector<signal::Patch>& patches) {
  PatchRefs r;
  for (const auto& p : patches) r.push_back(&p);
  return r;
}

double validation_auroc(const std::vector<CorePrediction>& preds, double min_involvement) {
  try {
    return compute_metrics(preds, MetricLevel::core, min_involvement).auroc;
  } catch (const InvalidArgument&) {
    return std::nan("");
  }
}

class Runner {
 public:
  Runner(const ExperimentConfig& config, std::filesystem::path out, Logger log)
      : config_(config), out_(std::move(out)), log_(std::move(log)) {}

  json run() {
    std::filesystem::create_directories(out_ / "curves");
    std::filesystem::create_directories(out_ / "involvement");
    std::filesystem::create_directories(out_ / "heatmaps");
    std::vector<json> arm_runs(config_.arms.size(), json::array());
    json corpora = json::array();
    for (int r = 0; r < config_.repeats; ++r) {
      const std::uint64_t seed = repeat_seed(config_.seed, r);
      say("repeat " + std::to_string(r) + ": building phantom corpus");
      RepeatData d = prepare(seed);
      corpora.push_back({{"repeat", r},
                         {"seed", seed},
                         {"cores", d.corpus.cores.size()},
                         {"train_patients", d.corpus.split.train_patients.size()},
                         {"val_patients", d.corpus.split.val_patients.size()},
                         {"test_patients", d.corpus.split.test_patients.size()},
                         {"unlabeled_patches", d.unlabeled.size()},
                         {"labeled_patches", d.labeled.size()},
                         {"val_cores", d.val.size()},
                         {"test_cores", d.test.size()}});
      pretrained_.clear();
      for (std::size_t a = 0; a < config_.arms.size(); ++a) arm_runs[a].push_back(run_arm(config_.arms[a], r, seed, d));
    }
    json report{{"schema_version", kReportSchemaVersion}, {"config", to_json(config_)}, {"corpus", corpora}};
    report["arms"] = json::array();
    for (std::size_t a = 0; a < config_.arms.size(); ++a) {
      const auto& arm = config_.arms[a];
      json entry{{"name", arm.name}, {"kind", to_string(arm.kind)}, {"loss", to_string(arm.loss)}, {"runs", arm_runs[a]}};
      int failed = 0;
      json summary;
      for (const char* level : {"core", "patch"})
        for (const char* metric : {"auroc", "avg_precision", "balanced_accuracy"}) {
          std::vector<double> values;
          for (const auto& run : arm_runs[a])
            if (run.at("status") == "ok") values.push_back(run.at(level).at(metric).get<double>());
          summary[level][metric] = summarize(values);
        }
      for (const auto& run : arm_runs[a]) failed += run.at("status") != "ok";
      entry["summary"] = summary;
      entry["failed_runs"] = failed;
      report["arms"].push_back(entry);
    }
    write_text(out_ / "report.json", report.dump(2) + "\n");
    return report;
  }

 private:
  void say(const std::string& msg) const {
    if (log_) log_(msg);
  }

  RepeatData prepare(std::uint64_t seed) {
    RepeatData d;
    d.corpus = build_corpus(config_, seed);
    const auto& c = config_.corpus;
    const auto& cores = d.corpus.cores;
    const auto materialize = [&](const std::vector<WindowRef>& refs) {
      std::vector<signal::Patch> out(refs.size());
      parallel_for(refs.size(), config_.threads, [&](std::size_t i) {
        out[i] = data::make_patch(cores[refs[i].core].frame, refs[i].window, c.patch_size);
      });
      return out;
    };
    d.unlabeled = materialize(d.corpus.unlabeled);
    d.labeled = materialize(d.corpus.labeled);
    const auto eval_cfg = c.extraction(c.eval_stride_mm);
    const auto eval_cores = [&](const std::vector<std::size_t>& idx) {
      std::vector<EvalCore> out(idx.size());
      parallel_for(idx.size(), config_.threads,
                   [&](std::size_t i) { out[i] = make_eval_core(cores[idx[i]], eval_cfg); });
      return out;
    };
    d.val = eval_cores(d.corpus.val_cores);
    d.test = eval_cores(d.corpus.test_cores);
    return d;
  }

  nn::ModelState fresh_model(std::uint64_t seed) const {
    Rng init = Rng::substream(seed, "init");
    return nn::make_model(config_.architecture, init);
  }

  struct Pretrained {
    nn::ModelState model;
    std::vector<double> curve;
    double embedding_std = 0.0;
  };

  const Pretrained& pretrained(SslLoss loss, int repeat, std::uint64_t seed, const RepeatData& d) {
    auto it = pretrained_.find(loss);
    if (it != pretrained_.end()) return it->second;
    TrainRun run = config_.pretrain;
    run.mode = RunMode::pretrain;
    run.loss = loss;
    run.seed = Rng::substream(seed, "pretrain." + to_string(loss)).next_u64();
    Pretrained p{fresh_model(seed), {}, 0.0};
    say("repeat " + std::to_string(repeat) + ": pretraining " + to_string(loss) + " on " +
        std::to_string(d.unlabeled.size()) + " patches");
    const auto refs = refs_of(d.unlabeled);
    p.curve = train::pretrain(run, refs, p.model, [&](int epoch, double l) {
      say("  " + to_string(loss) + " epoch " + std::to_string(epoch) + " loss " + format_double(l));
    }).loss_curve;
    p.embedding_std = mean_embedding_std(p.model, refs);
    write_curve(out_ / "curves" / ("pretrain_" + to_string(loss) + "_r" + std::to_string(repeat) + ".csv"), p.curve, {});
    return pretrained_.emplace(loss, std::move(p)).first->second;
  }

  Validator make_validator(const nn::ModelState& model, bool linear, const RepeatData& d) {
    if (!linear)
      return [this, &d](const nn::ModelState& m) {
        return validation_auroc(predict_cores(m, d.val, config_.threads), config_.corpus.min_involvement);
      };
    auto features = std::make_shared<std::vector<nn::Tensor>>(d.val.size());
    parallel_for(d.val.size(), config_.threads,
                 [&](std::size_t i) { (*features)[i] = infer_features(model, refs_of(d.val[i].patches)); });
    return [this, features, &d](const nn::ModelState& m) {
      std::vector<CorePrediction> preds;
      for (std::size_t i = 0; i < d.val.size(); ++i)
        preds.push_back(make_core_prediction(d.val[i].info.core_id, classify_features(m, (*features)[i]),
                                             d.val[i].info.label, d.val[i].info.involvement_percent));
      return validation_auroc(preds, config_.corpus.min_involvement);
    };
  }

  json run_arm(const ArmConfig& arm, int repeat, std::uint64_t seed, const RepeatData& d) {
    json result{{"repeat", repeat}, {"seed", seed}};
    const std::string tag = arm.name + "_r" + std::to_string(repeat);
    try {
      std::vector<CorePrediction> preds;
      std::optional<nn::ModelState> model;
      if (arm.kind == ArmKind::summary_oracle) {
        preds = oracle_predictions(d);
      } else {
        const bool ssl = arm.kind == ArmKind::ssl_linear || arm.kind == ArmKind::ssl_semisup;
        const bool linear = arm.kind == ArmKind::ssl_linear || arm.kind == ArmKind::random_linear;
        if (ssl) {
          const Pretrained& p = pretrained(arm.loss, repeat, seed, d);
          model = p.model;
          result["pretrain_final_loss"] = p.curve.back();
          result["embedding_std"] = p.embedding_std;
        } else {
          model = fresh_model(seed);
        }
        TrainRun run = linear ? config_.linear_probe : config_.finetune;
        run.mode = linear ? RunMode::linear_finetune
                          : (arm.kind == ArmKind::sl_scratch ? RunMode::supervised : RunMode::semisup_finetune);
        run.seed = Rng::substream(seed, "finetune." + arm.name).next_u64();
        model->freeze = freeze_for(run.mode);
        say("repeat " + std::to_string(repeat) + ": " + arm.name + " (" + to_string(run.mode) + ")");
        LabeledSet train{refs_of(d.labeled), d.corpus.labeled_classes};
        const auto ft = finetune(run, train, *model, make_validator(*model, linear, d));
        write_curve(out_ / "curves" / (tag + ".csv"), ft.train_loss, ft.val_auroc);
        result["best_epoch"] = ft.best_epoch;
        preds = predict_cores(*model, d.test, config_.threads);
      }
      const auto core = compute_metrics(preds, MetricLevel::core, config_.corpus.min_involvement);
      const auto patch = compute_metrics(preds, MetricLevel::patch, config_.corpus.min_involvement);
      result["status"] = "ok";
      result["core"] = metrics_json(core);
      result["patch"] = metrics_json(patch);
      result["empty_test_cores"] = std::count_if(preds.begin(), preds.end(), [](const auto& p) { return p.empty(); });
      say("  " + arm.name + " core AUROC " + format_double(core.auroc) + ", patch AUROC " + format_double(patch.auroc));

      std::string scatter = "core_id,true_involvement,predicted_involvement\n";
      for (const auto& p : preds)
        if (!p.empty())
          scatter += p.core_id + "," + format_double(p.involvement_percent / 100.0) + "," +
                     format_double(predicted_involvement(p)) + "\n";
      write_text(out_ / "involvement" / (tag + ".csv"), scatter);

      if (model && repeat == 0) {
        const auto cfg = config_.corpus.extraction(config_.corpus.eval_stride_mm);
        const auto n = std::min<std::size_t>(static_cast<std::size_t>(config_.heatmaps), d.corpus.test_cores.size());
        for (std::size_t i = 0; i < n; ++i) {
          const auto& core_data = d.corpus.cores[d.corpus.test_cores[i]];
          const auto h = render_heatmap(*model, core_data, cfg);
          if (h.overlay_pixels == 0) say("  warning: core " + core_data.info.core_id + " has no overlay region");
          write_ppm(h.image, out_ / "heatmaps" / (arm.name + "_" + core_data.info.core_id + ".ppm"));
        }
      }
    } catch (const Error& e) {
      result["status"] = "failed";
      result["error"] = std::string(to_string(e.category())) + ": " + e.what();
      say("  " + arm.name + " failed: " + result["error"].get<std::string>());
    }
    return result;
  }

  std::vector<CorePrediction> oracle_predictions(const RepeatData& d) const {
    const auto& corpus = d.corpus;
    std::vector<std::pair<double, double>> x;
    for (const auto& ref : corpus.labeled) x.push_back(envelope_summary(corpus.cores[ref.core].frame, ref.window));
    SummaryOracle oracle;
    oracle.fit(x, corpus.labeled_classes);
    const auto cfg = config_.corpus.extraction(config_.corpus.eval_stride_mm);
    std::vector<CorePrediction> preds(corpus.test_cores.size());
    parallel_for(preds.size(), config_.threads, [&](std::size_t i) {
      const auto& core = corpus.cores[corpus.test_cores[i]];
      std::vector<double> probs;
      for (const auto& w : data::qualifying_windows(core, data::Region::needle, cfg))
        probs.push_back(oracle.probability(envelope_summary(core.frame, w)));
      preds[i] = make_core_prediction(core.info.core_id, std::move(probs), core.info.label, core.info.involvement_percent);
    });
    return preds;
  }

  const ExperimentConfig& config_;
  std::filesystem::path out_;
  Logger log_;
  std::map<SslLoss, Pretrained> pretrained_;
};

}  // namespace

std::string to_string(ArmKind kind) {
  switch (kind) {
    case ArmKind::ssl_linear: return "ssl_linear";
    case ArmKind::ssl_semisup: return "ssl_semisup";
    case ArmKind::sl_scratch: return "sl_scratch";
    case ArmKind::random_linear: return "random_linear";
    case ArmKind::summary_oracle: return "summary_oracle";
  }
  return "unknown";
}

ArmKind arm_kind_from_string(const std::string& name) {
  for (ArmKind k : kArmKinds)
    if (to_string(k) == name) return k;
  throw ConfigError("unknown arm kind '" + name + "'");
}

data::ExtractionConfig CorpusConfig::extraction(double stride_mm) const {
  data::ExtractionConfig e;
  e.patch_mm = patch_mm;
  e.stride_mm = stride_mm;
  e.needle_overlap_min = needle_overlap_min;
  e.prostate_overlap_min = prostate_overlap_min;
  e.output_size = patch_size;
  return e;
}

void CorpusConfig::validate() const {
  if (cores < 4) throw ConfigError("corpus: need at least 4 cores");
  if (cores_per_patient < 1) throw ConfigError("corpus: cores_per_patient must be at least 1");
  if (unlabeled_patches < 2) throw ConfigError("corpus: unlabeled_patches must be at least 2");
  if (labeled_patches < 2) throw ConfigError("corpus: labeled_patches must be at least 2");
  extraction(train_stride_mm).validate();
  extraction(eval_stride_mm).validate();
  data::SplitConfig{test_cancer_fraction, validation_fraction}.validate();
  if (!(min_involvement >= 0.0 && min_involvement <= 100.0))
    throw ConfigError("corpus: min_involvement must lie in [0, 100]");
}

void ExperimentConfig::validate() const {
  if (repeats < 1) throw ConfigError("experiment: repeats must be at least 1");
  if (threads < 1) throw ConfigError("experiment: threads must be at least 1");
  if (heatmaps < 0) throw ConfigError("experiment: heatmaps must be non-negative");
  architecture.validate();
  if (architecture.input_size != corpus.patch_size)
    throw ConfigError("experiment: corpus.patch_size must equal the architecture input size");
  phantom.validate();
  corpus.validate();
  pretrain.validate();
  linear_probe.validate();
  finetune.validate();
  if (arms.empty()) throw ConfigError("experiment: no arms configured");
  std::set<std::string> names;
  for (const auto& a : arms) {
    if (a.name.empty()) throw ConfigError("experiment: arm without a name");
    if (!names.insert(a.name).second) throw ConfigError("experiment: duplicate arm name '" + a.name + "'");
  }
}

json to_json(const ExperimentConfig& c) {
  json arms = json::array();
  for (const auto& a : c.arms) arms.push_back({{"name", a.name}, {"kind", to_string(a.kind)}, {"loss", to_string(a.loss)}});
  const auto& k = c.corpus;
  return {{"seed", c.seed},
          {"repeats", c.repeats},
          {"threads", c.threads},
          {"architecture", nn::to_json(c.architecture)},
          {"phantom", to_json(c.phantom)},
          {"corpus",
           {{"cores", k.cores},
            {"cores_per_patient", k.cores_per_patient},
            {"unlabeled_patches", k.unlabeled_patches},
            {"labeled_patches", k.labeled_patches},
            {"patch_mm", k.patch_mm},
            {"patch_size", k.patch_size},
            {"train_stride_mm", k.train_stride_mm},
            {"eval_stride_mm", k.eval_stride_mm},
            {"needle_overlap_min", k.needle_overlap_min},
            {"prostate_overlap_min", k.prostate_overlap_min},
            {"test_cancer_fraction", k.test_cancer_fraction},
            {"validation_fraction", k.validation_fraction},
            {"min_involvement", k.min_involvement}}},
          {"pretrain", to_json(c.pretrain)},
          {"linear_probe", to_json(c.linear_probe)},
          {"finetune", to_json(c.finetune)},
          {"arms", arms},
          {"heatmaps", c.heatmaps}};
}

ExperimentConfig experiment_from_json(const json& j) {
  ExperimentConfig c;
  JsonReader r(j, "experiment");
  r.get("seed", c.seed);
  r.get("repeats", c.repeats);
  r.get("threads", c.threads);
  if (r.has("architecture")) c.architecture = nn::architecture_from_json(r.at("architecture"));
  if (r.has("phantom")) c.phantom = phantom_from_json(r.at("phantom"), c.phantom);
  if (r.has("corpus")) {
    JsonReader k(r.at("corpus"), "corpus");
    auto& o = c.corpus;
    k.get("cores", o.cores);
    k.get("cores_per_patient", o.cores_per_patient);
    k.get("unlabeled_patches", o.unlabeled_patches);
    k.get("labeled_patches", o.labeled_patches);
    k.get("patch_mm", o.patch_mm);
    k.get("patch_size", o.patch_size);
    k.get("train_stride_mm", o.train_stride_mm);
    k.get("eval_stride_mm", o.eval_stride_mm);
    k.get("needle_overlap_min", o.needle_overlap_min);
    k.get("prostate_overlap_min", o.prostate_overlap_min);
    k.get("test_cancer_fraction", o.test_cancer_fraction);
    k.get("validation_fraction", o.validation_fraction);
    k.get("min_involvement", o.min_involvement);
    k.finish();
  }
  if (r.has("pretrain")) c.pretrain = train_run_from_json(r.at("pretrain"), c.pretrain);
  if (r.has("linear_probe")) c.linear_probe = train_run_from_json(r.at("linear_probe"), c.linear_probe);
  if (r.has("finetune")) c.finetune = train_run_from_json(r.at("finetune"), c.finetune);
  if (r.has("arms")) {
    for (const auto& aj : r.at("arms")) {
      JsonReader a(aj, "arms[]");
      ArmConfig arm;
      std::string text;
      a.get("name", arm.name);
      if (a.has("kind")) {
        a.get("kind", text);
        arm.kind = arm_kind_from_string(text);
      }
      if (a.has("loss")) {
        a.get("loss", text);
        arm.loss = ssl_loss_from_string(text);
      }
      a.finish();
      c.arms.push_back(arm);
    }
  }
  r.get("heatmaps", c.heatmaps);
  r.finish();
  c.validate();
  return c;
}

std::uint64_t repeat_seed(std::uint64_t seed, int repeat) {
  return Rng::substream(seed, "repeat" + std::to_string(repeat)).next_u64();
}

Corpus build_corpus(const ExperimentConfig& config, std::uint64_t seed) {
  const auto& c = config.corpus;
  Corpus out;
  out.cores = data::generate_phantom_corpus(config.phantom, c.cores, c.cores_per_patient,
                                            Rng::substream(seed, "data").next_u64(), config.threads);
  const auto infos = data::core_infos(out.cores);
  out.split = data::split_patients(infos, {c.test_cancer_fraction, c.validation_fraction}, seed);

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < out.cores.size(); ++i) index[out.cores[i].info.core_id] = i;
  const auto indices_of = [&](const std::vector<std::string>& patients) {
    std::vector<std::size_t> idx;
    for (const auto& info : data::cores_of(infos, patients)) idx.push_back(index.at(info.core_id));
    return idx;
  };
  const auto train_idx = indices_of(out.split.train_patients);
  out.val_cores = indices_of(out.split.val_patients);
  out.test_cores = indices_of(out.split.test_patients);

  const auto train_cfg = c.extraction(c.train_stride_mm);
  std::vector<std::vector<data::Window>> prostate(train_idx.size()), needle(train_idx.size());
  parallel_for(train_idx.size(), config.threads, [&](std::size_t i) {
    prostate[i] = data::qualifying_windows(out.cores[train_idx[i]], data::Region::prostate, train_cfg);
    needle[i] = data::qualifying_windows(out.cores[train_idx[i]], data::Region::needle, train_cfg);
  });

  std::vector<WindowRef> pool;
  for (std::size_t i = 0; i < train_idx.size(); ++i)
    for (const auto& w : prostate[i]) pool.push_back({train_idx[i], w});
  Rng unlabeled_rng = Rng::substream(seed, "unlabeled");
  shuffle_in_place(pool, unlabeled_rng);
  if (pool.size() > static_cast<std::size_t>(c.unlabeled_patches)) pool.resize(static_cast<std::size_t>(c.unlabeled_patches));
  out.unlabeled = std::move(pool);

  std::vector<data::CoreInfo> train_infos;
  for (std::size_t i : train_idx) train_infos.push_back(out.cores[i].info);
  std::set<std::string> kept;
  for (const auto& info : data::balance_and_filter(train_infos, c.min_involvement, true, seed)) kept.insert(info.core_id);
  std::vector<WindowRef> by_class[2];
  for (std::size_t i = 0; i < train_idx.size(); ++i) {
    const auto& info = out.cores[train_idx[i]].info;
    if (!kept.count(info.core_id)) continue;
    for (const auto& w : needle[i]) by_class[info.label].push_back({train_idx[i], w});
  }
  Rng labeled_rng = Rng::substream(seed, "labeled");
  const std::size_t per_class = std::min({static_cast<std::size_t>(c.labeled_patches / 2), by_class[0].size(), by_class[1].size()});
  for (int cls = 0; cls < 2; ++cls) {
    shuffle_in_place(by_class[cls], labeled_rng);
    for (std::size_t i = 0; i < per_class; ++i) {
      out.labeled.push_back(by_class[cls][i]);
      out.labeled_classes.push_back(cls);
    }
  }
  return out;
}

std::pair<double, double> envelope_summary(const data::RfFrame& frame, const data::Window& w) {
  double sum = 0.0, sum_sq = 0.0;
  std::vector<double> line(static_cast<std::size_t>(w.axial_size));
  for (int c = 0; c < w.lateral_size; ++c) {
    for (int r = 0; r < w.axial_size; ++r) line[static_cast<std::size_t>(r)] = frame.samples(w.axial_start + r, w.lateral_start + c);
    for (double e : signal::envelope(line)) {
      sum += e;
      sum_sq += e * e;
    }
  }
  const double n = static_cast<double>(w.axial_size) * w.lateral_size;
  const double mean = sum / n;
  return {mean, std::sqrt(std::max(0.0, sum_sq / n - mean * mean))};
}

json run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir, const Logger& log) {
  config.validate();
  return Runner(config, out_dir, log).run();
}

}  // namespace rfssl::train
