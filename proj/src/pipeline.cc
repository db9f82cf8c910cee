// Copyright 2026 The Report Triage Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "triage/pipeline.h"

#include <fstream>
#include <memory>
#include <sstream>

#include "triage/anonymize.h"
#include "triage/hash.h"
#include "triage/hypersearch.h"
#include "triage/report.h"
#include "triage/rng.h"
#include "triage/split.h"

namespace triage {
namespace {

namespace fs = std::filesystem;

// Share of generated reports carrying a synthetic identifier.
constexpr double kDefaultPiiRate = 0.2;

std::optional<fs::path> path_from(const Json& j, const char* key,
                                  const fs::path& base_dir) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  fs::path p = it->get<std::string>();
  if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
  return p;
}

Json optional_path(const std::optional<fs::path>& p) {
  return p ? Json(p->string()) : Json(nullptr);
}

std::string compiler_id() {
#if defined(__clang__)
  return std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  return std::string("gcc ") + __VERSION__;
#else
  return "unknown";
#endif
}

// Settings that can change results; output location and thread count do not.
std::string config_hash(const PipelineConfig& cfg) {
  Json j = cfg.to_json();
  j.erase("output_dir");
  j.erase("jobs");
  return sha256_hex(j.dump());
}

struct Artifact {
  std::string path;
  std::string sha256;
  std::size_t bytes;
};

class RunState {
 public:
  explicit RunState(const PipelineConfig& cfg)
      : cfg_(cfg), hash_(config_hash(cfg)) {}

  template <typename Fn>
  void stage(const std::string& name, Fn&& fn) {
    try {
      fn();
      Json s;
      s["stage"] = name;
      s["status"] = "ok";
      stages_.push_back(std::move(s));
    } catch (const std::exception& e) {
      Json s;
      s["stage"] = name;
      s["status"] = "failed";
      s["message"] = e.what();
      stages_.push_back(std::move(s));
      if (output_ready_) {
        try {
          write_manifest(true);
        } catch (const std::exception&) {
          // The stage error is the one worth reporting.
        }
      }
      throw StageError(name, e.what());
    }
  }

  void skip(const std::string& name) {
    Json s;
    s["stage"] = name;
    s["status"] = "skipped";
    stages_.push_back(std::move(s));
  }

  void set_output_ready() { output_ready_ = true; }

  void emit(const std::string& name, const std::string& content) {
    const fs::path path = cfg_.output_dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    out.close();
    if (!out) throw Error("failed writing " + path.string());
    artifacts_.push_back({name, sha256_hex(content), content.size()});
  }

  Json write_manifest(bool partial) {
    Json m;
    m["tool"] = "report-triage";
    m["version"] = kVersion;
    m["compiler"] = compiler_id();
    m["seed"] = cfg_.seed;
    m["config_hash"] = hash_;
    m["config"] = cfg_.to_json();
    m["partial"] = partial;
    m["stages"] = stages_;
    Json arts = Json::array();
    for (const auto& a : artifacts_) {
      Json aj;
      aj["path"] = a.path;
      aj["sha256"] = a.sha256;
      aj["bytes"] = a.bytes;
      arts.push_back(std::move(aj));
    }
    m["artifacts"] = std::move(arts);
    const fs::path path = cfg_.output_dir / "manifest.json";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << m.dump(2) << '\n';
    return m;
  }

  const std::string& hash() const { return hash_; }

 private:
  const PipelineConfig& cfg_;
  std::string hash_;
  Json stages_ = Json::array();
  std::vector<Artifact> artifacts_;
  bool output_ready_ = false;
};

void require_file(const std::optional<fs::path>& p, const char* what) {
  if (p && !fs::is_regular_file(*p)) {
    throw ValidationError(std::string(what) + " not found: " + p->string());
  }
}

// Per-fold AP of a constant scorer, which equals the class's positive rate.
Json prevalence_baseline(const EvalSummary& summary) {
  Json j;
  for (std::size_t c = 0; c < summary.classes.size(); ++c) {
    std::vector<double> per_fold;
    for (const auto& f : summary.folds) {
      const auto& cm = f.classes[c];
      if (cm.positives > 0) {
        per_fold.push_back(static_cast<double>(cm.positives) /
                           static_cast<double>(cm.n));
      }
    }
    j[summary.classes[c]] = per_fold;
  }
  return j;
}

Json aggregate_json(const FoldAggregate& a) {
  Json j;
  j["mean"] = a.mean;
  j["std"] = a.std;
  return j;
}

}  // namespace

TrainConfig default_train_config(Dimension d) {
  TrainConfig cfg = reference_augmentation_config(d);
  cfg.learning_rate = 0.01;
  cfg.epochs = 20;
  return cfg;
}

TrainConfig PipelineConfig::train_config(Dimension d) const {
  const auto it = train.find(d);
  return it != train.end() ? it->second : default_train_config(d);
}

PipelineConfig PipelineConfig::from_json(const Json& j,
                                         const fs::path& base_dir) {
  if (!j.is_object()) throw ParseError("pipeline config must be an object");
  PipelineConfig cfg;
  cfg.dataset = path_from(j, "dataset", base_dir);
  cfg.corpus_spec = path_from(j, "corpus_spec", base_dir);
  cfg.taxonomy = path_from(j, "taxonomy", base_dir);
  cfg.embeddings = path_from(j, "embeddings", base_dir);
  if (auto out = path_from(j, "output_dir", base_dir)) cfg.output_dir = *out;
  cfg.seed = j.value("seed", cfg.seed);
  cfg.scrub = j.value("scrub", cfg.scrub);
  cfg.augment = j.value("augment", cfg.augment);
  cfg.k_folds = j.value("k_folds", cfg.k_folds);
  cfg.jobs = j.value("jobs", cfg.jobs);
  if (const auto it = j.find("dimensions"); it != j.end()) {
    cfg.dimensions.clear();
    for (const auto& key : *it) {
      cfg.dimensions.push_back(parse_dimension(key.get<std::string>()));
    }
  }
  if (const auto it = j.find("train"); it != j.end()) {
    // Each entry patches the dimension's defaults; "augment": null disables
    // augmentation for that dimension.
    for (const auto& [key, patch] : it->items()) {
      const Dimension d = parse_dimension(key);
      Json merged = default_train_config(d).to_json();
      merged.merge_patch(patch);
      cfg.train[d] = TrainConfig::from_json(merged);
    }
  }
  if (cfg.dimensions.empty()) {
    throw ValidationError("pipeline config selects no dimensions");
  }
  if (cfg.k_folds < 2) throw ValidationError("k_folds must be at least 2");
  return cfg;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  Json j;
  try {
    j = Json::parse(buffer.str());
  } catch (const Json::parse_error& e) {
    throw ParseError("config " + path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

Json PipelineConfig::to_json() const {
  Json j;
  j["dataset"] = optional_path(dataset);
  j["corpus_spec"] = optional_path(corpus_spec);
  j["taxonomy"] = optional_path(taxonomy);
  j["embeddings"] = optional_path(embeddings);
  j["output_dir"] = output_dir.string();
  j["seed"] = seed;
  j["scrub"] = scrub;
  j["augment"] = augment;
  j["k_folds"] = k_folds;
  Json dims = Json::array();
  for (Dimension d : dimensions) dims.push_back(dimension_key(d));
  j["dimensions"] = std::move(dims);
  Json tj = Json::object();
  for (Dimension d : dimensions) {
    tj[std::string(dimension_key(d))] = train_config(d).to_json();
  }
  j["train"] = std::move(tj);
  j["jobs"] = jobs;
  return j;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  RunState run(cfg);
  PipelineResult result;

  run.stage("prepare", [&] {
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec || !fs::is_directory(cfg.output_dir)) {
      throw Error("output directory " + cfg.output_dir.string() +
                  " is not usable");
    }
    run.set_output_ready();
  });

  std::optional<Dataset> dataset;
  run.stage("load", [&] {
    require_file(cfg.dataset, "dataset");
    require_file(cfg.corpus_spec, "corpus spec");
    require_file(cfg.taxonomy, "taxonomy");
    require_file(cfg.embeddings, "embeddings");
    const Taxonomy taxonomy =
        cfg.taxonomy ? load_taxonomy(*cfg.taxonomy) : default_taxonomy();
    if (cfg.dataset) {
      dataset = load_dataset(*cfg.dataset, taxonomy);
      return;
    }
    CorpusSpec spec;
    if (cfg.corpus_spec) {
      std::ifstream in(*cfg.corpus_spec);
      std::stringstream buffer;
      buffer << in.rdbuf();
      spec = CorpusSpec::from_json(Json::parse(buffer.str()));
    } else {
      spec = reference_corpus_spec();
      spec.pii_injection_rate = kDefaultPiiRate;
      if (cfg.taxonomy) spec.taxonomy = taxonomy;
    }
    spec.seed = derive_seed(cfg.seed, "generate");
    dataset = generate_synthetic(spec);
  });

  Json scrub_json = nullptr;
  if (cfg.scrub) {
    run.stage("scrub", [&] {
      auto scrubbed = scrub_dataset(*dataset, cfg.jobs);
      scrub_json = scrubbed.aggregate.to_json();
      dataset = std::move(scrubbed.dataset);
    });
  } else {
    run.skip("scrub");
  }

  std::unique_ptr<EncoderBackend> shared_encoder;
  if (cfg.embeddings) {
    run.stage("encode", [&] {
      shared_encoder = std::make_unique<PrecomputedEncoder>(
          PrecomputedEncoder::load(*cfg.embeddings));
    });
  }

  Json dims_json = Json::object();
  Json strat_json = Json::object();
  Json untrained_json = Json::object();
  Json prevalence_json = Json::object();
  Json configs_json = Json::object();
  Json folds_json = Json::object();

  for (Dimension d : cfg.dimensions) {
    const std::string key(dimension_key(d));
    TrainConfig tc = cfg.train_config(d);
    if (!cfg.augment) tc.augment.reset();
    tc.seed = derive_seed(cfg.seed, "train/" + key);
    if (tc.augment) tc.augment->seed = derive_seed(cfg.seed, "augment/" + key);
    configs_json[key] = tc.to_json();

    std::unique_ptr<EncoderBackend> hashing;
    const EncoderBackend* encoder = shared_encoder.get();
    if (!encoder) {
      hashing = std::make_unique<HashingEncoder>(tc.feature_dim);
      encoder = hashing.get();
    }

    DimensionView view;
    run.stage("view/" + key, [&] {
      view = dimension_view(*dataset, d);
      if (view.size() < cfg.k_folds) {
        throw ValidationError(std::to_string(view.size()) +
                              " labeled reports cannot fill " +
                              std::to_string(cfg.k_folds) + " folds");
      }
    });

    FoldAssignment folds;
    run.stage("split/" + key, [&] {
      folds = stratified_kfold(view, cfg.k_folds,
                               derive_seed(cfg.seed, "split/" + key));
      folds_json[key] = folds.to_json();
      strat_json[key] =
          verify_stratification(view, folds).to_json(view.classes);
    });

    std::vector<TrainedModel> models;
    run.stage("train/" + key, [&] {
      models = train_fold_models(view, tc, folds, *encoder);
    });

    run.stage("evaluate/" + key, [&] {
      EvalSummary summary = evaluate_dimension(models, view, folds, *encoder);
      // The same initial weights each fold's training started from.
      std::vector<TrainedModel> untrained;
      for (std::size_t f = 0; f < folds.k; ++f) {
        untrained.push_back(initial_model(
            d, view.classes, encoder->dimension(),
            derive_seed(derive_seed(tc.seed, f), "init")));
      }
      const EvalSummary base =
          evaluate_dimension(untrained, view, folds, *encoder);
      Json uj;
      uj["map"] = aggregate_json(base.map);
      uj["f_score"] = aggregate_json(base.macro_f);
      untrained_json[key] = std::move(uj);
      prevalence_json[key] = prevalence_baseline(summary);
      dims_json[key] = summary.to_json();
      result.summaries.emplace(d, std::move(summary));
    });
  }

  run.stage("emit", [&] {
    Json metrics;
    metrics["tool"] = "report-triage";
    metrics["version"] = kVersion;
    metrics["seed"] = cfg.seed;
    metrics["config_hash"] = run.hash();
    metrics["n_reports"] = dataset->size();
    metrics["scrub"] = scrub_json;
    metrics["train_configs"] = configs_json;
    metrics["stratification"] = strat_json;
    Json baselines;
    baselines["untrained"] = untrained_json;
    baselines["prevalence"] = prevalence_json;
    metrics["baselines"] = std::move(baselines);
    metrics["dimensions"] = dims_json;
    run.emit("metrics.json", metrics.dump(2) + "\n");

    std::vector<Json> summaries;
    for (Dimension d : cfg.dimensions) {
      const std::string key(dimension_key(d));
      summaries.push_back(dims_json[key]);
      run.emit("summary_" + key + ".json", dims_json[key].dump(2) + "\n");
      run.emit("folds_" + key + ".json", folds_json[key].dump(2) + "\n");
      run.emit("pr_" + key + ".svg", render_pr_svg(dims_json[key]));
    }
    run.emit("table1.csv", render_table_csv(summaries));
    result.metrics = std::move(metrics);
  });

  result.manifest = run.write_manifest(false);
  return result;
}

}  // namespace triage
