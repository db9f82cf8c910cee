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

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "triage/anonymize.h"
#include "triage/augment.h"
#include "triage/corpus.h"
#include "triage/error.h"
#include "triage/eval.h"
#include "triage/hypersearch.h"
#include "triage/model.h"
#include "triage/pipeline.h"
#include "triage/report.h"
#include "triage/split.h"

namespace fs = std::filesystem;
using namespace triage;

namespace {

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

// Writes to `path`, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

Taxonomy taxonomy_from(const std::string& path) {
  return path.empty() ? default_taxonomy() : load_taxonomy(path);
}

Dimension single_dimension(const std::string& key) {
  if (key == "all") {
    throw ValidationError("this command works on one dimension at a time");
  }
  return parse_dimension(key);
}

std::unique_ptr<EncoderBackend> make_encoder(const std::string& embeddings,
                                             std::size_t feature_dim) {
  if (!embeddings.empty()) {
    return std::make_unique<PrecomputedEncoder>(
        PrecomputedEncoder::load(embeddings));
  }
  return std::make_unique<HashingEncoder>(feature_dim);
}

const std::vector<std::string> kDimensionChoices = {"subject", "criminality",
                                                    "damage", "all"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilabel triage of hotline reports"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // generate
  std::string gen_spec;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  std::optional<double> gen_pii;
  auto* gen = app.add_subcommand("generate", "Write a synthetic labeled corpus");
  gen->add_option("--spec", gen_spec,
                  "Corpus spec JSON (default: reference corpus)")
      ->check(CLI::ExistingFile);
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--pii-rate", gen_pii, "Per-report PII injection rate")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--out", gen_out, "Output JSONL (default: stdout)");

  // scrub
  std::string scrub_in, scrub_out, scrub_report, scrub_tax;
  std::size_t scrub_jobs = 1;
  auto* scr = app.add_subcommand("scrub", "Replace identifiers with placeholders");
  scr->add_option("--input", scrub_in, "Input JSONL")->required()
      ->check(CLI::ExistingFile);
  scr->add_option("--out", scrub_out, "Output JSONL")->required();
  scr->add_option("--report", scrub_report,
                  "Scrub report JSON (default: stdout)");
  scr->add_option("--taxonomy", scrub_tax, "Taxonomy JSON");
  scr->add_option("--jobs", scrub_jobs, "Worker threads")
      ->check(CLI::PositiveNumber);

  // augment
  std::string aug_in, aug_out, aug_config, aug_tax, aug_dim;
  std::optional<double> aug_adr, aug_af;
  std::optional<std::uint64_t> aug_seed;
  auto* aug = app.add_subcommand("augment", "Random-word-deletion augmentation");
  aug->add_option("--input", aug_in, "Input JSONL")->required()
      ->check(CLI::ExistingFile);
  aug->add_option("--out", aug_out, "Output JSONL")->required();
  aug->add_option("--dimension", aug_dim, "Dimension")->required()
      ->check(CLI::IsMember(kDimensionChoices));
  aug->add_option("--config", aug_config, "Augment config JSON {adr, af, seed}")
      ->check(CLI::ExistingFile);
  aug->add_option("--adr", aug_adr, "Deletion rate");
  aug->add_option("--af", aug_af, "Augmentation factor");
  aug->add_option("--seed", aug_seed, "Seed");
  aug->add_option("--taxonomy", aug_tax, "Taxonomy JSON");

  // split
  std::string split_in, split_out, split_tax, split_dim;
  std::size_t split_k = 2;
  std::uint64_t split_seed = 0;
  auto* spl = app.add_subcommand("split", "Multilabel-stratified k-fold split");
  spl->add_option("--input", split_in, "Input JSONL")->required()
      ->check(CLI::ExistingFile);
  spl->add_option("--dimension", split_dim, "Dimension")->required()
      ->check(CLI::IsMember(kDimensionChoices));
  spl->add_option("--k", split_k, "Number of folds");
  spl->add_option("--seed", split_seed, "Seed");
  spl->add_option("--out", split_out, "Output JSON (default: stdout)");
  spl->add_option("--taxonomy", split_tax, "Taxonomy JSON");

  // train
  std::string train_in, train_out, train_config, train_tax, train_dim;
  std::string train_folds, train_emb;
  std::optional<std::size_t> train_fold;
  std::optional<std::uint64_t> train_seed;
  bool train_no_aug = false;
  auto* trn = app.add_subcommand("train", "Train one classifier");
  trn->add_option("--input", train_in, "Input JSONL")->required()
      ->check(CLI::ExistingFile);
  trn->add_option("--dimension", train_dim, "Dimension")->required()
      ->check(CLI::IsMember(kDimensionChoices));
  trn->add_option("--out", train_out, "Model JSON")->required();
  trn->add_option("--config", train_config,
                  "TrainConfig JSON patched onto the dimension defaults")
      ->check(CLI::ExistingFile);
  trn->add_option("--folds", train_folds, "Split JSON from `split`")
      ->check(CLI::ExistingFile);
  trn->add_option("--fold", train_fold, "Hold out this fold")->needs("--folds");
  trn->add_option("--seed", train_seed, "Seed");
  trn->add_flag("--no-augment", train_no_aug, "Disable augmentation");
  trn->add_option("--embeddings", train_emb, "Precomputed embeddings JSONL")
      ->check(CLI::ExistingFile);
  trn->add_option("--taxonomy", train_tax, "Taxonomy JSON");

  // evaluate
  std::string eval_in, eval_out = "triage_out", eval_tax, eval_dim;
  std::string eval_folds, eval_emb;
  std::vector<std::string> eval_models;
  auto* evl = app.add_subcommand(
      "evaluate", "Score per-fold models on their held-out folds");
  evl->add_option("--input", eval_in, "Input JSONL")->required()
      ->check(CLI::ExistingFile);
  evl->add_option("--dimension", eval_dim, "Dimension")->required()
      ->check(CLI::IsMember(kDimensionChoices));
  evl->add_option("--folds", eval_folds, "Split JSON from `split`")
      ->required()->check(CLI::ExistingFile);
  evl->add_option("--models", eval_models, "Model JSON per fold, in fold order")
      ->required()->check(CLI::ExistingFile);
  evl->add_option("--out", eval_out, "Output directory");
  evl->add_option("--embeddings", eval_emb, "Precomputed embeddings JSONL")
      ->check(CLI::ExistingFile);
  evl->add_option("--taxonomy", eval_tax, "Taxonomy JSON");

  // search
  std::string search_in, search_out, search_space, search_log, search_tax;
  std::string search_dim, search_base, search_emb;
  std::size_t search_k = 2, search_jobs = 1;
  std::optional<std::size_t> search_trials;
  std::optional<std::uint64_t> search_seed;
  bool search_no_aug = false;
  auto* sea = app.add_subcommand("search", "Random hyperparameter search");
  sea->add_option("--input", search_in, "Input JSONL")->required()
      ->check(CLI::ExistingFile);
  sea->add_option("--dimension", search_dim, "Dimension")->required()
      ->check(CLI::IsMember(kDimensionChoices));
  sea->add_option("--space", search_space, "SearchSpace JSON")
      ->check(CLI::ExistingFile);
  sea->add_option("--base", search_base, "Base TrainConfig JSON")
      ->check(CLI::ExistingFile);
  sea->add_option("--trials", search_trials, "Number of trials");
  sea->add_option("--k", search_k, "Number of folds");
  sea->add_option("--seed", search_seed, "Search and split seed");
  sea->add_option("--log", search_log, "Trial log JSONL (resumable)");
  sea->add_option("--out", search_out, "Best config JSON (default: stdout)");
  sea->add_option("--jobs", search_jobs, "Concurrent trials")
      ->check(CLI::PositiveNumber);
  sea->add_flag("--no-augment", search_no_aug, "Search without augmentation");
  sea->add_option("--embeddings", search_emb, "Precomputed embeddings JSONL")
      ->check(CLI::ExistingFile);
  sea->add_option("--taxonomy", search_tax, "Taxonomy JSON");

  // run
  std::string run_config, run_out, run_dim;
  std::optional<std::uint64_t> run_seed;
  std::optional<std::size_t> run_jobs;
  bool run_no_scrub = false, run_no_aug = false;
  auto* run = app.add_subcommand("run", "Full pipeline");
  run->add_option("--config", run_config, "Pipeline config JSON");
  run->add_option("--seed", run_seed, "Global seed");
  run->add_option("--out", run_out, "Output directory");
  run->add_option("--dimension", run_dim, "Dimension or `all`")
      ->check(CLI::IsMember(kDimensionChoices));
  run->add_flag("--no-scrub", run_no_scrub, "Skip identifier scrubbing");
  run->add_flag("--no-augment", run_no_aug, "Skip augmentation");
  run->add_option("--jobs", run_jobs, "Worker threads")
      ->check(CLI::PositiveNumber);

  // report
  std::string report_metrics, report_out = ".";
  auto* rep = app.add_subcommand("report", "Render SVG and CSV from metrics");
  rep->add_option("--metrics", report_metrics, "metrics.json")->required()
      ->check(CLI::ExistingFile);
  rep->add_option("--out", report_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      CorpusSpec spec = gen_spec.empty()
                            ? reference_corpus_spec()
                            : CorpusSpec::from_json(read_json(gen_spec));
      spec.seed = gen_seed;
      if (gen_pii) spec.pii_injection_rate = *gen_pii;
      emit(gen_out, dataset_to_jsonl(generate_synthetic(spec)));
    } else if (*scr) {
      const Dataset ds = load_dataset(scrub_in, taxonomy_from(scrub_tax));
      const auto result = scrub_dataset(ds, scrub_jobs);
      write_text(scrub_out, dataset_to_jsonl(result.dataset));
      emit(scrub_report, result.aggregate.to_json().dump(2) + "\n");
    } else if (*aug) {
      const Dataset ds = load_dataset(aug_in, taxonomy_from(aug_tax));
      AugmentConfig cfg = aug_config.empty()
                              ? AugmentConfig{}
                              : AugmentConfig::from_json(read_json(aug_config));
      if (aug_adr) cfg.adr = *aug_adr;
      if (aug_af) cfg.af = *aug_af;
      if (aug_seed) cfg.seed = *aug_seed;
      cfg.validate();
      const auto view = dimension_view(ds, single_dimension(aug_dim));
      write_text(aug_out, view_to_jsonl(augment_dataset(view, cfg)));
    } else if (*spl) {
      const Dataset ds = load_dataset(split_in, taxonomy_from(split_tax));
      const auto view = dimension_view(ds, single_dimension(split_dim));
      const auto folds = stratified_kfold(view, split_k, split_seed);
      Json out = folds.to_json();
      out["stratification"] =
          verify_stratification(view, folds).to_json(view.classes);
      emit(split_out, out.dump(2) + "\n");
    } else if (*trn) {
      const Dimension d = single_dimension(train_dim);
      const Dataset ds = load_dataset(train_in, taxonomy_from(train_tax));
      DimensionView view = dimension_view(ds, d);
      Json merged = default_train_config(d).to_json();
      if (!train_config.empty()) merged.merge_patch(read_json(train_config));
      TrainConfig cfg = TrainConfig::from_json(merged);
      if (train_seed) {
        cfg.seed = *train_seed;
        if (cfg.augment) cfg.augment->seed = *train_seed;
      }
      if (train_no_aug) cfg.augment.reset();
      if (!train_folds.empty()) {
        const auto folds = FoldAssignment::from_json(read_json(train_folds));
        if (!train_fold) throw ValidationError("--folds needs --fold");
        if (*train_fold >= folds.k) {
          throw ValidationError("--fold must be below k");
        }
        view = view.subset(folds.rows_outside_fold(view, *train_fold));
      }
      const auto encoder = make_encoder(train_emb, cfg.feature_dim);
      train(view, cfg, *encoder).save(train_out);
    } else if (*evl) {
      const Dimension d = single_dimension(eval_dim);
      const Dataset ds = load_dataset(eval_in, taxonomy_from(eval_tax));
      const auto view = dimension_view(ds, d);
      const auto folds = FoldAssignment::from_json(read_json(eval_folds));
      std::vector<TrainedModel> models;
      for (const auto& path : eval_models) {
        models.push_back(TrainedModel::load(path));
      }
      const auto encoder =
          make_encoder(eval_emb, models.empty() ? 0 : models[0].feature_dim);
      const EvalSummary summary =
          evaluate_dimension(models, view, folds, *encoder);
      const Json sj = summary.to_json();
      const std::string key(dimension_key(d));
      Json metrics;
      metrics["dimensions"][key] = sj;
      const fs::path out(eval_out);
      write_text(out / "metrics.json", metrics.dump(2) + "\n");
      write_text(out / "table1.csv", render_table_csv({sj}));
      write_text(out / ("pr_" + key + ".svg"), render_pr_svg(sj));
      for (const auto& w : summary.warnings) std::cerr << "warning: " << w << '\n';
    } else if (*sea) {
      const Dimension d = single_dimension(search_dim);
      const Dataset ds = load_dataset(search_in, taxonomy_from(search_tax));
      const auto view = dimension_view(ds, d);
      SearchSpace space = search_space.empty()
                              ? SearchSpace{}
                              : SearchSpace::from_json(read_json(search_space));
      if (search_trials) space.n_trials = *search_trials;
      if (search_seed) space.seed = *search_seed;
      if (search_no_aug) space.augment = false;
      space.validate();
      SearchOptions options;
      options.k_folds = search_k;
      options.split_seed = space.seed;
      options.jobs = search_jobs;
      if (!search_base.empty()) {
        options.base = TrainConfig::from_json(read_json(search_base));
      }
      if (!search_log.empty()) options.log_path = search_log;
      const auto encoder = make_encoder(search_emb, options.base.feature_dim);
      const auto result = random_search(view, space, options, *encoder);
      Json out;
      out["best_trial"] = result.best_trial;
      out["best_map"] = result.best_map;
      out["config"] = result.best_config.to_json();
      emit(search_out, out.dump(2) + "\n");
    } else if (*run) {
      PipelineConfig cfg = run_config.empty()
                               ? PipelineConfig{}
                               : PipelineConfig::load(run_config);
      if (run_seed) cfg.seed = *run_seed;
      if (!run_out.empty()) cfg.output_dir = run_out;
      if (!run_dim.empty()) {
        cfg.dimensions = run_dim == "all"
                             ? std::vector<Dimension>(kAllDimensions.begin(),
                                                      kAllDimensions.end())
                             : std::vector<Dimension>{parse_dimension(run_dim)};
      }
      if (run_no_scrub) cfg.scrub = false;
      if (run_no_aug) cfg.augment = false;
      if (run_jobs) cfg.jobs = *run_jobs;
      const auto result = run_pipeline(cfg);
      for (const auto& [d, s] : result.summaries) {
        std::cout << dimension_title(d) << ": mAP " << s.map.mean << " +- "
                  << s.map.std << ", F " << s.macro_f.mean << " +- "
                  << s.macro_f.std << '\n';
        for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
      }
      std::cout << "wrote " << cfg.output_dir.string() << '\n';
    } else if (*rep) {
      const Json metrics = read_json(report_metrics);
      const auto it = metrics.find("dimensions");
      if (it == metrics.end() || !it->is_object()) {
        throw ParseError(report_metrics + ": no \"dimensions\" object");
      }
      std::vector<Json> summaries;
      const fs::path out(report_out);
      for (const auto& [key, sj] : it->items()) {
        summaries.push_back(sj);
        write_text(out / ("pr_" + key + ".svg"), render_pr_svg(sj));
      }
      write_text(out / "table1.csv", render_table_csv(summaries));
    }
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
