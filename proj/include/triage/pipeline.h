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

#ifndef TRIAGE_PIPELINE_H_
#define TRIAGE_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "triage/corpus.h"
#include "triage/error.h"
#include "triage/eval.h"
#include "triage/json.h"
#include "triage/model.h"

namespace triage {

inline constexpr const char* kVersion = "0.1.0";

// Failure inside one pipeline stage ("load", "scrub", "split", ...).
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message)
      : Error("stage '" + stage + "': " + message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Per-dimension training defaults for the end-to-end run: a learning rate
// and epoch budget suited to the native hashed-feature classifier, with the
// reported best augmentation rates (ADR, AF) for that dimension.
TrainConfig default_train_config(Dimension d);

struct PipelineConfig {
  // JSONL reports. When unset, a synthetic corpus is generated from
  // `corpus_spec`, or from the reference corpus spec with 20% of reports
  // carrying a synthetic identifier.
  std::optional<std::filesystem::path> dataset;
  std::optional<std::filesystem::path> corpus_spec;
  std::optional<std::filesystem::path> taxonomy;
  // Precomputed embeddings (id -> vector) replacing the hashing encoder.
  std::optional<std::filesystem::path> embeddings;
  std::filesystem::path output_dir = "triage_out";
  std::uint64_t seed = 2023;
  bool scrub = true;
  bool augment = true;
  std::size_t k_folds = 2;
  std::vector<Dimension> dimensions{kAllDimensions.begin(),
                                    kAllDimensions.end()};
  // Missing dimensions fall back to default_train_config().
  std::map<Dimension, TrainConfig> train;
  std::size_t jobs = 1;

  TrainConfig train_config(Dimension d) const;

  // Relative paths are resolved against `base_dir`.
  static PipelineConfig from_json(const Json& j,
                                  const std::filesystem::path& base_dir = {});
  static PipelineConfig load(const std::filesystem::path& path);
  Json to_json() const;
};

struct PipelineResult {
  std::map<Dimension, EvalSummary> summaries;
  Json metrics;
  Json manifest;
};

// load/generate -> scrub -> per-dimension view -> stratified split ->
// train (augmenting training folds) -> predict -> evaluate, then writes
// metrics.json, table1.csv, pr_<dimension>.svg, summary_<dimension>.json,
// folds_<dimension>.json and manifest.json into cfg.output_dir. All randomness derives from cfg.seed through named
// per-stage streams. Throws StageError naming the failing stage; a manifest
// flagged "partial" is still written when the output directory is usable.
PipelineResult run_pipeline(const PipelineConfig& cfg);

}  // namespace triage

#endif  // TRIAGE_PIPELINE_H_
