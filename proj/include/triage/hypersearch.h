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

#ifndef TRIAGE_HYPERSEARCH_H_
#define TRIAGE_HYPERSEARCH_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "triage/corpus.h"
#include "triage/eval.h"
#include "triage/json.h"
#include "triage/model.h"
#include "triage/split.h"

namespace triage {

template <typename T>
struct Range {
  T lower;
  T upper;
};

struct SearchSpace {
  Range<double> learning_rate{1e-6, 1e-4};  // log-uniform
  Range<std::size_t> epochs{10, 200};
  Range<std::size_t> batch_size_train{16, 256};
  Range<std::size_t> batch_size_test{16, 256};
  Range<double> dropout{0.1, 0.5};
  Range<double> adr{0.05, 0.9};
  Range<double> af{1.0, 10.0};
  // When false, sampled configs carry no augmentation.
  bool augment = true;
  std::size_t n_trials = 50;
  std::uint64_t seed = 0;

  // Throws ValidationError unless lower < upper everywhere and the ranges
  // stay inside each parameter's legal domain.
  void validate() const;

  static SearchSpace from_json(const Json& j);
  Json to_json() const;
};

// Deterministic per (space.seed, trial_index). Parameters not searched
// (feature_dim, seed) come from `base`. Throws ValidationError when
// trial_index >= n_trials.
TrainConfig sample_config(const SearchSpace& space, std::size_t trial_index,
                          const TrainConfig& base = {});

struct CrossValidationResult {
  FoldAssignment folds;
  std::vector<TrainedModel> models;
  EvalSummary summary;
};

// models[f] is trained on every fold except f. Fold f uses seeds derived
// from (cfg.seed, f) and (cfg.augment->seed, f); augmentation touches only
// the training part.
std::vector<TrainedModel> train_fold_models(const DimensionView& view,
                                            const TrainConfig& cfg,
                                            const FoldAssignment& folds,
                                            const EncoderBackend& encoder);

// Trains one model per fold on the other folds (augmenting only that
// training part when cfg.augment is set) and scores it on the held-out fold.
// Fold f trains with seeds derived from (cfg.seed, f).
CrossValidationResult cross_validate(const DimensionView& view,
                                     const TrainConfig& cfg,
                                     const FoldAssignment& folds,
                                     const EncoderBackend& encoder);

struct TrialRecord {
  std::size_t index = 0;
  TrainConfig config;
  bool ok = false;
  std::vector<double> fold_map;
  std::vector<double> fold_f;
  double mean_map = 0.0;
  double mean_f = 0.0;
  std::string message;  // failure diagnostic

  Json to_json() const;
  static TrialRecord from_json(const Json& j);
};

struct SearchOptions {
  std::size_t k_folds = 2;
  // Seed of the fold split shared by every trial.
  std::uint64_t split_seed = 0;
  TrainConfig base;
  // JSONL trial log, appended in trial order. Completed trials found in an
  // existing log are reused, so an interrupted search resumes.
  std::optional<std::filesystem::path> log_path;
  std::size_t jobs = 1;
};

struct SearchResult {
  std::size_t best_trial = 0;
  TrainConfig best_config;
  double best_map = 0.0;
  std::vector<TrialRecord> trials;
};

// Random search maximising fold-mean mAP; ties go to the earliest trial.
// A trial whose training fails is recorded with ok = false. Throws
// TrainingError if every trial fails.
SearchResult random_search(const DimensionView& view, const SearchSpace& space,
                           const SearchOptions& options,
                           const EncoderBackend& encoder);

}  // namespace triage

#endif  // TRIAGE_HYPERSEARCH_H_
