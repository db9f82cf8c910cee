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

#ifndef TRIAGE_EVAL_H_
#define TRIAGE_EVAL_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "triage/corpus.h"
#include "triage/json.h"
#include "triage/matrix.h"
#include "triage/model.h"
#include "triage/split.h"

namespace triage {

// Operating point reached by labeling every score >= threshold positive.
struct PrPoint {
  double recall;
  double precision;
  double threshold;
};

// One point per distinct score, thresholds descending, recall non-decreasing.
using PrCurve = std::vector<PrPoint>;

// Tied scores enter together at one threshold. Throws ValidationError on a
// length mismatch or when no label is positive.
PrCurve pr_curve(std::span<const double> scores,
                 std::span<const std::uint8_t> labels);

// Step-integrated area under the PR curve:
//   sum over thresholds of (recall_k - recall_{k-1}) * precision_k.
// Without ties this is the mean precision at the rank of each positive; with
// ties, every positive of a tied group gets the precision at the end of the
// group, so the order within a tie never matters.
double average_precision(std::span<const double> scores,
                         std::span<const std::uint8_t> labels);

// Harmonic mean 2PR / (P + R); 0 when P + R = 0.
double f_score(double precision, double recall);

struct ThresholdF {
  double threshold;
  double f;
  double precision;
  double recall;
};

// Maximum F over all distinct-score thresholds; ties go to the lowest
// threshold.
ThresholdF best_f_over_thresholds(std::span<const double> scores,
                                  std::span<const std::uint8_t> labels);

struct FoldAggregate {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1)
};

// Two values give ((a + b) / 2, |a - b| / sqrt(2)). Throws ValidationError
// with fewer than two values.
FoldAggregate aggregate_folds(std::span<const double> values);

struct ClassMetrics {
  std::string name;
  std::size_t positives = 0;
  std::size_t n = 0;
  // Unset when the class has no positives in this fold.
  std::optional<double> ap;
  std::optional<ThresholdF> best_f;
  PrCurve curve;
};

struct FoldMetrics {
  std::size_t fold = 0;
  std::size_t n_test = 0;
  std::vector<ClassMetrics> classes;
  // Means over classes with at least one positive.
  double map = 0.0;
  double macro_f = 0.0;
};

// Scores one held-out fold. Classes with no positives are left out of the
// means and reported through `warnings`. Throws ValidationError when shapes
// disagree or no class has a positive.
FoldMetrics evaluate_scores(const ScoreMatrix& scores,
                            const LabelMatrix& labels,
                            const std::vector<std::string>& classes,
                            std::size_t fold,
                            std::vector<std::string>* warnings = nullptr);

struct ClassSummary {
  std::string name;
  std::vector<std::optional<double>> ap_per_fold;
  std::vector<std::optional<double>> f_per_fold;
  // Set when the class was scored in at least two folds.
  std::optional<FoldAggregate> ap;
  std::optional<FoldAggregate> f;
};

struct EvalSummary {
  Dimension dimension = Dimension::kSubject;
  std::vector<std::string> classes;
  std::vector<FoldMetrics> folds;
  std::vector<ClassSummary> per_class;
  FoldAggregate map;
  FoldAggregate macro_f;
  std::vector<std::string> warnings;

  Json to_json() const;
};

// Aggregates per-fold metrics into per-class and per-dimension mean +- std.
EvalSummary summarize_folds(Dimension dimension,
                            std::vector<std::string> classes,
                            std::vector<FoldMetrics> folds,
                            std::vector<std::string> warnings = {});

// models[f] must have been trained without fold f; it is scored on fold f.
// Throws ValidationError when the model count differs from the fold count
// or a model does not match the view.
EvalSummary evaluate_dimension(std::span<const TrainedModel> models,
                               const DimensionView& view,
                               const FoldAssignment& folds,
                               const EncoderBackend& encoder);

}  // namespace triage

#endif  // TRIAGE_EVAL_H_
