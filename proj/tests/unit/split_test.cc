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

#include "triage/split.h"

#include <gtest/gtest.h>

#include "triage/error.h"
#include "triage/rng.h"

namespace triage {
namespace {

DimensionView single_class_view(std::size_t n) {
  DimensionView v;
  v.classes = {"only"};
  v.labels = LabelMatrix(n, 1, 1);
  for (std::size_t i = 0; i < n; ++i) {
    v.ids.push_back("r" + std::to_string(i));
    v.texts.push_back("t");
  }
  return v;
}

DimensionView random_single_label_view(std::size_t n, std::size_t classes,
                                       std::uint64_t seed) {
  Rng rng(seed);
  DimensionView v;
  for (std::size_t c = 0; c < classes; ++c) {
    v.classes.push_back("c" + std::to_string(c));
  }
  v.labels = LabelMatrix(n, classes);
  for (std::size_t i = 0; i < n; ++i) {
    v.ids.push_back("r" + std::to_string(i));
    v.texts.push_back("t");
    v.labels(i, rng.below(classes)) = 1;
  }
  return v;
}

TEST(StratifiedKFoldTest, TenSingleLabelReportsSplitFiveFive) {
  const auto view = single_class_view(10);
  const auto folds = stratified_kfold(view, 2, 1);
  EXPECT_EQ(folds.fold_sizes(), (std::vector<std::size_t>{5, 5}));
}

TEST(StratifiedKFoldTest, ThreeInstancesGiveDeltaOne) {
  const auto view = single_class_view(3);
  const auto folds = stratified_kfold(view, 2, 1);
  const auto report = verify_stratification(view, folds);
  EXPECT_EQ(report.max_delta, 1u);
}

TEST(StratifiedKFoldTest, RareClassSplitsTenEleven) {
  // 21 commercial-purpose reports inside a larger view.
  DimensionView v;
  v.classes = {"intent_of_damage", "commercial_purpose"};
  v.labels = LabelMatrix(200, 2);
  for (std::size_t i = 0; i < 200; ++i) {
    v.ids.push_back("r" + std::to_string(i));
    v.texts.push_back("t");
    v.labels(i, i < 21 ? 1 : 0) = 1;
    if (i % 9 == 0) v.labels(i, 0) = 1;
  }
  for (std::uint64_t seed : {0ull, 1ull, 2023ull}) {
    const auto report = verify_stratification(v, stratified_kfold(v, 2, seed));
    auto c = report.counts[1];
    std::sort(c.begin(), c.end());
    EXPECT_EQ(c, (std::vector<std::size_t>{10, 11})) << seed;
  }
}

TEST(StratifiedKFoldTest, SameSeedSameAssignment) {
  const auto view = random_single_label_view(300, 5, 8);
  const auto a = stratified_kfold(view, 3, 42);
  const auto b = stratified_kfold(view, 3, 42);
  EXPECT_EQ(a.fold, b.fold);
  const auto c = stratified_kfold(view, 3, 43);
  EXPECT_NE(a.fold, c.fold);
}

TEST(StratifiedKFoldTest, SingleLabelDeltaAtMostOneProperty) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    const std::size_t n = 10 + rng.below(300);
    const std::size_t classes = 1 + rng.below(8);
    const std::size_t k = 2 + rng.below(4);
    const auto view = random_single_label_view(n, classes, seed);
    const auto folds = stratified_kfold(view, k, seed);
    const auto report = verify_stratification(view, folds);
    EXPECT_LE(report.max_delta, 1u) << "seed " << seed;
    const auto [lo, hi] =
        std::minmax_element(report.fold_sizes.begin(), report.fold_sizes.end());
    EXPECT_LE(*hi - *lo, 1u) << "seed " << seed;
  }
}

TEST(StratifiedKFoldTest, ReferenceCorpus) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const Dataset ds = generate_synthetic(reference_corpus_spec(seed));
    for (Dimension d : kAllDimensions) {
      const auto view = dimension_view(ds, d);
      const auto folds = stratified_kfold(view, 2, seed * 31 + 7);
      const auto report = verify_stratification(view, folds);
      EXPECT_LE(report.max_delta, 2u) << dimension_key(d) << " seed " << seed;
      const auto sizes = folds.fold_sizes();
      EXPECT_LE(std::max(sizes[0], sizes[1]) - std::min(sizes[0], sizes[1]), 1u);
      const auto rare = std::find(view.classes.begin(), view.classes.end(),
                                  "commercial_purpose");
      if (rare != view.classes.end()) {
        auto c = report.counts[static_cast<std::size_t>(rare - view.classes.begin())];
        std::sort(c.begin(), c.end());
        EXPECT_EQ(c, (std::vector<std::size_t>{10, 11})) << "seed " << seed;
      }
    }
  }
}

TEST(StratifiedKFoldTest, RefinementKeepsMultiFoldSizes) {
  const Dataset ds = generate_synthetic(reference_corpus_spec(1));
  const auto view = dimension_view(ds, Dimension::kSubject);
  const auto folds = stratified_kfold(view, 5, 3);
  const auto report = verify_stratification(view, folds);
  const auto [lo, hi] =
      std::minmax_element(report.fold_sizes.begin(), report.fold_sizes.end());
  EXPECT_LE(*hi - *lo, 1u);
  EXPECT_LE(report.max_delta, 2u);
}

TEST(StratifiedKFoldTest, RejectsTooFewReports) {
  EXPECT_THROW(stratified_kfold(single_class_view(1), 2, 0), ValidationError);
  EXPECT_THROW(stratified_kfold(single_class_view(5), 1, 0), ValidationError);
}

TEST(FoldAssignmentTest, RowsPartitionView) {
  const auto view = random_single_label_view(50, 3, 1);
  const auto folds = stratified_kfold(view, 3, 1);
  std::vector<int> seen(view.size(), 0);
  for (std::size_t f = 0; f < 3; ++f) {
    const auto in = folds.rows_in_fold(view, f);
    const auto out = folds.rows_outside_fold(view, f);
    EXPECT_EQ(in.size() + out.size(), view.size());
    for (auto r : in) ++seen[r];
  }
  for (int s : seen) EXPECT_EQ(s, 1);
}

TEST(FoldAssignmentTest, JsonRoundTrip) {
  const auto view = random_single_label_view(20, 2, 3);
  const auto folds = stratified_kfold(view, 2, 3);
  const auto back = FoldAssignment::from_json(folds.to_json());
  EXPECT_EQ(back.k, folds.k);
  for (const auto& id : view.ids) EXPECT_EQ(back.fold_of(id), folds.fold_of(id));
  EXPECT_THROW(folds.fold_of("missing"), ValidationError);
}

TEST(VerifyStratificationTest, BalancedAssignmentHasZeroDelta) {
  const auto view = single_class_view(4);
  FoldAssignment fa;
  fa.k = 2;
  fa.ids = view.ids;
  fa.fold = {0, 1, 0, 1};
  EXPECT_EQ(verify_stratification(view, fa).max_delta, 0u);
}

}  // namespace
}  // namespace triage
