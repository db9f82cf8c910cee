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

#include "triage/eval.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.h"
#include "triage/error.h"
#include "triage/rng.h"

namespace triage {
namespace {

using Scores = std::vector<double>;
using Labels = std::vector<std::uint8_t>;

TEST(PrCurveTest, PerfectRanking) {
  const auto curve = pr_curve(Scores{0.9, 0.1}, Labels{1, 0});
  EXPECT_EQ(curve.front().recall, 1.0);
  EXPECT_EQ(curve.front().precision, 1.0);
}

TEST(PrCurveTest, InvertedRanking) {
  const auto curve = pr_curve(Scores{0.1, 0.9}, Labels{1, 0});
  EXPECT_EQ(curve.back().recall, 1.0);
  EXPECT_EQ(curve.back().precision, 0.5);
}

TEST(PrCurveTest, FourThresholds) {
  const auto curve = pr_curve(Scores{0.9, 0.8, 0.7, 0.6}, Labels{1, 0, 1, 0});
  ASSERT_EQ(curve.size(), 4u);
  const double expected[4][2] = {{0.5, 1.0}, {0.5, 0.5}, {1.0, 2.0 / 3.0}, {1.0, 0.5}};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(curve[i].recall, expected[i][0]);
    EXPECT_DOUBLE_EQ(curve[i].precision, expected[i][1]);
  }
}

TEST(PrCurveTest, TiesEnterTogether) {
  const auto curve = pr_curve(Scores{0.5, 0.5, 0.5}, Labels{1, 0, 0});
  ASSERT_EQ(curve.size(), 1u);
  EXPECT_DOUBLE_EQ(curve[0].precision, 1.0 / 3.0);
}

TEST(PrCurveTest, InvalidInput) {
  EXPECT_THROW(pr_curve(Scores{0.1}, Labels{1, 0}), ValidationError);
  EXPECT_THROW(pr_curve(Scores{0.1, 0.2}, Labels{0, 0}), ValidationError);
  EXPECT_THROW(pr_curve(Scores{NAN, 0.2}, Labels{1, 0}), ValidationError);
}

TEST(AveragePrecisionTest, HandExamples) {
  EXPECT_EQ(average_precision(Scores{0.9, 0.5, 0.1}, Labels{1, 1, 0}), 1.0);
  EXPECT_NEAR(average_precision(Scores{0.9, 0.8, 0.7, 0.6}, Labels{1, 0, 1, 0}),
              (1.0 + 2.0 / 3.0) / 2.0, 1e-15);
  // One positive ranked last.
  EXPECT_EQ(average_precision(Scores{0.9, 0.1}, Labels{0, 1}), 0.5);
  EXPECT_EQ(average_precision(Scores{0.9, 0.8, 0.7, 0.1}, Labels{0, 0, 0, 1}),
            0.25);
}

TEST(AveragePrecisionTest, PositivesLastAmongTwiceAsMany) {
  for (std::size_t k = 1; k <= 6; ++k) {
    Scores s;
    Labels y;
    for (std::size_t i = 0; i < 2 * k; ++i) {
      s.push_back(1.0 - static_cast<double>(i) / (2.0 * k));
      y.push_back(i >= k);
    }
    const double ap = average_precision(s, y);
    EXPECT_NEAR(ap, oracle::average_precision(s, y).to_double(), 1e-15);
    if (k > 1) {
      EXPECT_LT(ap, 0.5);
    } else {
      EXPECT_EQ(ap, 0.5);
    }
  }
}

TEST(AveragePrecisionTest, MatchesOraclesOnRandomInstances) {
  Rng rng(99);
  for (int instance = 0; instance < 300; ++instance) {
    const std::size_t n = 1 + rng.below(12);
    Scores s(n);
    Labels y(n);
    const bool ties = instance % 2 == 0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = ties ? static_cast<double>(rng.below(4)) / 4.0 : rng.uniform();
      y[i] = rng.below(2);
    }
    y[rng.below(n)] = 1;
    const double ap = average_precision(s, y);
    EXPECT_NEAR(ap, oracle::average_precision(s, y).to_double(), 1e-12);
    if (!ties) EXPECT_NEAR(ap, oracle::rank_average_precision(s, y), 1e-12);
  }
}

TEST(AveragePrecisionTest, ConstantScoreEqualsPrevalence) {
  Rng rng(3);
  for (int instance = 0; instance < 50; ++instance) {
    const std::size_t n = 2 + rng.below(40);
    Labels y(n);
    for (auto& v : y) v = rng.below(2);
    y[0] = 1;
    const double positives = std::count(y.begin(), y.end(), 1);
    EXPECT_NEAR(average_precision(Scores(n, 0.3), y), positives / n, 1e-15);
  }
}

TEST(FScoreTest, ClosedForms) {
  EXPECT_EQ(f_score(1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(f_score(0.5, 1.0), 2.0 / 3.0);
  EXPECT_EQ(f_score(0.0, 0.0), 0.0);
}

TEST(BestFTest, Examples) {
  const auto sep = best_f_over_thresholds(Scores{0.9, 0.8, 0.2}, Labels{1, 1, 0});
  EXPECT_EQ(sep.f, 1.0);
  EXPECT_EQ(sep.threshold, 0.8);

  const auto b = best_f_over_thresholds(Scores{0.9, 0.8, 0.7, 0.6}, Labels{1, 0, 1, 0});
  EXPECT_NEAR(b.f, 0.8, 1e-15);
  EXPECT_EQ(b.threshold, 0.7);
  EXPECT_DOUBLE_EQ(b.precision, 2.0 / 3.0);
  EXPECT_EQ(b.recall, 1.0);

  const auto all = best_f_over_thresholds(Scores{0.9, 0.4, 0.1}, Labels{1, 1, 1});
  EXPECT_EQ(all.f, 1.0);
  EXPECT_EQ(all.threshold, 0.1);
}

TEST(AggregateFoldsTest, Examples) {
  const auto eq = aggregate_folds(std::vector<double>{0.4, 0.4});
  EXPECT_EQ(eq.mean, 0.4);
  EXPECT_EQ(eq.std, 0.0);
  const auto a = aggregate_folds(std::vector<double>{0.3, 0.5});
  EXPECT_NEAR(a.mean, 0.4, 1e-15);
  EXPECT_NEAR(a.std, 0.141421, 1e-6);
  // A 0.001 deviation corresponds to folds about 0.0014 apart.
  const auto t = aggregate_folds(std::vector<double>{0.45429, 0.45571});
  EXPECT_NEAR(t.std, 0.001, 1e-5);
  EXPECT_THROW(aggregate_folds(std::vector<double>{0.1}), ValidationError);
}

TEST(AggregateFoldsTest, TwoValuesClosedFormExactly) {
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform();
    const double b = rng.uniform();
    const auto r = aggregate_folds(std::vector<double>{a, b});
    EXPECT_EQ(r.mean, (a + b) / 2.0);
    EXPECT_EQ(r.std, std::abs(a - b) / std::sqrt(2.0));
  }
}

TEST(AggregateFoldsTest, MoreValuesMatchSampleStd) {
  const std::vector<double> v{0.1, 0.4, 0.35, 0.8};
  const auto r = aggregate_folds(v);
  EXPECT_NEAR(r.std, static_cast<double>(oracle::sample_std(v)), 1e-15);
}

TEST(EvaluateScoresTest, ZeroPositiveClassExcludedWithWarning) {
  ScoreMatrix s(3, 2, 0.5);
  s(0, 0) = 0.9;
  LabelMatrix y(3, 2);
  y(0, 0) = 1;
  std::vector<std::string> warnings;
  const auto m = evaluate_scores(s, y, {"a", "b"}, 1, &warnings);
  EXPECT_EQ(m.map, 1.0);
  EXPECT_FALSE(m.classes[1].ap.has_value());
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("'b'"), std::string::npos);
}

DimensionView oracle_view() {
  DimensionView v;
  v.dimension = Dimension::kDamage;
  v.classes = default_taxonomy().classes(Dimension::kDamage);
  v.labels = LabelMatrix(40, v.classes.size());
  for (std::size_t i = 0; i < 40; ++i) {
    v.ids.push_back("d" + std::to_string(i));
    const std::size_t c = i % v.classes.size();
    v.texts.push_back("marker" + std::to_string(c) + " filler");
    v.labels(i, c) = 1;
  }
  return v;
}

TEST(EvaluateDimensionTest, GroundTruthModelScoresOne) {
  const auto view = oracle_view();
  const auto folds = stratified_kfold(view, 2, 1);
  const HashingEncoder enc(4096);
  std::vector<TrainedModel> models;
  for (int f = 0; f < 2; ++f) {
    TrainedModel m = initial_model(view.dimension, view.classes, 4096, 0);
    m.weights = Matrix<double>(view.classes.size(), 4096);
    for (std::size_t c = 0; c < view.classes.size(); ++c) {
      m.weights(c, feature_bucket("marker" + std::to_string(c), 4096)) = 10.0;
    }
    models.push_back(std::move(m));
  }
  const auto summary = evaluate_dimension(models, view, folds, enc);
  EXPECT_EQ(summary.map.mean, 1.0);
  EXPECT_EQ(summary.map.std, 0.0);
  for (const auto& f : summary.folds) EXPECT_EQ(f.map, 1.0);
  EXPECT_EQ(summary.macro_f.mean, 1.0);
}

TEST(EvaluateDimensionTest, ConstantModelScoresPrevalence) {
  const auto view = oracle_view();
  const auto folds = stratified_kfold(view, 2, 1);
  const HashingEncoder enc(64);
  std::vector<TrainedModel> models;
  for (int f = 0; f < 2; ++f) {
    TrainedModel m = initial_model(view.dimension, view.classes, 64, 0);
    m.weights = Matrix<double>(view.classes.size(), 64);
    models.push_back(std::move(m));
  }
  const auto summary = evaluate_dimension(models, view, folds, enc);
  for (const auto& f : summary.folds) {
    for (const auto& cm : f.classes) {
      EXPECT_NEAR(*cm.ap, static_cast<double>(cm.positives) / cm.n, 1e-15);
    }
  }
  EXPECT_THROW(evaluate_dimension(std::span(models).first(1), view, folds, enc),
               ValidationError);
}

TEST(EvalSummaryTest, JsonLayout) {
  const auto view = oracle_view();
  const auto folds = stratified_kfold(view, 2, 1);
  std::vector<TrainedModel> models;
  for (int f = 0; f < 2; ++f) {
    models.push_back(initial_model(view.dimension, view.classes, 64, f));
  }
  const auto j = evaluate_dimension(models, view, folds, HashingEncoder(64)).to_json();
  EXPECT_EQ(j.at("dimension"), "damage");
  EXPECT_EQ(j.at("title"), "Damage");
  EXPECT_TRUE(j.at("map").contains("mean"));
  EXPECT_TRUE(j.at("map").contains("std"));
  EXPECT_EQ(j.at("folds").size(), 2u);
  EXPECT_EQ(j.at("per_class").size(), view.classes.size());
}

}  // namespace
}  // namespace triage
