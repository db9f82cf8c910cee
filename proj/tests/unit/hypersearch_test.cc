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

#include "triage/hypersearch.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "triage/error.h"

namespace triage {
namespace {

namespace fs = std::filesystem;

TEST(SampleConfigTest, DeterministicPerSeedAndIndex) {
  SearchSpace space;
  space.seed = 4;
  EXPECT_EQ(sample_config(space, 3), sample_config(space, 3));
  EXPECT_FALSE(sample_config(space, 3) == sample_config(space, 4));
}

TEST(SampleConfigTest, ValuesStayInRanges) {
  SearchSpace space;
  space.n_trials = 1000;
  for (std::size_t i = 0; i < 1000; ++i) {
    const auto cfg = sample_config(space, i);
    ASSERT_TRUE(cfg.augment.has_value());
    EXPECT_GE(cfg.augment->adr, 0.05);
    EXPECT_LE(cfg.augment->adr, 0.9);
    EXPECT_GE(cfg.augment->af, 1.0);
    EXPECT_LE(cfg.augment->af, 10.0);
    EXPECT_GE(cfg.learning_rate, 1e-6);
    EXPECT_LE(cfg.learning_rate, 1e-4);
    EXPECT_GE(cfg.epochs, 10u);
    EXPECT_LE(cfg.epochs, 200u);
    EXPECT_GE(cfg.batch_size_train, 16u);
    EXPECT_LE(cfg.batch_size_train, 256u);
    EXPECT_GE(cfg.dropout, 0.1);
    EXPECT_LE(cfg.dropout, 0.5);
  }
}

TEST(SampleConfigTest, LearningRateIsLogUniform) {
  SearchSpace space;
  space.n_trials = 1000;
  std::vector<double> lr;
  for (std::size_t i = 0; i < 1000; ++i) lr.push_back(sample_config(space, i).learning_rate);
  std::nth_element(lr.begin(), lr.begin() + 500, lr.end());
  // The median of a log-uniform draw on [1e-6, 1e-4] is sqrt(1e-6 * 1e-4).
  EXPECT_GE(lr[500], 3e-6);
  EXPECT_LE(lr[500], 3e-5);
}

TEST(SampleConfigTest, IndexOutOfRange) {
  SearchSpace space;
  space.n_trials = 2;
  EXPECT_THROW(sample_config(space, 2), ValidationError);
}

TEST(SampleConfigTest, AugmentToggleKeepsOtherDraws) {
  SearchSpace on;
  SearchSpace off = on;
  off.augment = false;
  auto a = sample_config(on, 5);
  const auto b = sample_config(off, 5);
  EXPECT_FALSE(b.augment.has_value());
  a.augment.reset();
  EXPECT_EQ(a, b);
}

TEST(SearchSpaceTest, Validation) {
  SearchSpace s;
  s.dropout = {0.5, 0.1};
  EXPECT_THROW(s.validate(), ValidationError);
  s = {};
  s.n_trials = 0;
  EXPECT_THROW(s.validate(), ValidationError);
  s = {};
  EXPECT_EQ(SearchSpace::from_json(s.to_json()).to_json(), s.to_json());
}

DimensionView synthetic_view() {
  CorpusSpec spec = reference_corpus_spec(1);
  return dimension_view(generate_synthetic(spec), Dimension::kDamage);
}

SearchSpace small_space(std::size_t trials) {
  SearchSpace s;
  s.learning_rate = {1e-3, 5e-2};
  s.epochs = {2, 6};
  s.batch_size_train = {16, 64};
  s.af = {1.0, 2.0};
  s.n_trials = trials;
  s.seed = 3;
  return s;
}

SearchOptions small_options() {
  SearchOptions o;
  o.base.feature_dim = 1024;
  o.split_seed = 11;
  return o;
}

TEST(RandomSearchTest, SingleTrialReturnsItsConfig) {
  const auto view = synthetic_view();
  const auto space = small_space(1);
  const auto result = random_search(view, space, small_options(), HashingEncoder(1024));
  ASSERT_EQ(result.trials.size(), 1u);
  EXPECT_EQ(result.best_trial, 0u);
  EXPECT_EQ(result.best_config, sample_config(space, 0, small_options().base));
}

TEST(RandomSearchTest, BestIsMaxOfLogAndAtLeastMedian) {
  const auto view = synthetic_view();
  auto opts = small_options();
  opts.jobs = 3;
  const auto result = random_search(view, small_space(10), opts, HashingEncoder(1024));
  ASSERT_EQ(result.trials.size(), 10u);
  std::vector<double> maps;
  for (const auto& t : result.trials) {
    ASSERT_TRUE(t.ok);
    maps.push_back(t.mean_map);
  }
  EXPECT_EQ(result.best_map, *std::max_element(maps.begin(), maps.end()));
  EXPECT_EQ(result.best_map, result.trials[result.best_trial].mean_map);
  std::sort(maps.begin(), maps.end());
  EXPECT_GE(result.best_map, (maps[4] + maps[5]) / 2.0);
}

TEST(RandomSearchTest, IdenticalConfigsGiveIdenticalMap) {
  const auto view = synthetic_view();
  const auto folds = stratified_kfold(view, 2, 5);
  const HashingEncoder enc(1024);
  const auto cfg = sample_config(small_space(1), 0, small_options().base);
  const auto a = cross_validate(view, cfg, folds, enc);
  const auto b = cross_validate(view, cfg, folds, enc);
  EXPECT_EQ(a.summary.map.mean, b.summary.map.mean);
  EXPECT_EQ(a.summary.to_json(), b.summary.to_json());
}

TEST(RandomSearchTest, ParallelMatchesSerial) {
  const auto view = synthetic_view();
  auto serial = small_options();
  auto parallel = small_options();
  parallel.jobs = 4;
  const auto a = random_search(view, small_space(6), serial, HashingEncoder(1024));
  const auto b = random_search(view, small_space(6), parallel, HashingEncoder(1024));
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(a.trials[i].to_json(), b.trials[i].to_json());
  }
}

TEST(RandomSearchTest, DivergingTrialIsLoggedAsFailed) {
  const auto view = synthetic_view();
  SearchSpace space = small_space(3);
  space.learning_rate = {1e307, 1e308};
  EXPECT_THROW(random_search(view, space, small_options(), HashingEncoder(1024)),
               TrainingError);
}

TEST(RandomSearchTest, LogResumesAfterInterruption) {
  const auto view = synthetic_view();
  const auto log = fs::temp_directory_path() / "triage_search_resume.jsonl";
  fs::remove(log);
  auto opts = small_options();
  opts.log_path = log;
  const auto full = random_search(view, small_space(4), opts, HashingEncoder(1024));

  // Keep two complete lines and half of the third, as after a crash.
  std::ifstream in(log);
  std::string l1, l2, l3;
  std::getline(in, l1);
  std::getline(in, l2);
  std::getline(in, l3);
  in.close();
  {
    std::ofstream out(log, std::ios::trunc);
    out << l1 << '\n' << l2 << '\n' << l3.substr(0, l3.size() / 2);
  }
  const auto resumed = random_search(view, small_space(4), opts, HashingEncoder(1024));
  EXPECT_EQ(resumed.best_trial, full.best_trial);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(resumed.trials[i].to_json(), full.trials[i].to_json());
  }
  std::ifstream again(log);
  std::size_t lines = 0;
  for (std::string l; std::getline(again, l);) ++lines;
  EXPECT_EQ(lines, 4u);

  // A log from another search is refused rather than silently mixed in.
  SearchSpace other = small_space(4);
  other.seed = 99;
  EXPECT_THROW(random_search(view, other, opts, HashingEncoder(1024)),
               ValidationError);
  fs::remove(log);
}

}  // namespace
}  // namespace triage
