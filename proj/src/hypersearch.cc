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

#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

#include "triage/error.h"
#include "triage/rng.h"

namespace triage {
namespace {

template <typename T>
void check_range(const Range<T>& r, const char* name) {
  if (!(r.lower < r.upper)) {
    throw ValidationError(std::string("search range '") + name +
                          "' needs lower < upper");
  }
}

template <typename T>
Json range_json(const Range<T>& r) {
  return Json::array({r.lower, r.upper});
}

template <typename T>
Range<T> range_from(const Json& j, const char* key, Range<T> fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_array() || it->size() != 2) {
    throw ParseError(std::string("search range '") + key +
                     "' must be [lower, upper]");
  }
  return {(*it)[0].get<T>(), (*it)[1].get<T>()};
}

std::size_t uniform_count(Rng& rng, const Range<std::size_t>& r) {
  return r.lower + static_cast<std::size_t>(rng.below(r.upper - r.lower + 1));
}

TrialRecord run_trial(const DimensionView& view, const SearchSpace& space,
                      const SearchOptions& options, const FoldAssignment& folds,
                      const EncoderBackend& encoder, std::size_t index) {
  TrialRecord record;
  record.index = index;
  record.config = sample_config(space, index, options.base);
  try {
    const auto cv = cross_validate(view, record.config, folds, encoder);
    for (const auto& f : cv.summary.folds) {
      record.fold_map.push_back(f.map);
      record.fold_f.push_back(f.macro_f);
    }
    record.mean_map = cv.summary.map.mean;
    record.mean_f = cv.summary.macro_f.mean;
    record.ok = true;
  } catch (const Error& e) {
    record.ok = false;
    record.message = e.what();
  }
  return record;
}

// Valid prefix of an existing trial log; a trailing partial line from an
// interrupted write is dropped.
std::vector<TrialRecord> read_log(const std::filesystem::path& path,
                                  const SearchSpace& space,
                                  const TrainConfig& base) {
  std::vector<TrialRecord> records;
  std::ifstream in(path);
  if (!in) return records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TrialRecord record;
    try {
      record = TrialRecord::from_json(Json::parse(line));
    } catch (const std::exception&) {
      break;
    }
    if (record.index != records.size() || record.index >= space.n_trials) break;
    if (!(record.config == sample_config(space, record.index, base))) {
      throw ValidationError("trial log " + path.string() +
                            " was written by a different search; remove it "
                            "or choose another log path");
    }
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace

void SearchSpace::validate() const {
  check_range(learning_rate, "learning_rate");
  check_range(epochs, "epochs");
  check_range(batch_size_train, "batch_size_train");
  check_range(batch_size_test, "batch_size_test");
  check_range(dropout, "dropout");
  check_range(adr, "adr");
  check_range(af, "af");
  if (!(learning_rate.lower > 0.0)) {
    throw ValidationError("learning_rate range must be positive");
  }
  if (epochs.lower < 1 || batch_size_train.lower < 1 ||
      batch_size_test.lower < 1) {
    throw ValidationError("epoch and batch ranges must start at 1 or more");
  }
  if (!(dropout.lower >= 0.0 && dropout.upper < 1.0)) {
    throw ValidationError("dropout range must lie in [0, 1)");
  }
  if (!(adr.lower > 0.0 && adr.upper < 1.0)) {
    throw ValidationError("adr range must lie in (0, 1)");
  }
  if (!(af.lower >= 1.0)) throw ValidationError("af range must start at 1");
  if (n_trials < 1) throw ValidationError("n_trials must be at least 1");
}

SearchSpace SearchSpace::from_json(const Json& j) {
  SearchSpace s;
  s.learning_rate = range_from(j, "learning_rate", s.learning_rate);
  s.epochs = range_from(j, "epochs", s.epochs);
  s.batch_size_train = range_from(j, "batch_size_train", s.batch_size_train);
  s.batch_size_test = range_from(j, "batch_size_test", s.batch_size_test);
  s.dropout = range_from(j, "dropout", s.dropout);
  s.adr = range_from(j, "adr", s.adr);
  s.af = range_from(j, "af", s.af);
  s.augment = j.value("augment", s.augment);
  s.n_trials = j.value("n_trials", s.n_trials);
  s.seed = j.value("seed", s.seed);
  s.validate();
  return s;
}

Json SearchSpace::to_json() const {
  Json j;
  j["learning_rate"] = range_json(learning_rate);
  j["epochs"] = range_json(epochs);
  j["batch_size_train"] = range_json(batch_size_train);
  j["batch_size_test"] = range_json(batch_size_test);
  j["dropout"] = range_json(dropout);
  j["adr"] = range_json(adr);
  j["af"] = range_json(af);
  j["augment"] = augment;
  j["n_trials"] = n_trials;
  j["seed"] = seed;
  return j;
}

TrainConfig sample_config(const SearchSpace& space, std::size_t trial_index,
                          const TrainConfig& base) {
  space.validate();
  if (trial_index >= space.n_trials) {
    throw ValidationError("trial index " + std::to_string(trial_index) +
                          " out of range for " +
                          std::to_string(space.n_trials) + " trials");
  }
  Rng rng(derive_seed(space.seed, trial_index));
  TrainConfig cfg = base;
  // Every parameter is drawn in a fixed order, whether or not augmentation
  // is enabled, so toggling it leaves the other values unchanged.
  cfg.learning_rate = std::exp(rng.uniform(std::log(space.learning_rate.lower),
                                           std::log(space.learning_rate.upper)));
  cfg.epochs = uniform_count(rng, space.epochs);
  cfg.batch_size_train = uniform_count(rng, space.batch_size_train);
  cfg.batch_size_test = uniform_count(rng, space.batch_size_test);
  cfg.dropout = rng.uniform(space.dropout.lower, space.dropout.upper);
  AugmentConfig aug;
  aug.adr = rng.uniform(space.adr.lower, space.adr.upper);
  aug.af = rng.uniform(space.af.lower, space.af.upper);
  aug.seed = derive_seed(base.seed, "augment");
  if (space.augment) {
    cfg.augment = aug;
  } else {
    cfg.augment.reset();
  }
  return cfg;
}

std::vector<TrainedModel> train_fold_models(const DimensionView& view,
                                            const TrainConfig& cfg,
                                            const FoldAssignment& folds,
                                            const EncoderBackend& encoder) {
  std::vector<TrainedModel> models;
  for (std::size_t f = 0; f < folds.k; ++f) {
    const auto rows = folds.rows_outside_fold(view, f);
    TrainConfig fold_cfg = cfg;
    fold_cfg.seed = derive_seed(cfg.seed, f);
    if (fold_cfg.augment) {
      fold_cfg.augment->seed = derive_seed(cfg.augment->seed, f);
    }
    models.push_back(train(view.subset(rows), fold_cfg, encoder));
  }
  return models;
}

CrossValidationResult cross_validate(const DimensionView& view,
                                     const TrainConfig& cfg,
                                     const FoldAssignment& folds,
                                     const EncoderBackend& encoder) {
  CrossValidationResult result;
  result.folds = folds;
  result.models = train_fold_models(view, cfg, folds, encoder);
  result.summary = evaluate_dimension(result.models, view, folds, encoder);
  return result;
}

Json TrialRecord::to_json() const {
  Json j;
  j["trial"] = index;
  j["status"] = ok ? "ok" : "failed";
  j["config"] = config.to_json();
  j["fold_map"] = fold_map;
  j["fold_f"] = fold_f;
  j["mean_map"] = ok ? Json(mean_map) : Json(nullptr);
  j["mean_f"] = ok ? Json(mean_f) : Json(nullptr);
  if (!message.empty()) j["message"] = message;
  return j;
}

TrialRecord TrialRecord::from_json(const Json& j) {
  TrialRecord r;
  r.index = j.at("trial").get<std::size_t>();
  r.ok = j.at("status").get<std::string>() == "ok";
  r.config = TrainConfig::from_json(j.at("config"));
  r.fold_map = j.at("fold_map").get<std::vector<double>>();
  r.fold_f = j.at("fold_f").get<std::vector<double>>();
  if (r.ok) {
    r.mean_map = j.at("mean_map").get<double>();
    r.mean_f = j.at("mean_f").get<double>();
  }
  r.message = j.value("message", "");
  return r;
}

SearchResult random_search(const DimensionView& view, const SearchSpace& space,
                           const SearchOptions& options,
                           const EncoderBackend& encoder) {
  space.validate();
  options.base.validate();
  const FoldAssignment folds =
      stratified_kfold(view, options.k_folds, options.split_seed);

  std::vector<TrialRecord> done;
  if (options.log_path) {
    done = read_log(*options.log_path, space, options.base);
    // Rewrite the valid prefix so appends start on a clean line.
    std::ofstream out(*options.log_path, std::ios::trunc);
    if (!out) throw Error("cannot write " + options.log_path->string());
    for (const auto& r : done) out << r.to_json().dump() << '\n';
  }

  std::vector<std::optional<TrialRecord>> results(space.n_trials);
  for (std::size_t i = 0; i < done.size(); ++i) results[i] = done[i];

  std::mutex mutex;
  std::size_t next_to_write = done.size();
  std::atomic<std::size_t> next_trial{done.size()};
  std::ofstream log;
  if (options.log_path) log.open(*options.log_path, std::ios::app);

  auto worker = [&] {
    for (;;) {
      const std::size_t index = next_trial.fetch_add(1);
      if (index >= space.n_trials) return;
      TrialRecord record =
          run_trial(view, space, options, folds, encoder, index);
      std::lock_guard lock(mutex);
      results[index] = std::move(record);
      // Keep the log in trial order regardless of completion order.
      while (next_to_write < space.n_trials && results[next_to_write]) {
        if (log.is_open()) {
          log << results[next_to_write]->to_json().dump() << '\n';
          log.flush();
        }
        ++next_to_write;
      }
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t j = 0; j < jobs; ++j) threads.emplace_back(worker);
  }

  SearchResult result;
  bool found = false;
  for (auto& r : results) {
    result.trials.push_back(std::move(*r));
    const auto& t = result.trials.back();
    if (t.ok && (!found || t.mean_map > result.best_map)) {
      found = true;
      result.best_trial = t.index;
      result.best_map = t.mean_map;
      result.best_config = t.config;
    }
  }
  if (!found) {
    throw TrainingError("all " + std::to_string(space.n_trials) +
                        " search trials failed; first error: " +
                        result.trials.front().message);
  }
  return result;
}

}  // namespace triage
