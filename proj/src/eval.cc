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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "triage/error.h"

namespace triage {
namespace {

void check_inputs(std::span<const double> scores,
                  std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw ValidationError("got " + std::to_string(scores.size()) +
                          " scores but " + std::to_string(labels.size()) +
                          " labels");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) throw ValidationError("non-finite score");
  }
  if (std::none_of(labels.begin(), labels.end(),
                   [](std::uint8_t y) { return y != 0; })) {
    throw ValidationError("precision-recall needs at least one positive");
  }
}

// Cumulative (true positives, predicted positives) after each tie group,
// walking scores from high to low.
struct Step {
  std::size_t tp;
  std::size_t seen;
  double threshold;
};

std::vector<Step> threshold_steps(std::span<const double> scores,
                                  std::span<const std::uint8_t> labels) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  std::vector<Step> steps;
  std::size_t tp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double threshold = scores[order[i]];
    while (i < order.size() && scores[order[i]] == threshold) {
      tp += labels[order[i]] != 0;
      ++i;
    }
    steps.push_back({tp, i, threshold});
  }
  return steps;
}

}  // namespace

PrCurve pr_curve(std::span<const double> scores,
                 std::span<const std::uint8_t> labels) {
  check_inputs(scores, labels);
  const auto steps = threshold_steps(scores, labels);
  const double positives = static_cast<double>(steps.back().tp);
  PrCurve curve;
  curve.reserve(steps.size());
  for (const auto& s : steps) {
    curve.push_back({static_cast<double>(s.tp) / positives,
                     static_cast<double>(s.tp) / static_cast<double>(s.seen),
                     s.threshold});
  }
  return curve;
}

double average_precision(std::span<const double> scores,
                         std::span<const std::uint8_t> labels) {
  check_inputs(scores, labels);
  const auto steps = threshold_steps(scores, labels);
  double sum = 0.0;
  std::size_t previous_tp = 0;
  for (const auto& s : steps) {
    if (s.tp == previous_tp) continue;
    sum += static_cast<double>(s.tp - previous_tp) *
           (static_cast<double>(s.tp) / static_cast<double>(s.seen));
    previous_tp = s.tp;
  }
  return sum / static_cast<double>(steps.back().tp);
}

double f_score(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

ThresholdF best_f_over_thresholds(std::span<const double> scores,
                                  std::span<const std::uint8_t> labels) {
  const auto curve = pr_curve(scores, labels);
  ThresholdF best{curve.front().threshold, -1.0, 0.0, 0.0};
  // Thresholds descend along the curve, so `>=` keeps the lowest on ties.
  for (const auto& p : curve) {
    const double f = f_score(p.precision, p.recall);
    if (f >= best.f) best = {p.threshold, f, p.precision, p.recall};
  }
  return best;
}

FoldAggregate aggregate_folds(std::span<const double> values) {
  if (values.size() < 2) {
    throw ValidationError("aggregating folds needs at least two values");
  }
  if (values.size() == 2) {
    // Closed form of the two-sample deviation, free of cancellation.
    return {(values[0] + values[1]) / 2.0,
            std::abs(values[0] - values[1]) / std::sqrt(2.0)};
  }
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

FoldMetrics evaluate_scores(const ScoreMatrix& scores,
                            const LabelMatrix& labels,
                            const std::vector<std::string>& classes,
                            std::size_t fold,
                            std::vector<std::string>* warnings) {
  if (scores.rows() != labels.rows() || scores.cols() != classes.size() ||
      labels.cols() != classes.size()) {
    throw ValidationError("score and label matrices do not match");
  }
  FoldMetrics metrics;
  metrics.fold = fold;
  metrics.n_test = scores.rows();
  double ap_sum = 0.0;
  double f_sum = 0.0;
  std::size_t scored = 0;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    ClassMetrics cm;
    cm.name = classes[c];
    cm.n = scores.rows();
    const auto s = scores.column(c);
    const auto y = labels.column(c);
    cm.positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
    if (cm.positives == 0) {
      if (warnings) {
        warnings->push_back("fold " + std::to_string(fold) + ": class '" +
                            cm.name +
                            "' has no test positives; excluded from mAP");
      }
      metrics.classes.push_back(std::move(cm));
      continue;
    }
    cm.ap = average_precision(s, y);
    cm.best_f = best_f_over_thresholds(s, y);
    cm.curve = pr_curve(s, y);
    ap_sum += *cm.ap;
    f_sum += cm.best_f->f;
    ++scored;
    metrics.classes.push_back(std::move(cm));
  }
  if (scored == 0) {
    throw ValidationError("fold " + std::to_string(fold) +
                          " has no positive labels in any class");
  }
  metrics.map = ap_sum / static_cast<double>(scored);
  metrics.macro_f = f_sum / static_cast<double>(scored);
  return metrics;
}

EvalSummary summarize_folds(Dimension dimension,
                            std::vector<std::string> classes,
                            std::vector<FoldMetrics> folds,
                            std::vector<std::string> warnings) {
  EvalSummary summary;
  summary.dimension = dimension;
  summary.classes = std::move(classes);
  summary.folds = std::move(folds);
  summary.warnings = std::move(warnings);

  std::vector<double> maps;
  std::vector<double> fs;
  for (const auto& f : summary.folds) {
    maps.push_back(f.map);
    fs.push_back(f.macro_f);
  }
  summary.map = aggregate_folds(maps);
  summary.macro_f = aggregate_folds(fs);

  for (std::size_t c = 0; c < summary.classes.size(); ++c) {
    ClassSummary cs;
    cs.name = summary.classes[c];
    std::vector<double> aps;
    std::vector<double> class_fs;
    for (const auto& f : summary.folds) {
      const auto& cm = f.classes.at(c);
      cs.ap_per_fold.push_back(cm.ap);
      cs.f_per_fold.push_back(cm.best_f ? std::optional(cm.best_f->f)
                                        : std::nullopt);
      if (cm.ap) {
        aps.push_back(*cm.ap);
        class_fs.push_back(cm.best_f->f);
      }
    }
    if (aps.size() >= 2) {
      cs.ap = aggregate_folds(aps);
      cs.f = aggregate_folds(class_fs);
    }
    summary.per_class.push_back(std::move(cs));
  }
  return summary;
}

EvalSummary evaluate_dimension(std::span<const TrainedModel> models,
                               const DimensionView& view,
                               const FoldAssignment& folds,
                               const EncoderBackend& encoder) {
  if (models.size() != folds.k) {
    throw ValidationError("got " + std::to_string(models.size()) +
                          " models for " + std::to_string(folds.k) + " folds");
  }
  std::vector<FoldMetrics> per_fold;
  std::vector<std::string> warnings;
  for (std::size_t f = 0; f < folds.k; ++f) {
    const auto rows = folds.rows_in_fold(view, f);
    const DimensionView test = view.subset(rows);
    const ScoreMatrix scores = predict(models[f], test, encoder);
    per_fold.push_back(
        evaluate_scores(scores, test.labels, view.classes, f, &warnings));
  }
  return summarize_folds(view.dimension, view.classes, std::move(per_fold),
                         std::move(warnings));
}

namespace {

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json aggregate_json(const FoldAggregate& a) {
  Json j;
  j["mean"] = a.mean;
  j["std"] = a.std;
  return j;
}

}  // namespace

Json EvalSummary::to_json() const {
  Json j;
  j["dimension"] = dimension_key(dimension);
  j["title"] = dimension_title(dimension);
  j["classes"] = classes;
  j["map"] = aggregate_json(map);
  j["f_score"] = aggregate_json(macro_f);

  Json classes_json = Json::array();
  for (const auto& cs : per_class) {
    Json c;
    c["name"] = cs.name;
    Json aps = Json::array();
    Json fs = Json::array();
    for (const auto& v : cs.ap_per_fold) aps.push_back(optional_number(v));
    for (const auto& v : cs.f_per_fold) fs.push_back(optional_number(v));
    c["ap_per_fold"] = aps;
    c["f_per_fold"] = fs;
    c["ap"] = cs.ap ? aggregate_json(*cs.ap) : Json(nullptr);
    c["f"] = cs.f ? aggregate_json(*cs.f) : Json(nullptr);
    classes_json.push_back(std::move(c));
  }
  j["per_class"] = std::move(classes_json);

  Json folds_json = Json::array();
  for (const auto& f : folds) {
    Json fj;
    fj["fold"] = f.fold;
    fj["n_test"] = f.n_test;
    fj["map"] = f.map;
    fj["macro_f"] = f.macro_f;
    Json cms = Json::array();
    for (const auto& cm : f.classes) {
      Json cj;
      cj["name"] = cm.name;
      cj["positives"] = cm.positives;
      cj["n"] = cm.n;
      cj["ap"] = optional_number(cm.ap);
      if (cm.best_f) {
        Json bf;
        bf["threshold"] = cm.best_f->threshold;
        bf["f"] = cm.best_f->f;
        bf["precision"] = cm.best_f->precision;
        bf["recall"] = cm.best_f->recall;
        cj["best_f"] = std::move(bf);
      } else {
        cj["best_f"] = nullptr;
      }
      Json curve = Json::array();
      for (const auto& p : cm.curve) {
        curve.push_back(Json::array({p.recall, p.precision, p.threshold}));
      }
      cj["curve"] = std::move(curve);
      cms.push_back(std::move(cj));
    }
    fj["classes"] = std::move(cms);
    folds_json.push_back(std::move(fj));
  }
  j["folds"] = std::move(folds_json);
  j["warnings"] = warnings;
  return j;
}

}  // namespace triage
