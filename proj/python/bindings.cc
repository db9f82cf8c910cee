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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "triage/anonymize.h"
#include "triage/augment.h"
#include "triage/corpus.h"
#include "triage/error.h"
#include "triage/eval.h"
#include "triage/pipeline.h"
#include "triage/rng.h"
#include "triage/split.h"

namespace py = pybind11;

namespace triage {
namespace {

// Structured results cross the boundary as JSON text; the Python package
// decodes them into dicts.
std::string dump(const Json& j) { return j.dump(); }

std::vector<std::uint8_t> to_labels(const std::vector<int>& labels) {
  std::vector<std::uint8_t> out;
  out.reserve(labels.size());
  for (int v : labels) {
    if (v != 0 && v != 1) throw ValidationError("labels must be 0 or 1");
    out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

std::tuple<std::string, std::string> scrub_text(const std::string& text) {
  const ScrubResult r = scrub(text);
  return {r.text, dump(r.report.to_json())};
}

std::vector<std::tuple<std::string, std::size_t, std::size_t>> find_spans(
    const std::string& text) {
  std::vector<std::tuple<std::string, std::size_t, std::size_t>> out;
  for (const PiiSpan& s : find_pii(text)) {
    out.emplace_back(std::string(category_key(s.category)), s.begin, s.end);
  }
  return out;
}

std::tuple<std::string, std::string> scrub_jsonl(const std::string& jsonl,
                                                 std::size_t jobs) {
  const Dataset ds = parse_dataset(jsonl, default_taxonomy());
  const DatasetScrubResult r = scrub_dataset(ds, jobs);
  return {dataset_to_jsonl(r.dataset), dump(r.aggregate.to_json())};
}

double ap(const std::vector<double>& scores, const std::vector<int>& labels) {
  return average_precision(scores, to_labels(labels));
}

std::tuple<double, double, double, double> best_f(
    const std::vector<double>& scores, const std::vector<int>& labels) {
  const ThresholdF b = best_f_over_thresholds(scores, to_labels(labels));
  return {b.threshold, b.f, b.precision, b.recall};
}

std::tuple<double, double> aggregate(const std::vector<double>& values) {
  const FoldAggregate a = aggregate_folds(values);
  return {a.mean, a.std};
}

std::vector<std::string> drop_words(const std::vector<std::string>& tokens,
                                    double adr, std::uint64_t seed) {
  Rng rng(seed);
  return delete_words(tokens, adr, rng);
}

std::string generate(const std::optional<std::string>& spec_json,
                     std::uint64_t seed, std::optional<double> pii_rate) {
  CorpusSpec spec = spec_json ? CorpusSpec::from_json(Json::parse(*spec_json))
                              : reference_corpus_spec();
  spec.seed = seed;
  if (pii_rate) spec.pii_injection_rate = *pii_rate;
  return dataset_to_jsonl(generate_synthetic(spec));
}

std::tuple<std::string, std::string> split(const std::string& jsonl,
                                           const std::string& dimension,
                                           std::size_t k, std::uint64_t seed) {
  const Dataset ds = parse_dataset(jsonl, default_taxonomy());
  const DimensionView view = dimension_view(ds, parse_dimension(dimension));
  const FoldAssignment folds = stratified_kfold(view, k, seed);
  const StratificationReport report = verify_stratification(view, folds);
  return {dump(folds.to_json()), dump(report.to_json(view.classes))};
}

std::string augment(const std::string& jsonl, const std::string& dimension,
                    double adr, double af, std::uint64_t seed) {
  const Dataset ds = parse_dataset(jsonl, default_taxonomy());
  const DimensionView view = dimension_view(ds, parse_dimension(dimension));
  return view_to_jsonl(augment_dataset(view, AugmentConfig{adr, af, seed}));
}

std::string pipeline(const std::string& config_json, const std::string& base_dir) {
  const PipelineConfig cfg = PipelineConfig::from_json(Json::parse(config_json), base_dir);
  PipelineResult result;
  {
    py::gil_scoped_release release;
    result = run_pipeline(cfg);
  }
  return dump(result.metrics);
}

}  // namespace
}  // namespace triage

PYBIND11_MODULE(_core, m) {
  using namespace triage;
  m.doc() = "Native core of report_triage.";
  m.attr("__version__") = kVersion;

  auto base = py::register_exception<Error>(m, "TriageError");
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<ValidationError>(m, "ValidationError", base);
  py::register_exception<TrainingError>(m, "TrainingError", base);
  py::register_exception<StageError>(m, "StageError", base);

  m.def("scrub", &scrub_text, py::arg("text"));
  m.def("find_pii", &find_spans, py::arg("text"));
  m.def("scrub_jsonl", &scrub_jsonl, py::arg("jsonl"), py::arg("jobs") = 1);
  m.def("average_precision", &ap, py::arg("scores"), py::arg("labels"));
  m.def("best_f", &best_f, py::arg("scores"), py::arg("labels"));
  m.def("aggregate_folds", &aggregate, py::arg("values"));
  m.def("augmented_size", &augmented_size, py::arg("n"), py::arg("af"));
  m.def("delete_words", &drop_words, py::arg("tokens"), py::arg("adr"),
        py::arg("seed"));
  m.def("generate", &generate, py::arg("spec_json") = py::none(),
        py::arg("seed") = 0, py::arg("pii_rate") = py::none());
  m.def("split", &split, py::arg("jsonl"), py::arg("dimension"),
        py::arg("k") = 2, py::arg("seed") = 0);
  m.def("augment", &augment, py::arg("jsonl"), py::arg("dimension"),
        py::arg("adr"), py::arg("af"), py::arg("seed") = 0);
  m.def("run_pipeline", &pipeline, py::arg("config_json"),
        py::arg("base_dir") = "");
}
