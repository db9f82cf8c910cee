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

#ifndef TRIAGE_CORPUS_H_
#define TRIAGE_CORPUS_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "triage/json.h"
#include "triage/matrix.h"

namespace triage {

// The three annotation axes. Each one gets its own view, split and model.
enum class Dimension { kSubject, kCriminality, kDamage };

inline constexpr std::array<Dimension, 3> kAllDimensions = {
    Dimension::kSubject, Dimension::kCriminality, Dimension::kDamage};

// File/CLI key: "subject", "criminality", "damage".
std::string_view dimension_key(Dimension d);
// Human-readable name used in tables and plots.
std::string_view dimension_title(Dimension d);
// Accepts the file key; throws ValidationError otherwise.
Dimension parse_dimension(std::string_view key);

struct DimensionClasses {
  Dimension dimension;
  std::vector<std::string> classes;
};

// Ordered class lists per dimension. Immutable once constructed.
class Taxonomy {
 public:
  // Throws ValidationError on duplicate dimensions, empty class lists or
  // duplicate class names within a dimension.
  explicit Taxonomy(std::vector<DimensionClasses> dimensions);

  static Taxonomy from_json(const Json& j);
  Json to_json() const;

  bool has(Dimension d) const;
  // Throws ValidationError when `d` is not part of the taxonomy.
  const std::vector<std::string>& classes(Dimension d) const;
  std::optional<std::size_t> class_index(Dimension d,
                                         std::string_view name) const;
  const std::vector<DimensionClasses>& dimensions() const {
    return dimensions_;
  }

  bool operator==(const Taxonomy&) const;

 private:
  std::vector<DimensionClasses> dimensions_;
};

// 8 Subject, 6 Degree-of-Criminality and 4 Damage classes. Classes without a
// known name are explicit placeholders; override with a taxonomy file.
Taxonomy default_taxonomy();
Taxonomy load_taxonomy(const std::filesystem::path& path);

struct Report {
  std::string id;
  std::string text;
  // Absent key: the report is unlabeled in that dimension.
  std::map<Dimension, std::vector<std::string>> labels;
  bool scrubbed = false;

  bool operator==(const Report&) const = default;
};

// A validated report collection. Label lists are normalised to taxonomy
// order without duplicates, and empty label lists are dropped.
class Dataset {
 public:
  // Throws ValidationError on duplicate ids or labels outside the taxonomy.
  Dataset(Taxonomy taxonomy, std::vector<Report> reports);

  const Taxonomy& taxonomy() const { return taxonomy_; }
  const std::vector<Report>& reports() const { return reports_; }
  std::size_t size() const { return reports_.size(); }

  bool operator==(const Dataset&) const = default;

 private:
  Taxonomy taxonomy_;
  std::vector<Report> reports_;
};

// The reports labeled in one dimension together with their binary labels.
struct DimensionView {
  Dimension dimension = Dimension::kSubject;
  std::vector<std::string> classes;
  std::vector<std::string> ids;
  std::vector<std::string> texts;
  LabelMatrix labels;  // ids.size() x classes.size()

  std::size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }
  DimensionView subset(std::span<const std::size_t> rows) const;
};

// Reads the JSONL report format. Throws ParseError (with line number) on
// malformed lines and ValidationError on unknown classes or duplicate ids.
Dataset load_dataset(const std::filesystem::path& path,
                     const Taxonomy& taxonomy);
Dataset parse_dataset(std::string_view jsonl, const Taxonomy& taxonomy);
std::string dataset_to_jsonl(const Dataset& dataset);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

// Key order: id, text, labels[, scrubbed].
Json report_to_json(const Report& report);

DimensionView dimension_view(const Dataset& dataset, Dimension d);
// Writes a view back out as reports carrying only that dimension's labels.
std::string view_to_jsonl(const DimensionView& view);

// Label occurrences per class, in taxonomy order. A multilabel report counts
// once for each of its classes.
std::vector<std::size_t> class_distribution(const Dataset& dataset,
                                            Dimension d);
std::vector<std::size_t> class_distribution(const DimensionView& view);

struct DimensionTarget {
  // Reports carrying at least one label in this dimension.
  std::size_t labeled_reports = 0;
  // Exact label occurrences per class, aligned with the taxonomy. The excess
  // of their sum over labeled_reports becomes secondary labels.
  std::vector<std::size_t> class_counts;
};

// Parameters of the synthetic corpus generator.
struct CorpusSpec {
  Taxonomy taxonomy = default_taxonomy();
  std::size_t n_reports = 0;
  std::map<Dimension, DimensionTarget> targets;
  std::size_t shared_vocab_size = 2000;
  std::size_t class_vocab_size = 40;
  std::size_t min_words = 30;
  std::size_t max_words = 80;
  // Probability that a word is drawn from one of the report's class
  // vocabularies rather than the shared vocabulary.
  double signal_rate = 0.35;
  double pii_injection_rate = 0.0;
  std::uint64_t seed = 0;

  // Throws ValidationError when the targets cannot be met.
  void validate() const;

  static CorpusSpec from_json(const Json& j);
  Json to_json() const;
};

// 1196 reports; Subject/Criminality/Damage views of 994/943/702 reports with
// sextortion = 299, commercial_purpose = 21 and morphing = 11.
CorpusSpec reference_corpus_spec(std::uint64_t seed = 0);

// Deterministic in `spec`. Class distributions match the targets exactly.
Dataset generate_synthetic(const CorpusSpec& spec);

}  // namespace triage

#endif  // TRIAGE_CORPUS_H_
