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

#include "triage/corpus.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "triage/error.h"
#include "triage/rng.h"

namespace triage {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> string_list(const Json& j, std::string_view what,
                                     std::size_t line) {
  if (!j.is_array()) {
    throw ParseError(std::string(what) + " must be an array of strings", line);
  }
  std::vector<std::string> out;
  for (const auto& item : j) {
    if (!item.is_string()) {
      throw ParseError(std::string(what) + " must contain only strings", line);
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::string_view vocabulary_prefix(Dimension d) {
  switch (d) {
    case Dimension::kSubject:
      return "subj";
    case Dimension::kCriminality:
      return "crim";
    case Dimension::kDamage:
      return "dmg";
  }
  return "dim";
}

std::string digits(Rng& rng, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(static_cast<char>('0' + (i == 0 ? 1 + rng.below(9)
                                                  : rng.below(10))));
  }
  return out;
}

// One synthetic identifier of a random category.
std::string synthetic_pii(Rng& rng) {
  switch (rng.below(4)) {
    case 0:
      return "contacto" + digits(rng, 3) + "@correo" + digits(rng, 2) + ".com";
    case 1:
      return "https://red" + digits(rng, 2) + ".co/perfil/" + digits(rng, 4);
    case 2:
      return "+57 3" + digits(rng, 2) + " " + digits(rng, 3) + " " +
             digits(rng, 4);
    default:
      return "cc " + digits(rng, 6);
  }
}

}  // namespace

std::string_view dimension_key(Dimension d) {
  switch (d) {
    case Dimension::kSubject:
      return "subject";
    case Dimension::kCriminality:
      return "criminality";
    case Dimension::kDamage:
      return "damage";
  }
  return "unknown";
}

std::string_view dimension_title(Dimension d) {
  switch (d) {
    case Dimension::kSubject:
      return "Subject";
    case Dimension::kCriminality:
      return "Degree of Criminality";
    case Dimension::kDamage:
      return "Damage";
  }
  return "Unknown";
}

Dimension parse_dimension(std::string_view key) {
  for (Dimension d : kAllDimensions) {
    if (dimension_key(d) == key) return d;
  }
  throw ValidationError("unknown dimension '" + std::string(key) +
                        "' (expected subject, criminality or damage)");
}

Taxonomy::Taxonomy(std::vector<DimensionClasses> dimensions)
    : dimensions_(std::move(dimensions)) {
  std::set<Dimension> seen;
  for (const auto& dim : dimensions_) {
    const std::string key(dimension_key(dim.dimension));
    if (!seen.insert(dim.dimension).second) {
      throw ValidationError("duplicate dimension '" + key + "' in taxonomy");
    }
    if (dim.classes.empty()) {
      throw ValidationError("dimension '" + key + "' has no classes");
    }
    std::unordered_set<std::string> names;
    for (const auto& name : dim.classes) {
      if (name.empty()) {
        throw ValidationError("empty class name in dimension '" + key + "'");
      }
      if (!names.insert(name).second) {
        throw ValidationError("duplicate class '" + name + "' in dimension '" +
                              key + "'");
      }
    }
  }
}

Taxonomy Taxonomy::from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("taxonomy must be a JSON object");
  for (const auto& [key, value] : j.items()) parse_dimension(key);
  std::vector<DimensionClasses> dims;
  for (Dimension d : kAllDimensions) {
    const auto it = j.find(std::string(dimension_key(d)));
    if (it == j.end()) continue;
    dims.push_back({d, string_list(*it, "taxonomy classes", 0)});
  }
  return Taxonomy(std::move(dims));
}

Json Taxonomy::to_json() const {
  Json out = Json::object();
  for (const auto& dim : dimensions_) {
    out[std::string(dimension_key(dim.dimension))] = dim.classes;
  }
  return out;
}

bool Taxonomy::has(Dimension d) const {
  return std::any_of(dimensions_.begin(), dimensions_.end(),
                     [d](const auto& dim) { return dim.dimension == d; });
}

const std::vector<std::string>& Taxonomy::classes(Dimension d) const {
  for (const auto& dim : dimensions_) {
    if (dim.dimension == d) return dim.classes;
  }
  throw ValidationError("dimension '" + std::string(dimension_key(d)) +
                        "' is not in the taxonomy");
}

std::optional<std::size_t> Taxonomy::class_index(Dimension d,
                                                 std::string_view name) const {
  const auto& names = classes(d);
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

bool Taxonomy::operator==(const Taxonomy& other) const {
  if (dimensions_.size() != other.dimensions_.size()) return false;
  for (std::size_t i = 0; i < dimensions_.size(); ++i) {
    if (dimensions_[i].dimension != other.dimensions_[i].dimension ||
        dimensions_[i].classes != other.dimensions_[i].classes) {
      return false;
    }
  }
  return true;
}

Taxonomy default_taxonomy() {
  return Taxonomy({
      {Dimension::kSubject,
       {"sextortion", "grooming", "sexting", "sexual_content_disclosure",
        "sexual_cyberbullying", "morphing", "subject_placeholder_7",
        "subject_placeholder_8"}},
      {Dimension::kCriminality,
       {"intent_of_damage", "commercial_purpose", "criminality_placeholder_3",
        "criminality_placeholder_4", "criminality_placeholder_5",
        "criminality_placeholder_6"}},
      {Dimension::kDamage,
       {"csea_production", "damage_placeholder_2", "damage_placeholder_3",
        "damage_placeholder_4"}},
  });
}

Taxonomy load_taxonomy(const std::filesystem::path& path) {
  try {
    return Taxonomy::from_json(Json::parse(read_file(path)));
  } catch (const Json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Dataset::Dataset(Taxonomy taxonomy, std::vector<Report> reports)
    : taxonomy_(std::move(taxonomy)), reports_(std::move(reports)) {
  std::unordered_set<std::string> ids;
  for (auto& report : reports_) {
    if (!ids.insert(report.id).second) {
      throw ValidationError("duplicate report id '" + report.id + "'");
    }
    for (auto it = report.labels.begin(); it != report.labels.end();) {
      const Dimension d = it->first;
      if (!taxonomy_.has(d)) {
        throw ValidationError("report '" + report.id + "' is labeled in '" +
                              std::string(dimension_key(d)) +
                              "', which the taxonomy lacks");
      }
      std::set<std::size_t> indices;
      for (const auto& name : it->second) {
        const auto index = taxonomy_.class_index(d, name);
        if (!index) {
          throw ValidationError("unknown class '" + name + "' in dimension '" +
                                std::string(dimension_key(d)) +
                                "' (report '" + report.id + "')");
        }
        indices.insert(*index);
      }
      if (indices.empty()) {
        it = report.labels.erase(it);
        continue;
      }
      const auto& names = taxonomy_.classes(d);
      it->second.clear();
      for (std::size_t index : indices) it->second.push_back(names[index]);
      ++it;
    }
  }
}

DimensionView DimensionView::subset(std::span<const std::size_t> rows) const {
  DimensionView out;
  out.dimension = dimension;
  out.classes = classes;
  out.labels = LabelMatrix(0, classes.size());
  for (std::size_t r : rows) {
    out.ids.push_back(ids.at(r));
    out.texts.push_back(texts.at(r));
    out.labels.append_row(labels.row(r));
  }
  return out;
}

Dataset parse_dataset(std::string_view jsonl, const Taxonomy& taxonomy) {
  std::vector<Report> reports;
  std::unordered_set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    std::size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    if (!j.is_object()) throw ParseError("report must be an object", line_no);
    const auto id = j.find("id");
    const auto text = j.find("text");
    if (id == j.end() || !id->is_string()) {
      throw ParseError("missing string field 'id'", line_no);
    }
    if (text == j.end() || !text->is_string()) {
      throw ParseError("missing string field 'text'", line_no);
    }
    Report report;
    report.id = id->get<std::string>();
    report.text = text->get<std::string>();
    if (!ids.insert(report.id).second) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": duplicate report id '" + report.id + "'");
    }
    if (const auto scrubbed = j.find("scrubbed"); scrubbed != j.end()) {
      if (!scrubbed->is_boolean()) {
        throw ParseError("'scrubbed' must be a boolean", line_no);
      }
      report.scrubbed = scrubbed->get<bool>();
    }
    if (const auto labels = j.find("labels"); labels != j.end()) {
      if (!labels->is_object()) {
        throw ParseError("'labels' must be an object", line_no);
      }
      for (const auto& [key, value] : labels->items()) {
        Dimension d;
        try {
          d = parse_dimension(key);
        } catch (const ValidationError& e) {
          throw ValidationError("line " + std::to_string(line_no) + ": " +
                                e.what());
        }
        auto names = string_list(value, "labels." + key, line_no);
        if (!taxonomy.has(d)) {
          throw ValidationError("line " + std::to_string(line_no) +
                                ": dimension '" + key +
                                "' is not in the taxonomy");
        }
        for (const auto& name : names) {
          if (!taxonomy.class_index(d, name)) {
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": unknown class '" + name +
                                  "' in dimension '" + key + "'");
          }
        }
        report.labels[d] = std::move(names);
      }
    }
    reports.push_back(std::move(report));
  }
  return Dataset(taxonomy, std::move(reports));
}

Dataset load_dataset(const std::filesystem::path& path,
                     const Taxonomy& taxonomy) {
  return parse_dataset(read_file(path), taxonomy);
}

Json report_to_json(const Report& report) {
  Json j;
  j["id"] = report.id;
  j["text"] = report.text;
  Json labels = Json::object();
  for (const auto& [d, names] : report.labels) {
    labels[std::string(dimension_key(d))] = names;
  }
  j["labels"] = labels;
  if (report.scrubbed) j["scrubbed"] = true;
  return j;
}

std::string dataset_to_jsonl(const Dataset& dataset) {
  std::string out;
  for (const auto& report : dataset.reports()) {
    out += report_to_json(report).dump();
    out += '\n';
  }
  return out;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << dataset_to_jsonl(dataset);
}

DimensionView dimension_view(const Dataset& dataset, Dimension d) {
  DimensionView view;
  view.dimension = d;
  view.classes = dataset.taxonomy().classes(d);
  view.labels = LabelMatrix(0, view.classes.size());
  std::vector<std::uint8_t> row(view.classes.size());
  for (const auto& report : dataset.reports()) {
    const auto it = report.labels.find(d);
    if (it == report.labels.end()) continue;
    std::fill(row.begin(), row.end(), 0);
    for (const auto& name : it->second) {
      row[*dataset.taxonomy().class_index(d, name)] = 1;
    }
    view.ids.push_back(report.id);
    view.texts.push_back(report.text);
    view.labels.append_row(row);
  }
  return view;
}

std::string view_to_jsonl(const DimensionView& view) {
  std::string out;
  for (std::size_t i = 0; i < view.size(); ++i) {
    Json j;
    j["id"] = view.ids[i];
    j["text"] = view.texts[i];
    std::vector<std::string> names;
    for (std::size_t c = 0; c < view.classes.size(); ++c) {
      if (view.labels(i, c)) names.push_back(view.classes[c]);
    }
    Json labels = Json::object();
    labels[std::string(dimension_key(view.dimension))] = names;
    j["labels"] = labels;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<std::size_t> class_distribution(const Dataset& dataset,
                                            Dimension d) {
  const auto& names = dataset.taxonomy().classes(d);
  std::vector<std::size_t> counts(names.size(), 0);
  for (const auto& report : dataset.reports()) {
    const auto it = report.labels.find(d);
    if (it == report.labels.end()) continue;
    for (const auto& name : it->second) {
      ++counts[*dataset.taxonomy().class_index(d, name)];
    }
  }
  return counts;
}

std::vector<std::size_t> class_distribution(const DimensionView& view) {
  std::vector<std::size_t> counts(view.classes.size(), 0);
  for (std::size_t r = 0; r < view.size(); ++r) {
    for (std::size_t c = 0; c < view.classes.size(); ++c) {
      counts[c] += view.labels(r, c);
    }
  }
  return counts;
}

void CorpusSpec::validate() const {
  if (!(pii_injection_rate >= 0.0 && pii_injection_rate <= 1.0)) {
    throw ValidationError("pii_injection_rate must lie in [0, 1]");
  }
  if (!(signal_rate >= 0.0 && signal_rate <= 1.0)) {
    throw ValidationError("signal_rate must lie in [0, 1]");
  }
  if (min_words == 0 || min_words > max_words) {
    throw ValidationError("need 1 <= min_words <= max_words");
  }
  if (shared_vocab_size == 0 || class_vocab_size == 0) {
    throw ValidationError("vocabulary sizes must be positive");
  }
  for (const auto& [d, target] : targets) {
    const std::string key(dimension_key(d));
    const auto& names = taxonomy.classes(d);
    if (target.class_counts.size() != names.size()) {
      throw ValidationError("dimension '" + key + "' needs " +
                            std::to_string(names.size()) + " class counts");
    }
    if (target.labeled_reports > n_reports) {
      throw ValidationError("dimension '" + key +
                            "' labels more reports than n_reports");
    }
    const std::size_t total = std::accumulate(
        target.class_counts.begin(), target.class_counts.end(), std::size_t{0});
    if (total < target.labeled_reports) {
      throw ValidationError("dimension '" + key + "': class counts sum to " +
                            std::to_string(total) + " < labeled_reports " +
                            std::to_string(target.labeled_reports));
    }
    for (std::size_t c = 0; c < names.size(); ++c) {
      if (target.class_counts[c] > target.labeled_reports) {
        throw ValidationError("class '" + names[c] + "' count " +
                              std::to_string(target.class_counts[c]) +
                              " exceeds the labeled reports of '" + key + "'");
      }
    }
  }
}

CorpusSpec CorpusSpec::from_json(const Json& j) {
  CorpusSpec spec;
  if (!j.is_object()) throw ParseError("corpus spec must be a JSON object");
  if (j.contains("taxonomy")) spec.taxonomy = Taxonomy::from_json(j["taxonomy"]);
  spec.n_reports = j.at("n_reports").get<std::size_t>();
  spec.shared_vocab_size = j.value("shared_vocab_size", spec.shared_vocab_size);
  spec.class_vocab_size = j.value("class_vocab_size", spec.class_vocab_size);
  spec.min_words = j.value("min_words", spec.min_words);
  spec.max_words = j.value("max_words", spec.max_words);
  spec.signal_rate = j.value("signal_rate", spec.signal_rate);
  spec.pii_injection_rate =
      j.value("pii_injection_rate", spec.pii_injection_rate);
  spec.seed = j.value("seed", spec.seed);
  if (j.contains("targets")) {
    for (const auto& [key, value] : j["targets"].items()) {
      DimensionTarget target;
      target.labeled_reports = value.at("labeled_reports").get<std::size_t>();
      target.class_counts =
          value.at("class_counts").get<std::vector<std::size_t>>();
      spec.targets[parse_dimension(key)] = std::move(target);
    }
  }
  spec.validate();
  return spec;
}

Json CorpusSpec::to_json() const {
  Json j;
  j["taxonomy"] = taxonomy.to_json();
  j["n_reports"] = n_reports;
  Json t = Json::object();
  for (const auto& [d, target] : targets) {
    t[std::string(dimension_key(d))] = {
        {"labeled_reports", target.labeled_reports},
        {"class_counts", target.class_counts}};
  }
  j["targets"] = t;
  j["shared_vocab_size"] = shared_vocab_size;
  j["class_vocab_size"] = class_vocab_size;
  j["min_words"] = min_words;
  j["max_words"] = max_words;
  j["signal_rate"] = signal_rate;
  j["pii_injection_rate"] = pii_injection_rate;
  j["seed"] = seed;
  return j;
}

CorpusSpec reference_corpus_spec(std::uint64_t seed) {
  CorpusSpec spec;
  spec.taxonomy = default_taxonomy();
  spec.n_reports = 1196;
  // Named counts are fixed; the placeholder classes fill the remainder and
  // add a few secondary labels per dimension.
  spec.targets[Dimension::kSubject] = {994,
                                       {299, 230, 150, 140, 110, 11, 60, 44}};
  spec.targets[Dimension::kCriminality] = {943, {520, 21, 180, 120, 80, 52}};
  spec.targets[Dimension::kDamage] = {702, {140, 300, 200, 90}};
  spec.seed = seed;
  return spec;
}

Dataset generate_synthetic(const CorpusSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n_reports;
  std::vector<Report> reports(n);
  for (std::size_t i = 0; i < n; ++i) {
    reports[i].id = "syn" + std::to_string(i);
  }

  // Label assignment: each labeled report first receives one class drawn
  // from the shuffled pool of class slots; leftover slots become secondary
  // labels on distinct reports that lack that class.
  for (const auto& dim : spec.taxonomy.dimensions()) {
    const auto it = spec.targets.find(dim.dimension);
    if (it == spec.targets.end() || it->second.labeled_reports == 0) continue;
    const DimensionTarget& target = it->second;
    Rng rng(derive_seed(spec.seed,
                        "labels/" + std::string(dimension_key(dim.dimension))));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order.begin(), order.end());
    order.resize(target.labeled_reports);
    std::sort(order.begin(), order.end());

    std::vector<std::size_t> slots;
    for (std::size_t c = 0; c < target.class_counts.size(); ++c) {
      slots.insert(slots.end(), target.class_counts[c], c);
    }
    rng.shuffle(slots.begin(), slots.end());

    const std::size_t n_classes = dim.classes.size();
    std::vector<std::vector<std::uint8_t>> has(
        order.size(), std::vector<std::uint8_t>(n_classes, 0));
    std::vector<std::size_t> remaining = target.class_counts;
    for (std::size_t r = 0; r < order.size(); ++r) {
      has[r][slots[r]] = 1;
      --remaining[slots[r]];
    }
    for (std::size_t c = 0; c < n_classes; ++c) {
      if (remaining[c] == 0) continue;
      std::vector<std::size_t> candidates;
      for (std::size_t r = 0; r < order.size(); ++r) {
        if (!has[r][c]) candidates.push_back(r);
      }
      rng.shuffle(candidates.begin(), candidates.end());
      for (std::size_t k = 0; k < remaining[c]; ++k) has[candidates[k]][c] = 1;
    }
    for (std::size_t r = 0; r < order.size(); ++r) {
      auto& names = reports[order[r]].labels[dim.dimension];
      for (std::size_t c = 0; c < n_classes; ++c) {
        if (has[r][c]) names.push_back(dim.classes[c]);
      }
    }
  }

  // Text: each word comes from the class vocabulary of one of the report's
  // labels with probability signal_rate, otherwise from the shared pool.
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(derive_seed(spec.seed, "text"), i));
    std::vector<std::pair<Dimension, std::size_t>> label_refs;
    for (const auto& [d, names] : reports[i].labels) {
      for (const auto& name : names) {
        label_refs.emplace_back(d, *spec.taxonomy.class_index(d, name));
      }
    }
    const std::size_t length =
        spec.min_words + rng.below(spec.max_words - spec.min_words + 1);
    std::vector<std::string> words;
    words.reserve(length + 2);
    for (std::size_t w = 0; w < length; ++w) {
      if (!label_refs.empty() && rng.uniform() < spec.signal_rate) {
        const auto& [d, c] = label_refs[rng.below(label_refs.size())];
        words.push_back(std::string(vocabulary_prefix(d)) + std::to_string(c) +
                        "t" + std::to_string(rng.below(spec.class_vocab_size)));
      } else {
        words.push_back("w" +
                        std::to_string(rng.below(spec.shared_vocab_size)));
      }
    }
    if (spec.pii_injection_rate > 0.0 &&
        rng.uniform() < spec.pii_injection_rate) {
      const std::size_t items = 1 + rng.below(2);
      for (std::size_t k = 0; k < items; ++k) {
        const std::size_t at = rng.below(words.size() + 1);
        words.insert(words.begin() + static_cast<std::ptrdiff_t>(at),
                     synthetic_pii(rng));
      }
    }
    std::string text;
    for (const auto& word : words) {
      if (!text.empty()) text += ' ';
      text += word;
    }
    reports[i].text = std::move(text);
  }
  return Dataset(spec.taxonomy, std::move(reports));
}

}  // namespace triage
