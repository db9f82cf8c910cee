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

#include <gtest/gtest.h>

#include <numeric>

#include "triage/anonymize.h"
#include "triage/error.h"

namespace triage {
namespace {

const std::vector<std::string>& subject_classes() {
  static const auto classes = default_taxonomy().classes(Dimension::kSubject);
  return classes;
}

TEST(TaxonomyTest, DefaultHasEightSixFourClasses) {
  const Taxonomy t = default_taxonomy();
  EXPECT_EQ(t.classes(Dimension::kSubject).size(), 8u);
  EXPECT_EQ(t.classes(Dimension::kCriminality).size(), 6u);
  EXPECT_EQ(t.classes(Dimension::kDamage).size(), 4u);
  EXPECT_TRUE(t.class_index(Dimension::kSubject, "sextortion").has_value());
  EXPECT_TRUE(
      t.class_index(Dimension::kCriminality, "commercial_purpose").has_value());
  EXPECT_TRUE(
      t.class_index(Dimension::kCriminality, "intent_of_damage").has_value());
}

TEST(TaxonomyTest, RejectsDuplicateClasses) {
  EXPECT_THROW(Taxonomy({{Dimension::kSubject, {"a", "a"}}}), ValidationError);
  EXPECT_THROW(Taxonomy({{Dimension::kSubject, {}}}), ValidationError);
}

TEST(TaxonomyTest, JsonRoundTrip) {
  const Taxonomy t = default_taxonomy();
  EXPECT_EQ(Taxonomy::from_json(t.to_json()), t);
}

TEST(DimensionTest, KeysRoundTrip) {
  for (Dimension d : kAllDimensions) {
    EXPECT_EQ(parse_dimension(dimension_key(d)), d);
  }
  EXPECT_THROW(parse_dimension("colour"), ValidationError);
}

TEST(LoadDatasetTest, EmptyInputGivesEmptyDataset) {
  EXPECT_EQ(parse_dataset("", default_taxonomy()).size(), 0u);
}

TEST(LoadDatasetTest, ReadsSubjectLabel) {
  const Dataset ds = parse_dataset(
      R"({"id":"r1","text":"hola","labels":{"subject":["sextortion"]}})",
      default_taxonomy());
  ASSERT_EQ(ds.size(), 1u);
  const auto& labels = ds.reports()[0].labels;
  ASSERT_EQ(labels.count(Dimension::kSubject), 1u);
  EXPECT_EQ(labels.at(Dimension::kSubject),
            std::vector<std::string>{"sextortion"});
}

TEST(LoadDatasetTest, UnknownClassNamesDimension) {
  try {
    parse_dataset(
        R"({"id":"r1","text":"x","labels":{"subject":["nonexistent_class"]}})",
        default_taxonomy());
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("nonexistent_class"), std::string::npos) << msg;
    EXPECT_NE(msg.find("subject"), std::string::npos) << msg;
  }
}

TEST(LoadDatasetTest, MalformedLineReportsLineNumber) {
  const std::string jsonl =
      "{\"id\":\"a\",\"text\":\"x\",\"labels\":{}}\n{not json}\n";
  try {
    parse_dataset(jsonl, default_taxonomy());
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LoadDatasetTest, DuplicateIdRejected) {
  const std::string jsonl =
      "{\"id\":\"a\",\"text\":\"x\",\"labels\":{}}\n"
      "{\"id\":\"a\",\"text\":\"y\",\"labels\":{}}\n";
  EXPECT_THROW(parse_dataset(jsonl, default_taxonomy()), ValidationError);
}

TEST(LoadDatasetTest, JsonlRoundTrip) {
  const Dataset ds = generate_synthetic([] {
    CorpusSpec s = reference_corpus_spec(3);
    s.pii_injection_rate = 0.5;
    return s;
  }());
  const Dataset back = parse_dataset(dataset_to_jsonl(ds), ds.taxonomy());
  EXPECT_EQ(back, ds);
}

TEST(DimensionViewTest, UnlabeledDimensionGivesEmptyView) {
  const Dataset ds(default_taxonomy(),
                   {{"a", "t", {{Dimension::kSubject, {"sexting"}}}, false}});
  EXPECT_TRUE(dimension_view(ds, Dimension::kDamage).empty());
}

TEST(DimensionViewTest, OnlyLabeledReportsEnter) {
  const Dataset ds(default_taxonomy(),
                   {{"a", "t", {{Dimension::kSubject, {"sexting"}}}, false},
                    {"b", "t", {{Dimension::kDamage, {"csea_production"}}}, false},
                    {"c", "t", {{Dimension::kSubject, {"grooming"}}}, false}});
  const auto view = dimension_view(ds, Dimension::kSubject);
  ASSERT_EQ(view.size(), 2u);
  EXPECT_EQ(view.ids, (std::vector<std::string>{"a", "c"}));
  EXPECT_EQ(view.labels.cols(), subject_classes().size());
}

TEST(ClassDistributionTest, MultilabelCountsEachClass) {
  const Dataset ds(
      default_taxonomy(),
      {{"a", "t", {{Dimension::kSubject, {"sexting", "grooming"}}}, false}});
  const auto counts = class_distribution(ds, Dimension::kSubject);
  const auto& t = ds.taxonomy();
  EXPECT_EQ(counts[*t.class_index(Dimension::kSubject, "sexting")], 1u);
  EXPECT_EQ(counts[*t.class_index(Dimension::kSubject, "grooming")], 1u);
  EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), std::size_t{0}), 2u);
}

TEST(SyntheticCorpusTest, MatchesReportedStatistics) {
  const Dataset ds = generate_synthetic(reference_corpus_spec(11));
  EXPECT_EQ(ds.size(), 1196u);
  EXPECT_EQ(dimension_view(ds, Dimension::kSubject).size(), 994u);
  EXPECT_EQ(dimension_view(ds, Dimension::kCriminality).size(), 943u);
  EXPECT_EQ(dimension_view(ds, Dimension::kDamage).size(), 702u);

  const auto& t = ds.taxonomy();
  const auto subject = class_distribution(ds, Dimension::kSubject);
  const auto crim = class_distribution(ds, Dimension::kCriminality);
  const std::size_t sextortion =
      subject[*t.class_index(Dimension::kSubject, "sextortion")];
  EXPECT_EQ(sextortion, 299u);
  EXPECT_EQ(*std::max_element(subject.begin(), subject.end()), sextortion);
  EXPECT_EQ(subject[*t.class_index(Dimension::kSubject, "morphing")], 11u);
  const std::size_t commercial =
      crim[*t.class_index(Dimension::kCriminality, "commercial_purpose")];
  EXPECT_EQ(commercial, 21u);
  EXPECT_EQ(*std::min_element(crim.begin(), crim.end()), commercial);
  // Intent of damage covers more than half of the Criminality view.
  EXPECT_GT(crim[*t.class_index(Dimension::kCriminality, "intent_of_damage")] *
                2,
            943u);
}

TEST(SyntheticCorpusTest, SameSeedIsByteIdentical) {
  const auto a = dataset_to_jsonl(generate_synthetic(reference_corpus_spec(5)));
  const auto b = dataset_to_jsonl(generate_synthetic(reference_corpus_spec(5)));
  EXPECT_EQ(a, b);
  const auto c = dataset_to_jsonl(generate_synthetic(reference_corpus_spec(6)));
  EXPECT_NE(a, c);
}

TEST(SyntheticCorpusTest, FullInjectionPlantsIdentifierInEveryReport) {
  CorpusSpec spec = reference_corpus_spec(9);
  spec.pii_injection_rate = 1.0;
  const Dataset ds = generate_synthetic(spec);
  for (const auto& r : ds.reports()) {
    EXPECT_FALSE(find_pii(r.text).empty()) << r.id;
  }
}

TEST(SyntheticCorpusTest, SpecValidation) {
  CorpusSpec spec = reference_corpus_spec();
  spec.targets[Dimension::kDamage].labeled_reports = 5000;
  EXPECT_THROW(spec.validate(), ValidationError);
  spec = reference_corpus_spec();
  spec.min_words = 90;
  EXPECT_THROW(spec.validate(), ValidationError);
}

TEST(SyntheticCorpusTest, SpecJsonRoundTrip) {
  const CorpusSpec spec = reference_corpus_spec(4);
  const CorpusSpec back = CorpusSpec::from_json(spec.to_json());
  EXPECT_EQ(back.to_json(), spec.to_json());
}

}  // namespace
}  // namespace triage
