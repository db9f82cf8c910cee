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

#ifndef TRIAGE_ANONYMIZE_H_
#define TRIAGE_ANONYMIZE_H_

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "triage/json.h"
#include "triage/corpus.h"

namespace triage {

// Listed in matching priority order.
enum class PiiCategory { kUrl, kEmail, kPhone, kIdNumber };

inline constexpr std::array<PiiCategory, 4> kPiiCategories = {
    PiiCategory::kUrl, PiiCategory::kEmail, PiiCategory::kPhone,
    PiiCategory::kIdNumber};

// "<URL>", "<EMAIL>", "<PHONE>", "<ID>".
std::string_view placeholder(PiiCategory category);
// "url", "email", "phone", "id_number".
std::string_view category_key(PiiCategory category);

// Byte range [begin, end) of the original text.
struct PiiSpan {
  PiiCategory category;
  std::size_t begin;
  std::size_t end;

  bool operator==(const PiiSpan&) const = default;
};

struct ScrubReport {
  std::array<std::size_t, 4> counts{};
  // Sorted, non-overlapping. Left empty in aggregate reports.
  std::vector<PiiSpan> spans;

  std::size_t count(PiiCategory category) const {
    return counts[static_cast<std::size_t>(category)];
  }
  std::size_t total() const;
  // Adds counts only; spans refer to different texts and are not merged.
  ScrubReport& operator+=(const ScrubReport& other);

  Json to_json() const;
};

struct ScrubResult {
  std::string text;
  ScrubReport report;
};

// Non-overlapping identifier matches in `text`, in position order. Earlier
// categories win overlaps. Placeholders never match.
std::vector<PiiSpan> find_pii(std::string_view text);

// Replaces every identifier with its placeholder. Text outside the matched
// spans is preserved byte for byte, and the result has no residual matches,
// so scrub(scrub(t).text).text == scrub(t).text.
ScrubResult scrub(std::string_view text);

struct DatasetScrubResult {
  Dataset dataset;
  ScrubReport aggregate;
};

// Scrubs every report and sets its `scrubbed` flag. Ids and labels are left
// untouched. `jobs` > 1 splits reports across threads; output is identical.
DatasetScrubResult scrub_dataset(const Dataset& dataset, std::size_t jobs = 1);

}  // namespace triage

#endif  // TRIAGE_ANONYMIZE_H_
