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

#include "triage/anonymize.h"

#include <algorithm>
#include <regex>
#include <thread>

namespace triage {
namespace {

bool is_ascii_alnum(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z');
}

bool is_trailing_punct(char c) {
  return std::string_view(".,;:!?)]}").find(c) != std::string_view::npos;
}

struct Pattern {
  PiiCategory category;
  std::regex regex;
  // Characters that may not immediately precede a match.
  std::string_view forbidden_before;
  bool forbid_alnum_before;
  bool trim_trailing_punct;
};

// Lookahead enforces the right-hand boundary inside the regex so greedy
// digit runs back off instead of failing; the left-hand boundary is checked
// by hand because ECMAScript regexes have no lookbehind.
const std::vector<Pattern>& patterns() {
  static const std::vector<Pattern> kPatterns = [] {
    const auto flags = std::regex::ECMAScript | std::regex::optimize;
    std::vector<Pattern> p;
    p.push_back({PiiCategory::kUrl,
                 std::regex(R"((?:[Hh][Tt][Tt][Pp][Ss]?|[Ff][Tt][Pp])://[^\s<>"']+|[Ww][Ww][Ww]\.[^\s<>"']+)",
                            flags),
                 "", true, true});
    p.push_back(
        {PiiCategory::kUrl,
         std::regex(
             R"([A-Za-z0-9](?:[A-Za-z0-9-]*[A-Za-z0-9])?(?:\.[A-Za-z0-9-]+)*\.(?:com|co|org|net|edu|gov|io|me|info|biz|mx|es|ar|br|cl|pe|ec|ve|ly|tv|app)(?![A-Za-z0-9@._%+-])(?:/[^\s<>"']*)?)",
             flags | std::regex::icase),
         "@._%+-", true, true});
    p.push_back(
        {PiiCategory::kEmail,
         std::regex(
             R"([A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,}(?![A-Za-z0-9-]))",
             flags),
         "", false, false});
    p.push_back(
        {PiiCategory::kPhone,
         std::regex(
             R"((?:\+\d{1,3}[ .-]?)?(?:\(\d{1,4}\)[ .-]?)?\d(?:[ .-]?\d){6,11}(?![0-9A-Za-z]))",
             flags),
         "+", true, false});
    p.push_back({PiiCategory::kIdNumber,
                 std::regex(R"(\d{6,11}(?![0-9A-Za-z]))", flags), "", true,
                 false});
    return p;
  }();
  return kPatterns;
}

bool overlaps(const PiiSpan& a, std::size_t begin, std::size_t end) {
  return a.begin < end && begin < a.end;
}

// A placeholder in the current text and the original bytes it stands for.
struct Placeholder {
  PiiCategory category;
  std::size_t current_begin;
  std::size_t current_end;
  std::size_t original_begin;
  std::size_t original_end;
};

std::size_t to_original(const std::vector<Placeholder>& placed, std::size_t pos,
                        bool is_end) {
  std::ptrdiff_t shift = 0;
  for (const auto& p : placed) {
    if (p.current_begin < pos && pos < p.current_end) {
      return is_end ? p.original_end : p.original_begin;
    }
    if (p.current_end <= pos) {
      shift += static_cast<std::ptrdiff_t>(p.original_end - p.original_begin) -
               static_cast<std::ptrdiff_t>(p.current_end - p.current_begin);
    }
  }
  return static_cast<std::size_t>(static_cast<std::ptrdiff_t>(pos) + shift);
}

}  // namespace

std::string_view placeholder(PiiCategory category) {
  switch (category) {
    case PiiCategory::kUrl:
      return "<URL>";
    case PiiCategory::kEmail:
      return "<EMAIL>";
    case PiiCategory::kPhone:
      return "<PHONE>";
    case PiiCategory::kIdNumber:
      return "<ID>";
  }
  return "<PII>";
}

std::string_view category_key(PiiCategory category) {
  switch (category) {
    case PiiCategory::kUrl:
      return "url";
    case PiiCategory::kEmail:
      return "email";
    case PiiCategory::kPhone:
      return "phone";
    case PiiCategory::kIdNumber:
      return "id_number";
  }
  return "unknown";
}

std::size_t ScrubReport::total() const {
  std::size_t sum = 0;
  for (std::size_t c : counts) sum += c;
  return sum;
}

ScrubReport& ScrubReport::operator+=(const ScrubReport& other) {
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  return *this;
}

Json ScrubReport::to_json() const {
  Json j;
  for (PiiCategory c : kPiiCategories) j[std::string(category_key(c))] = count(c);
  j["total"] = total();
  if (!spans.empty()) {
    Json list = Json::array();
    for (const auto& s : spans) {
      list.push_back({{"category", category_key(s.category)},
                      {"begin", s.begin},
                      {"end", s.end}});
    }
    j["spans"] = list;
  }
  return j;
}

std::vector<PiiSpan> find_pii(std::string_view text) {
  std::vector<PiiSpan> accepted;
  const char* const base = text.data();
  for (const auto& pattern : patterns()) {
    std::size_t pos = 0;
    std::cmatch m;
    while (pos < text.size()) {
      const auto flags = pos == 0 ? std::regex_constants::match_default
                                  : std::regex_constants::match_prev_avail;
      if (!std::regex_search(base + pos, base + text.size(), m, pattern.regex,
                             flags)) {
        break;
      }
      const std::size_t begin = pos + static_cast<std::size_t>(m.position(0));
      std::size_t end = begin + static_cast<std::size_t>(m.length(0));
      if (pattern.trim_trailing_punct) {
        while (end > begin + 1 && is_trailing_punct(text[end - 1])) --end;
      }
      if (begin > 0) {
        const char prev = text[begin - 1];
        if ((pattern.forbid_alnum_before && is_ascii_alnum(prev)) ||
            pattern.forbidden_before.find(prev) != std::string_view::npos) {
          pos = begin + 1;
          continue;
        }
      }
      const auto clash =
          std::find_if(accepted.begin(), accepted.end(),
                       [&](const PiiSpan& s) { return overlaps(s, begin, end); });
      if (clash != accepted.end()) {
        pos = std::max(begin + 1, clash->end);
        continue;
      }
      accepted.push_back({pattern.category, begin, end});
      pos = end;
    }
  }
  std::sort(accepted.begin(), accepted.end(),
            [](const PiiSpan& a, const PiiSpan& b) { return a.begin < b.begin; });
  return accepted;
}

ScrubResult scrub(std::string_view text) {
  std::string current(text);
  std::vector<Placeholder> placed;
  // Replacement can in principle expose a new match; repeat to a fixed point.
  for (int round = 0; round < 16; ++round) {
    const auto spans = find_pii(current);
    if (spans.empty()) break;

    std::vector<Placeholder> next;
    std::string rebuilt;
    std::size_t cursor = 0;
    auto carry_over = [&](std::size_t from, std::size_t to) {
      // Copies current[from, to) and keeps placeholders that lie inside it.
      for (const auto& p : placed) {
        if (p.current_begin >= from && p.current_end <= to) {
          Placeholder moved = p;
          moved.current_begin = rebuilt.size() + (p.current_begin - from);
          moved.current_end = moved.current_begin + (p.current_end -
                                                     p.current_begin);
          next.push_back(moved);
        }
      }
      rebuilt.append(current, from, to - from);
    };
    for (const auto& span : spans) {
      carry_over(cursor, span.begin);
      const auto token = placeholder(span.category);
      next.push_back({span.category, rebuilt.size(),
                      rebuilt.size() + token.size(),
                      to_original(placed, span.begin, false),
                      to_original(placed, span.end, true)});
      rebuilt.append(token);
      cursor = span.end;
    }
    carry_over(cursor, current.size());
    current = std::move(rebuilt);
    placed = std::move(next);
  }

  ScrubResult result;
  result.text = std::move(current);
  for (const auto& p : placed) {
    result.report.spans.push_back(
        {p.category, p.original_begin, p.original_end});
    ++result.report.counts[static_cast<std::size_t>(p.category)];
  }
  std::sort(result.report.spans.begin(), result.report.spans.end(),
            [](const PiiSpan& a, const PiiSpan& b) { return a.begin < b.begin; });
  return result;
}

DatasetScrubResult scrub_dataset(const Dataset& dataset, std::size_t jobs) {
  std::vector<Report> reports = dataset.reports();
  std::vector<ScrubReport> per_report(reports.size());
  auto work = [&](std::size_t first, std::size_t last) {
    for (std::size_t i = first; i < last; ++i) {
      auto result = scrub(reports[i].text);
      reports[i].text = std::move(result.text);
      reports[i].scrubbed = true;
      per_report[i] = std::move(result.report);
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, reports.size()));
  if (jobs == 1) {
    work(0, reports.size());
  } else {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (reports.size() + jobs - 1) / jobs;
    for (std::size_t first = 0; first < reports.size(); first += chunk) {
      workers.emplace_back(work, first, std::min(reports.size(), first + chunk));
    }
  }
  ScrubReport aggregate;
  for (const auto& r : per_report) aggregate += r;
  return {Dataset(dataset.taxonomy(), std::move(reports)), aggregate};
}

}  // namespace triage
