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

#include "triage/augment.h"

#include <cmath>

#include "triage/anonymize.h"
#include "triage/error.h"

namespace triage {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

void split_placeholders(std::string_view chunk, std::vector<std::string>& out) {
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < chunk.size()) {
    std::size_t matched = 0;
    if (chunk[i] == '<') {
      for (PiiCategory c : kPiiCategories) {
        const auto token = placeholder(c);
        if (chunk.substr(i, token.size()) == token) {
          matched = token.size();
          break;
        }
      }
    }
    if (matched == 0) {
      ++i;
      continue;
    }
    if (i > start) out.emplace_back(chunk.substr(start, i - start));
    out.emplace_back(chunk.substr(i, matched));
    i += matched;
    start = i;
  }
  if (start < chunk.size()) out.emplace_back(chunk.substr(start));
}

}  // namespace

void AugmentConfig::validate() const {
  if (!(adr > 0.0 && adr < 1.0)) {
    throw ValidationError("adr must lie in (0, 1), got " + std::to_string(adr));
  }
  if (!(af >= 1.0) || !std::isfinite(af)) {
    throw ValidationError("af must be >= 1, got " + std::to_string(af));
  }
}

AugmentConfig AugmentConfig::from_json(const Json& j) {
  AugmentConfig cfg;
  cfg.adr = j.value("adr", cfg.adr);
  cfg.af = j.value("af", cfg.af);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.validate();
  return cfg;
}

Json AugmentConfig::to_json() const {
  return {{"adr", adr}, {"af", af}, {"seed", seed}};
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) split_placeholders(text.substr(start, i - start), words);
  }
  return words;
}

std::vector<std::string> delete_words(std::span<const std::string> tokens,
                                      double adr, Rng& rng) {
  if (tokens.empty()) throw ValidationError("cannot delete from an empty text");
  if (!(adr > 0.0 && adr < 1.0)) {
    throw ValidationError("adr must lie in (0, 1)");
  }
  std::vector<std::string> kept;
  for (const auto& token : tokens) {
    if (rng.uniform() >= adr) kept.push_back(token);
  }
  if (kept.empty()) kept.push_back(tokens[rng.below(tokens.size())]);
  return kept;
}

std::size_t augmented_size(std::size_t n, double af) {
  return static_cast<std::size_t>(
      std::floor(af * static_cast<double>(n) + 0.5));
}

DimensionView augment_dataset(const DimensionView& view,
                              const AugmentConfig& cfg) {
  if (view.empty()) throw ValidationError("cannot augment an empty view");
  cfg.validate();
  const std::size_t extra = augmented_size(view.size(), cfg.af) - view.size();
  DimensionView out = view;
  if (extra == 0) return out;

  std::vector<std::vector<std::string>> words(view.size());
  std::vector<std::size_t> eligible;
  for (std::size_t r = 0; r < view.size(); ++r) {
    words[r] = split_words(view.texts[r]);
    if (!words[r].empty()) eligible.push_back(r);
  }
  if (eligible.empty()) {
    throw ValidationError("cannot augment: every report text is empty");
  }
  for (std::size_t k = 0; k < extra; ++k) {
    Rng rng(derive_seed(cfg.seed, k));
    const std::size_t source = eligible[rng.below(eligible.size())];
    const auto kept = delete_words(words[source], cfg.adr, rng);
    std::string text;
    for (const auto& w : kept) {
      if (!text.empty()) text += ' ';
      text += w;
    }
    out.ids.push_back(view.ids[source] + "#aug" + std::to_string(k));
    out.texts.push_back(std::move(text));
    out.labels.append_row(view.labels.row(source));
  }
  return out;
}

}  // namespace triage
