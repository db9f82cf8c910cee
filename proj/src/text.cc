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

#include "triage/text.h"

#include <cctype>
#include <cmath>
#include <map>

#include "triage/anonymize.h"
#include "triage/hash.h"

namespace triage {
namespace {

// Length of the placeholder starting at text[pos], or 0.
std::size_t placeholder_at(std::string_view text, std::size_t pos) {
  if (text[pos] != '<') return 0;
  for (PiiCategory c : kPiiCategories) {
    const auto token = placeholder(c);
    if (text.substr(pos, token.size()) == token) return token.size();
  }
  return 0;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (const std::size_t n = placeholder_at(text, i)) {
      flush();
      tokens.emplace_back(text.substr(i, n));
      i += n;
    } else if (c < 0x80) {
      if (std::isalnum(c)) {
        current.push_back(static_cast<char>(std::tolower(c)));
      } else {
        flush();
      }
      ++i;
    } else if (c == 0xC2) {
      // U+0080..U+00BF: Latin-1 punctuation and symbols (¿ ¡ « » ...).
      flush();
      i += 2;
    } else if (c == 0xC3 && i + 1 < text.size()) {
      auto next = static_cast<unsigned char>(text[i + 1]);
      // U+00C0..U+00DE are uppercase letters except × (U+00D7).
      if (next >= 0x80 && next <= 0x9E && next != 0x97) next += 0x20;
      if (next == 0x97 || next == 0xB7) {
        flush();  // × and ÷
      } else {
        current.push_back(static_cast<char>(c));
        current.push_back(static_cast<char>(next));
      }
      i += 2;
    } else {
      // Any other multibyte sequence is treated as part of a word.
      current.push_back(static_cast<char>(c));
      ++i;
    }
  }
  flush();
  return tokens;
}

std::uint32_t feature_bucket(std::string_view token, std::size_t feature_dim) {
  return static_cast<std::uint32_t>(fnv1a64(token) % feature_dim);
}

SparseVector featurize(std::span<const std::string> tokens,
                       std::size_t feature_dim) {
  std::map<std::uint32_t, double> counts;
  for (const auto& token : tokens) counts[feature_bucket(token, feature_dim)] += 1;
  SparseVector out;
  double norm_sq = 0.0;
  for (const auto& [index, count] : counts) norm_sq += count * count;
  const double scale = norm_sq > 0.0 ? 1.0 / std::sqrt(norm_sq) : 0.0;
  out.index.reserve(counts.size());
  out.value.reserve(counts.size());
  for (const auto& [index, count] : counts) {
    out.index.push_back(index);
    out.value.push_back(count * scale);
  }
  return out;
}

}  // namespace triage
