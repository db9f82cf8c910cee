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

#ifndef TRIAGE_TEXT_H_
#define TRIAGE_TEXT_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace triage {

// Lowercases (ASCII and Latin-1 letters), splits on whitespace and
// punctuation, and keeps scrubber placeholders such as "<EMAIL>" intact.
std::vector<std::string> tokenize(std::string_view text);

// Sorted by index, no duplicate indices.
struct SparseVector {
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  std::size_t nnz() const { return index.size(); }
  bool operator==(const SparseVector&) const = default;
};

// fnv1a64(token) mod feature_dim.
std::uint32_t feature_bucket(std::string_view token, std::size_t feature_dim);

// Hashed term frequencies, L2-normalised when nonzero.
SparseVector featurize(std::span<const std::string> tokens,
                       std::size_t feature_dim);

}  // namespace triage

#endif  // TRIAGE_TEXT_H_
