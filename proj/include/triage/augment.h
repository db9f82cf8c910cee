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

#ifndef TRIAGE_AUGMENT_H_
#define TRIAGE_AUGMENT_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "triage/json.h"
#include "triage/corpus.h"
#include "triage/rng.h"

namespace triage {

struct AugmentConfig {
  // Augmentation deletion rate: per-word deletion probability, in (0, 1).
  double adr = 0.1;
  // Augmentation factor: output size is round(af * input size), af >= 1.
  double af = 1.0;
  std::uint64_t seed = 0;

  // Throws ValidationError.
  void validate() const;

  static AugmentConfig from_json(const Json& j);
  Json to_json() const;
  bool operator==(const AugmentConfig&) const = default;
};

// Whitespace-delimited words; placeholders glued to neighbouring text are
// split off so they survive or vanish as one unit.
std::vector<std::string> split_words(std::string_view text);

// Drops each token independently with probability `adr`, keeping order. If
// every token is drawn for deletion, one uniformly chosen token survives.
// Throws ValidationError on an empty token list or adr outside (0, 1).
std::vector<std::string> delete_words(std::span<const std::string> tokens,
                                      double adr, Rng& rng);

// round(af * n) with ties rounded up.
std::size_t augmented_size(std::size_t n, double af);

// Keeps every original row and appends round(af * n) - n augmented copies of
// uniformly drawn sources (with replacement). Copy k gets id
// "<source_id>#aug<k>", the source's labels, and its own RNG stream derived
// from (cfg.seed, k). Sources with no words are never drawn.
DimensionView augment_dataset(const DimensionView& view,
                              const AugmentConfig& cfg);

}  // namespace triage

#endif  // TRIAGE_AUGMENT_H_
