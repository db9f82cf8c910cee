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

#ifndef TRIAGE_SPLIT_H_
#define TRIAGE_SPLIT_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "triage/json.h"
#include "triage/corpus.h"

namespace triage {

// Fold index per report, aligned with the view the assignment was made for.
struct FoldAssignment {
  std::size_t k = 2;
  std::vector<std::string> ids;
  std::vector<std::size_t> fold;

  // Throws ValidationError for an unknown id.
  std::size_t fold_of(const std::string& id) const;
  // Rows of `view` in fold f / outside fold f, looked up by id.
  std::vector<std::size_t> rows_in_fold(const DimensionView& view,
                                        std::size_t f) const;
  std::vector<std::size_t> rows_outside_fold(const DimensionView& view,
                                             std::size_t f) const;
  std::vector<std::size_t> fold_sizes() const;

  // {"k": k, "assignment": {id: fold, ...}}
  Json to_json() const;
  static FoldAssignment from_json(const Json& j);
};

// Multilabel-stratified k-fold split. Fold sizes differ by at most one.
// Reports are placed label by label, rarest remaining label first; each goes
// to the non-full fold with the largest remaining demand for that label,
// ties broken by the most remaining capacity and then by the seeded RNG.
// Swaps between folds then reduce the squared deviation of every class count
// from its even share, leaving fold sizes unchanged.
// Throws ValidationError if k < 2 or the view has fewer than k reports.
FoldAssignment stratified_kfold(const DimensionView& view, std::size_t k,
                                std::uint64_t seed);

struct StratificationReport {
  std::vector<std::vector<std::size_t>> counts;  // class x fold
  std::vector<std::size_t> fold_sizes;
  std::vector<std::size_t> class_delta;  // max - min count over folds
  std::size_t max_delta = 0;

  Json to_json(const std::vector<std::string>& classes) const;
};

// Throws ValidationError if a view report is missing from the assignment.
StratificationReport verify_stratification(const DimensionView& view,
                                           const FoldAssignment& folds);

}  // namespace triage

#endif  // TRIAGE_SPLIT_H_
