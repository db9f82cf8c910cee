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

#include "triage/split.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "triage/error.h"
#include "triage/rng.h"

namespace triage {

std::size_t FoldAssignment::fold_of(const std::string& id) const {
  const auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) {
    throw ValidationError("report '" + id + "' has no fold assignment");
  }
  return fold[static_cast<std::size_t>(it - ids.begin())];
}

namespace {

std::vector<std::size_t> rows_where(const FoldAssignment& fa,
                                    const DimensionView& view, std::size_t f,
                                    bool inside) {
  std::unordered_map<std::string, std::size_t> lookup;
  for (std::size_t i = 0; i < fa.ids.size(); ++i) lookup[fa.ids[i]] = fa.fold[i];
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < view.size(); ++r) {
    const auto it = lookup.find(view.ids[r]);
    if (it == lookup.end()) {
      throw ValidationError("report '" + view.ids[r] +
                            "' has no fold assignment");
    }
    if ((it->second == f) == inside) rows.push_back(r);
  }
  return rows;
}

// Steepest-descent swaps between folds. Each swap exchanges two reports with
// different label sets, so fold sizes stay fixed, and is taken only if it
// lowers sum over (class, fold) of (count - total / k)^2. Reports are grouped
// by label set, since swapping two reports with the same set changes nothing.
void refine(const DimensionView& view, std::size_t k,
            std::vector<std::size_t>& fold, Rng& rng) {
  const std::size_t n_classes = view.classes.size();
  std::vector<std::vector<std::uint8_t>> signatures;
  std::vector<std::size_t> signature_of(view.size());
  for (std::size_t r = 0; r < view.size(); ++r) {
    const auto row = view.labels.row(r);
    std::vector<std::uint8_t> sig(row.begin(), row.end());
    auto it = std::find(signatures.begin(), signatures.end(), sig);
    if (it == signatures.end()) {
      signatures.push_back(std::move(sig));
      it = signatures.end() - 1;
    }
    signature_of[r] = static_cast<std::size_t>(it - signatures.begin());
  }
  const std::size_t n_sig = signatures.size();
  // members[f][s]: rows of fold f with signature s.
  std::vector<std::vector<std::vector<std::size_t>>> members(
      k, std::vector<std::vector<std::size_t>>(n_sig));
  std::vector<std::vector<long>> count(k, std::vector<long>(n_classes, 0));
  for (std::size_t r = 0; r < view.size(); ++r) {
    members[fold[r]][signature_of[r]].push_back(r);
    for (std::size_t c = 0; c < n_classes; ++c) count[fold[r]][c] += view.labels(r, c);
  }

  // Twice the change of the objective, kept in integers:
  // sum_c 2 d_c (count_f - count_g) + 2 d_c^2, where d = sig_y - sig_x.
  auto gain = [&](std::size_t f, std::size_t g, std::size_t sx, std::size_t sy) {
    long total = 0;
    for (std::size_t c = 0; c < n_classes; ++c) {
      const long d = static_cast<long>(signatures[sy][c]) - signatures[sx][c];
      total += d * (count[f][c] - count[g][c]) + d * d;
    }
    return total;
  };

  const std::size_t max_swaps = 4 * view.size();
  for (std::size_t step = 0; step < max_swaps; ++step) {
    long best = 0;
    std::size_t bf = 0, bg = 0, bx = 0, by = 0;
    for (std::size_t f = 0; f < k; ++f) {
      for (std::size_t g = f + 1; g < k; ++g) {
        for (std::size_t sx = 0; sx < n_sig; ++sx) {
          if (members[f][sx].empty()) continue;
          for (std::size_t sy = 0; sy < n_sig; ++sy) {
            if (sy == sx || members[g][sy].empty()) continue;
            const long v = gain(f, g, sx, sy);
            if (v < best) {
              best = v;
              bf = f, bg = g, bx = sx, by = sy;
            }
          }
        }
      }
    }
    if (best >= 0) break;
    auto& from_f = members[bf][bx];
    auto& from_g = members[bg][by];
    const std::size_t ix = rng.below(from_f.size());
    const std::size_t iy = rng.below(from_g.size());
    const std::size_t x = from_f[ix];
    const std::size_t y = from_g[iy];
    from_f.erase(from_f.begin() + static_cast<std::ptrdiff_t>(ix));
    from_g.erase(from_g.begin() + static_cast<std::ptrdiff_t>(iy));
    members[bf][by].push_back(y);
    members[bg][bx].push_back(x);
    fold[x] = bg;
    fold[y] = bf;
    for (std::size_t c = 0; c < n_classes; ++c) {
      const long d = static_cast<long>(signatures[by][c]) - signatures[bx][c];
      count[bf][c] += d;
      count[bg][c] -= d;
    }
  }
}

}  // namespace

std::vector<std::size_t> FoldAssignment::rows_in_fold(const DimensionView& view,
                                                      std::size_t f) const {
  return rows_where(*this, view, f, true);
}

std::vector<std::size_t> FoldAssignment::rows_outside_fold(
    const DimensionView& view, std::size_t f) const {
  return rows_where(*this, view, f, false);
}

std::vector<std::size_t> FoldAssignment::fold_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t f : fold) ++sizes[f];
  return sizes;
}

Json FoldAssignment::to_json() const {
  Json assignment = Json::object();
  for (std::size_t i = 0; i < ids.size(); ++i) assignment[ids[i]] = fold[i];
  return {{"k", k}, {"assignment", assignment}};
}

FoldAssignment FoldAssignment::from_json(const Json& j) {
  FoldAssignment fa;
  fa.k = j.at("k").get<std::size_t>();
  if (fa.k < 2) throw ValidationError("fold count must be at least 2");
  for (const auto& [id, f] : j.at("assignment").items()) {
    const auto index = f.get<std::size_t>();
    if (index >= fa.k) {
      throw ValidationError("fold index out of range for '" + id + "'");
    }
    fa.ids.push_back(id);
    fa.fold.push_back(index);
  }
  return fa;
}

FoldAssignment stratified_kfold(const DimensionView& view, std::size_t k,
                                std::uint64_t seed) {
  if (k < 2) throw ValidationError("need at least 2 folds");
  const std::size_t n = view.size();
  if (n < k) {
    throw ValidationError("cannot split " + std::to_string(n) +
                          " reports into " + std::to_string(k) + " folds");
  }
  const std::size_t n_classes = view.classes.size();
  Rng rng(seed);

  // Exact per-fold capacities summing to n; which folds get the extra report
  // is decided by the RNG.
  std::vector<std::size_t> fold_order(k);
  std::iota(fold_order.begin(), fold_order.end(), 0);
  rng.shuffle(fold_order.begin(), fold_order.end());
  std::vector<std::size_t> capacity(k, n / k);
  for (std::size_t i = 0; i < n % k; ++i) ++capacity[fold_order[i]];

  const auto counts = class_distribution(view);
  std::vector<std::vector<double>> demand(k, std::vector<double>(n_classes));
  for (std::size_t f = 0; f < k; ++f) {
    for (std::size_t c = 0; c < n_classes; ++c) {
      demand[f][c] = static_cast<double>(counts[c]) / static_cast<double>(k);
    }
  }

  constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> fold(n, kUnassigned);
  std::vector<std::size_t> remaining = counts;
  std::size_t unassigned = n;

  auto place = [&](std::size_t row, std::size_t label) {
    std::vector<std::size_t> best;
    for (std::size_t f = 0; f < k; ++f) {
      if (capacity[f] == 0) continue;
      if (best.empty()) {
        best = {f};
        continue;
      }
      const std::size_t b = best.front();
      if (demand[f][label] > demand[b][label] ||
          (demand[f][label] == demand[b][label] && capacity[f] > capacity[b])) {
        best = {f};
      } else if (demand[f][label] == demand[b][label] &&
                 capacity[f] == capacity[b]) {
        best.push_back(f);
      }
    }
    const std::size_t chosen = best[rng.below(best.size())];
    fold[row] = chosen;
    --capacity[chosen];
    --unassigned;
    for (std::size_t c = 0; c < n_classes; ++c) {
      if (view.labels(row, c)) {
        demand[chosen][c] -= 1.0;
        --remaining[c];
      }
    }
  };

  while (unassigned > 0) {
    std::size_t label = kUnassigned;
    for (std::size_t c = 0; c < n_classes; ++c) {
      if (remaining[c] > 0 && (label == kUnassigned || remaining[c] < remaining[label])) {
        label = c;
      }
    }
    if (label == kUnassigned) break;  // rows without labels are handled below
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < n; ++r) {
      if (fold[r] == kUnassigned && view.labels(r, label)) rows.push_back(r);
    }
    rng.shuffle(rows.begin(), rows.end());
    for (std::size_t r : rows) place(r, label);
  }
  // Unlabeled rows (not produced by dimension_view, but allowed) fill the
  // remaining capacity.
  for (std::size_t r = 0; r < n; ++r) {
    if (fold[r] != kUnassigned) continue;
    std::size_t best = 0;
    for (std::size_t f = 1; f < k; ++f) {
      if (capacity[f] > capacity[best]) best = f;
    }
    fold[r] = best;
    --capacity[best];
  }
  refine(view, k, fold, rng);

  FoldAssignment out;
  out.k = k;
  out.ids = view.ids;
  out.fold = std::move(fold);
  return out;
}

StratificationReport verify_stratification(const DimensionView& view,
                                           const FoldAssignment& folds) {
  StratificationReport report;
  const std::size_t k = folds.k;
  report.counts.assign(view.classes.size(), std::vector<std::size_t>(k, 0));
  report.fold_sizes.assign(k, 0);
  std::unordered_map<std::string, std::size_t> lookup;
  for (std::size_t i = 0; i < folds.ids.size(); ++i) {
    lookup[folds.ids[i]] = folds.fold[i];
  }
  for (std::size_t r = 0; r < view.size(); ++r) {
    const auto it = lookup.find(view.ids[r]);
    if (it == lookup.end()) {
      throw ValidationError("report '" + view.ids[r] +
                            "' has no fold assignment");
    }
    ++report.fold_sizes[it->second];
    for (std::size_t c = 0; c < view.classes.size(); ++c) {
      if (view.labels(r, c)) ++report.counts[c][it->second];
    }
  }
  for (const auto& per_fold : report.counts) {
    const auto [lo, hi] = std::minmax_element(per_fold.begin(), per_fold.end());
    report.class_delta.push_back(*hi - *lo);
    report.max_delta = std::max(report.max_delta, *hi - *lo);
  }
  return report;
}

Json StratificationReport::to_json(
    const std::vector<std::string>& classes) const {
  Json per_class = Json::object();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    per_class[classes.at(c)] = {{"per_fold", counts[c]},
                                {"delta", class_delta[c]}};
  }
  Json j;
  j["fold_sizes"] = fold_sizes;
  j["max_delta"] = max_delta;
  j["classes"] = per_class;
  return j;
}

}  // namespace triage
