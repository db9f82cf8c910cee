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

#ifndef TRIAGE_REPORT_H_
#define TRIAGE_REPORT_H_

#include <string>
#include <vector>

#include "triage/json.h"

namespace triage {

// One PR panel for a dimension summary (EvalSummary::to_json()). One colour
// per class; fold 0 is drawn solid and later folds dashed.
std::string render_pr_svg(const Json& summary);

// Dimension x {mAP, F-score} with mean +- std, one row per summary.
std::string render_table_csv(const std::vector<Json>& summaries);

}  // namespace triage

#endif  // TRIAGE_REPORT_H_
