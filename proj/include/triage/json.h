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

#ifndef TRIAGE_JSON_H_
#define TRIAGE_JSON_H_

#include "json.hpp"

namespace triage {

// Insertion-ordered so emitted files keep a stable, readable key order.
using Json = nlohmann::ordered_json;

}  // namespace triage

#endif  // TRIAGE_JSON_H_
