// Copyright 2026 The tkgqa Authors
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

#ifndef TKGQA_REPORT_IO_HPP_
#define TKGQA_REPORT_IO_HPP_

#include <string>

#include <json.hpp>

#include "tkgqa/controller.hpp"
#include "tkgqa/eval.hpp"

namespace tkgqa {

/// Query document: kind, anchor (timestamp), duration and horizon
/// (durations such as "4h" or seconds), path (location keys or names),
/// optional event_kind ("rain" | "traffic"), threshold and tz. A document
/// with only "question" goes through the template parser.
QueryIntent query_from_json(const nlohmann::json& j, const TemporalKG& kg,
                            Seconds default_horizon = 12 * kHour);
nlohmann::json query_to_json(const QueryIntent& q, const TemporalKG& kg);

nlohmann::json to_json(const TimeRef& t);
nlohmann::json to_json(const Answer& a, const TemporalKG& kg);
nlohmann::json to_json(const RunTrace& t, const TemporalKG& kg);
nlohmann::json to_json(const EvalReport& r);
nlohmann::json to_json(const CostReport& r);

/// CSV of the cost curves: section,w,id,d_star,kg_calls,triples,success
/// rows, then precision rows.
std::string cost_csv(const CostReport& r);

}  // namespace tkgqa

#endif  // TKGQA_REPORT_IO_HPP_
