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

#include "tkgqa/query.hpp"

#include "tkgqa/error.hpp"

namespace tkgqa {

void validate(const QueryIntent& q, const TemporalKG& kg) {
  if (q.duration <= 0) throw Error(ErrorCode::kInvalidParams, "duration must be positive");
  if (q.horizon < q.duration)
    throw Error(ErrorCode::kInvalidParams, "horizon must be at least the duration");
  if (q.location_path.empty()) throw Error(ErrorCode::kInvalidParams, "empty location path");
  if (q.threshold < 0.0) throw Error(ErrorCode::kInvalidParams, "negative threshold");
  for (NodeId id : q.location_path)
    if (!kg.contains(id) || kg.node(id).kind() != NodeKind::kLocation)
      throw Error(ErrorCode::kUnknownLocation, "path node is not a location");
}

std::vector<TimeRef> candidate_windows(const QueryIntent& q, Seconds slot) {
  std::vector<TimeRef> out{q.window()};
  if (slot <= 0) return out;
  if (q.kind == QueryKind::kQ3EarliestAfter) {
    for (Seconds s = q.anchor + slot; s < q.anchor + q.horizon; s += slot)
      out.push_back(TimeRef::span(s, q.duration));
  } else if (q.kind == QueryKind::kQ2LatestBefore) {
    for (Seconds s = q.anchor - slot; s > q.anchor - q.horizon; s -= slot)
      out.push_back(TimeRef::span(s, q.duration));
  }
  return out;
}

std::string_view to_string(QueryKind k) {
  switch (k) {
    case QueryKind::kQ1Avoid: return "Q1_AVOID";
    case QueryKind::kQ1Detect: return "Q1_DETECT";
    case QueryKind::kQ2LatestBefore: return "Q2_LATEST_BEFORE";
    case QueryKind::kQ3EarliestAfter: return "Q3_EARLIEST_AFTER";
  }
  return "?";
}

std::optional<QueryKind> parse_query_kind(std::string_view s) {
  if (s == "Q1_AVOID" || s == "Q1") return QueryKind::kQ1Avoid;
  if (s == "Q1_DETECT") return QueryKind::kQ1Detect;
  if (s == "Q2_LATEST_BEFORE" || s == "Q2") return QueryKind::kQ2LatestBefore;
  if (s == "Q3_EARLIEST_AFTER" || s == "Q3") return QueryKind::kQ3EarliestAfter;
  return std::nullopt;
}

}  // namespace tkgqa
