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

#ifndef TKGQA_QUERY_HPP_
#define TKGQA_QUERY_HPP_

#include <optional>
#include <string_view>
#include <vector>

#include "tkgqa/kg.hpp"

namespace tkgqa {

enum class QueryKind { kQ1Avoid, kQ1Detect, kQ2LatestBefore, kQ3EarliestAfter };

struct QueryIntent {
  QueryKind kind = QueryKind::kQ1Avoid;
  Seconds anchor = 0;    // planned start t
  Seconds duration = 0;  // Δt
  Seconds horizon = 0;   // L
  std::vector<NodeId> location_path;
  MeasureKind event_kind = MeasureKind::kRain;
  double threshold = 0.0;

  TimeRef window() const { return TimeRef::span(anchor, duration); }
};

/// Throws INVALID_PARAMS unless duration > 0, horizon >= duration, the path
/// is non-empty and every path node is a location of `kg`.
void validate(const QueryIntent& q, const TemporalKG& kg);

inline bool is_q1(QueryKind k) { return k == QueryKind::kQ1Avoid || k == QueryKind::kQ1Detect; }

/// Candidate windows in scan order: the anchor window first, then for Q3
/// starts t + k*slot while < t + L, for Q2 starts t - k*slot while > t - L.
/// Q1 scans only the anchor window.
std::vector<TimeRef> candidate_windows(const QueryIntent& q, Seconds slot);

std::string_view to_string(QueryKind k);
std::optional<QueryKind> parse_query_kind(std::string_view s);

}  // namespace tkgqa

#endif  // TKGQA_QUERY_HPP_
