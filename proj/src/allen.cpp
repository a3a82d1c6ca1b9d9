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

#include "tkgqa/allen.hpp"

#include <utility>

namespace tkgqa {

namespace {

// Endpoint lifted by an infinitesimal: (value, eps) compared lexicographically.
using Lifted = std::pair<Seconds, int>;

Lifted lifted_start(const TimeRef& t) { return {t.start, 0}; }
Lifted lifted_end(const TimeRef& t) { return {t.end, t.is_point() ? 1 : 0}; }

}  // namespace

AllenRelation allen_relation(const TimeRef& a, const TimeRef& b) {
  const Lifted as = lifted_start(a), ae = lifted_end(a);
  const Lifted bs = lifted_start(b), be = lifted_end(b);

  if (ae < bs) return AllenRelation::kBefore;
  if (ae == bs) return AllenRelation::kMeets;
  if (be < as) return AllenRelation::kAfter;
  if (be == as) return AllenRelation::kMetBy;
  // The intervals share time from here on.
  if (as == bs) {
    if (ae == be) return AllenRelation::kEquals;
    return ae < be ? AllenRelation::kStarts : AllenRelation::kStartedBy;
  }
  if (ae == be)
    return as > bs ? AllenRelation::kFinishes : AllenRelation::kFinishedBy;
  if (as < bs)
    return ae < be ? AllenRelation::kOverlaps : AllenRelation::kContains;
  return ae < be ? AllenRelation::kDuring : AllenRelation::kOverlappedBy;
}

AllenRelation inverse(AllenRelation r) {
  switch (r) {
    case AllenRelation::kBefore: return AllenRelation::kAfter;
    case AllenRelation::kMeets: return AllenRelation::kMetBy;
    case AllenRelation::kOverlaps: return AllenRelation::kOverlappedBy;
    case AllenRelation::kStarts: return AllenRelation::kStartedBy;
    case AllenRelation::kDuring: return AllenRelation::kContains;
    case AllenRelation::kFinishes: return AllenRelation::kFinishedBy;
    case AllenRelation::kEquals: return AllenRelation::kEquals;
    case AllenRelation::kAfter: return AllenRelation::kBefore;
    case AllenRelation::kMetBy: return AllenRelation::kMeets;
    case AllenRelation::kOverlappedBy: return AllenRelation::kOverlaps;
    case AllenRelation::kStartedBy: return AllenRelation::kStarts;
    case AllenRelation::kContains: return AllenRelation::kDuring;
    case AllenRelation::kFinishedBy: return AllenRelation::kFinishes;
  }
  return r;
}

AllenFamily family(AllenRelation r) {
  switch (r) {
    case AllenRelation::kBefore:
    case AllenRelation::kMeets:
      return AllenFamily::kBefore;
    case AllenRelation::kAfter:
    case AllenRelation::kMetBy:
      return AllenFamily::kAfter;
    case AllenRelation::kStarts:
    case AllenRelation::kDuring:
    case AllenRelation::kFinishes:
    case AllenRelation::kEquals:
      return AllenFamily::kDuring;
    default:
      return AllenFamily::kOverlaps;
  }
}

std::string_view to_string(AllenRelation r) {
  switch (r) {
    case AllenRelation::kBefore: return "BEFORE";
    case AllenRelation::kMeets: return "MEETS";
    case AllenRelation::kOverlaps: return "OVERLAPS";
    case AllenRelation::kStarts: return "STARTS";
    case AllenRelation::kDuring: return "DURING";
    case AllenRelation::kFinishes: return "FINISHES";
    case AllenRelation::kEquals: return "EQUALS";
    case AllenRelation::kAfter: return "AFTER";
    case AllenRelation::kMetBy: return "MET_BY";
    case AllenRelation::kOverlappedBy: return "OVERLAPPED_BY";
    case AllenRelation::kStartedBy: return "STARTED_BY";
    case AllenRelation::kContains: return "CONTAINS";
    case AllenRelation::kFinishedBy: return "FINISHED_BY";
  }
  return "?";
}

std::string_view to_string(AllenFamily f) {
  switch (f) {
    case AllenFamily::kBefore: return "BEFORE";
    case AllenFamily::kAfter: return "AFTER";
    case AllenFamily::kDuring: return "DURING";
    case AllenFamily::kOverlaps: return "OVERLAPS";
  }
  return "?";
}

std::optional<AllenFamily> parse_allen_family(std::string_view s) {
  if (s == "BEFORE") return AllenFamily::kBefore;
  if (s == "AFTER") return AllenFamily::kAfter;
  if (s == "DURING") return AllenFamily::kDuring;
  if (s == "OVERLAPS") return AllenFamily::kOverlaps;
  return std::nullopt;
}

}  // namespace tkgqa
