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

#ifndef TKGQA_ALLEN_HPP_
#define TKGQA_ALLEN_HPP_

#include <array>
#include <optional>
#include <string_view>

#include "tkgqa/time.hpp"

namespace tkgqa {

/// The thirteen Allen interval relations of `a` relative to `b`.
enum class AllenRelation {
  kBefore,
  kMeets,
  kOverlaps,
  kStarts,
  kDuring,
  kFinishes,
  kEquals,
  kAfter,
  kMetBy,
  kOverlappedBy,
  kStartedBy,
  kContains,
  kFinishedBy,
};

inline constexpr std::array<AllenRelation, 13> kAllAllenRelations = {
    AllenRelation::kBefore,       AllenRelation::kMeets,
    AllenRelation::kOverlaps,     AllenRelation::kStarts,
    AllenRelation::kDuring,       AllenRelation::kFinishes,
    AllenRelation::kEquals,       AllenRelation::kAfter,
    AllenRelation::kMetBy,        AllenRelation::kOverlappedBy,
    AllenRelation::kStartedBy,    AllenRelation::kContains,
    AllenRelation::kFinishedBy};

/// Coarse vocabulary used by retrieval patterns and derived edges.
///   BEFORE   = {before, meets}
///   AFTER    = {after, met-by}
///   DURING   = {during, starts, finishes, equals}
///   OVERLAPS = {overlaps, overlapped-by, contains, started-by, finished-by}
enum class AllenFamily { kBefore, kAfter, kDuring, kOverlaps };

/// Unique relation of `a` relative to `b`.
///
/// Points are zero-length intervals. To keep the thirteen relations
/// mutually exclusive for degenerate inputs, a point p is read as the
/// infinitesimal slot [p, p + eps), which agrees with half-open slot
/// semantics: a point at an interval's start STARTS it, a point at its end
/// is MET_BY it.
AllenRelation allen_relation(const TimeRef& a, const TimeRef& b);

AllenRelation inverse(AllenRelation r);

AllenFamily family(AllenRelation r);

/// DURING or OVERLAPS family, i.e. the intervals share time.
inline bool shares_time(AllenRelation r) {
  const AllenFamily f = family(r);
  return f == AllenFamily::kDuring || f == AllenFamily::kOverlaps;
}

std::string_view to_string(AllenRelation r);
std::string_view to_string(AllenFamily f);
std::optional<AllenFamily> parse_allen_family(std::string_view s);

}  // namespace tkgqa

#endif  // TKGQA_ALLEN_HPP_
