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

#ifndef TKGQA_ANSWER_HPP_
#define TKGQA_ANSWER_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tkgqa/kg.hpp"

namespace tkgqa {

enum class Verdict { kYes, kNo, kTime, kNoNeed, kNoAnswer };

struct Citation {
  NodeId event;
  std::string provenance;
  TimeRef time;
  bool violating = false;
  double weight = 0.0;
  std::string text;
};

/// A (kind, time, location) cell whose observations disagreed; all of them
/// were dropped.
struct ConflictSlot {
  MeasureKind measure = MeasureKind::kRain;
  NodeId location;
  TimeRef time;
  std::vector<NodeId> events;
};

struct Answer {
  Verdict verdict = Verdict::kNoAnswer;
  std::optional<TimeRef> decisive_time;  // t*; always set for TIME
  std::vector<Citation> rationale;       // descending weight
  std::vector<ConflictSlot> conflicts;
};

std::string_view to_string(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view s);

/// "YES", "NO", "NO_NEED", "NO_ANSWER" or "TIME <iso>".
std::string format_verdict(const Answer& a);

}  // namespace tkgqa

#endif  // TKGQA_ANSWER_HPP_
