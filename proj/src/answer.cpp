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

#include "tkgqa/answer.hpp"

namespace tkgqa {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kYes: return "YES";
    case Verdict::kNo: return "NO";
    case Verdict::kTime: return "TIME";
    case Verdict::kNoNeed: return "NO_NEED";
    case Verdict::kNoAnswer: return "NO_ANSWER";
  }
  return "?";
}

std::optional<Verdict> parse_verdict(std::string_view s) {
  if (s == "YES") return Verdict::kYes;
  if (s == "NO") return Verdict::kNo;
  if (s == "TIME") return Verdict::kTime;
  if (s == "NO_NEED") return Verdict::kNoNeed;
  if (s == "NO_ANSWER") return Verdict::kNoAnswer;
  return std::nullopt;
}

std::string format_verdict(const Answer& a) {
  if (a.verdict == Verdict::kTime && a.decisive_time)
    return "TIME " + format_timestamp(a.decisive_time->start);
  return std::string(to_string(a.verdict));
}

}  // namespace tkgqa
