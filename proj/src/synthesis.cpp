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

#include "tkgqa/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "tkgqa/agents.hpp"
#include "tkgqa/error.hpp"

namespace tkgqa {

FilterResult contradiction_filter(std::span<const Observation> evidence) {
  using Key = std::tuple<int, std::uint32_t, Seconds, Seconds>;
  std::map<Key, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < evidence.size(); ++i) {
    const Observation& o = evidence[i];
    cells[{static_cast<int>(o.measure), o.location.value, o.time.start, o.time.end}].push_back(i);
  }
  std::vector<bool> drop(evidence.size(), false);
  FilterResult r;
  for (const auto& [key, idx] : cells) {
    const double v0 = evidence[idx.front()].value;
    const bool conflict = std::any_of(idx.begin(), idx.end(),
                                      [&](std::size_t i) { return evidence[i].value != v0; });
    if (!conflict) continue;
    ConflictSlot c;
    c.measure = evidence[idx.front()].measure;
    c.location = evidence[idx.front()].location;
    c.time = evidence[idx.front()].time;
    for (std::size_t i : idx) {
      drop[i] = true;
      c.events.push_back(evidence[i].event);
    }
    r.conflicts.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < evidence.size(); ++i)
    if (!drop[i]) r.kept.push_back(evidence[i]);
  return r;
}

std::optional<TimeRef> select_decisive_time(const Evidence& evidence, const QueryIntent& q,
                                            double theta) {
  if (is_q1(q.kind)) {
    const WindowAssessment a = evidence.assess(q.window(), q.location_path, theta);
    if (a.status == WindowStatus::kFeasible) return q.window();
    return std::nullopt;
  }
  for (const TimeRef& w : candidate_windows(q, evidence.slot_duration())) {
    const WindowAssessment a = evidence.assess(w, q.location_path, theta);
    if (a.status == WindowStatus::kFeasible) return w;
    if (a.status == WindowStatus::kOpen) return std::nullopt;
  }
  return std::nullopt;
}

Answer fuse(const QueryIntent& q, std::span<const Observation> filtered, const TimeRef& t_star,
            double gamma) {
  if (gamma < 0.0) throw Error(ErrorCode::kInvalidParams, "negative decay rate");
  auto on_path = [&](NodeId loc) {
    return std::find(q.location_path.begin(), q.location_path.end(), loc) !=
           q.location_path.end();
  };
  Answer a;
  double total = 0.0;
  bool violated = false;
  const double ref = midpoint(t_star);
  for (const Observation& o : filtered) {
    if (o.measure != q.event_kind || !on_path(o.location)) continue;
    if (o.violating && intersects(o.time, t_star)) violated = true;
    Citation c;
    c.event = o.event;
    c.provenance = o.provenance;
    c.time = o.time;
    c.violating = o.violating;
    const double hours = std::abs(midpoint(o.time) - ref) / static_cast<double>(kHour);
    c.weight = std::exp(-gamma * hours);
    total += c.weight;
    std::ostringstream text;
    const auto at = o.provenance.find('#');
    text << o.provenance.substr(0, at) << ' ' << o.value << ' ' << measure_unit(o.measure)
         << (o.violating ? " event" : " no event");
    c.text = text.str();
    a.rationale.push_back(std::move(c));
  }
  if (a.rationale.empty())
    throw Error(ErrorCode::kEmptyEvidence, "no retrieved fact supports an answer");
  for (Citation& c : a.rationale) c.weight /= total;
  std::stable_sort(a.rationale.begin(), a.rationale.end(),
                   [](const Citation& x, const Citation& y) {
                     if (x.weight != y.weight) return x.weight > y.weight;
                     if (x.time.start != y.time.start) return x.time.start < y.time.start;
                     return x.event < y.event;
                   });
  switch (q.kind) {
    case QueryKind::kQ1Avoid:
      a.verdict = violated ? Verdict::kNo : Verdict::kYes;
      break;
    case QueryKind::kQ1Detect:
      a.verdict = violated ? Verdict::kYes : Verdict::kNo;
      break;
    default:
      if (violated) a.verdict = Verdict::kNoAnswer;
      else a.verdict = t_star == q.window() ? Verdict::kNoNeed : Verdict::kTime;
  }
  if (!violated) a.decisive_time = t_star;
  return a;
}

}  // namespace tkgqa
