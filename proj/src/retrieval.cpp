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

#include "tkgqa/retrieval.hpp"

#include <algorithm>
#include <tuple>

#include "tkgqa/error.hpp"

namespace tkgqa {

void validate(const RetrievalPattern& p) {
  if (!(p.threshold >= 0.0)) throw Error(ErrorCode::kInvalidParams, "negative pattern threshold");
  if (!p.required_relation) return;
  const AllenFamily f = *p.required_relation;
  switch (p.predicate) {
    case Predicate::kNoEventInWindow:
    case Predicate::kEventExistsInWindow:
      if (f != AllenFamily::kDuring)
        throw Error(ErrorCode::kInvalidParams, "window predicates use the DURING family");
      break;
    case Predicate::kNearestFeasibleBefore:
      if (f != AllenFamily::kBefore)
        throw Error(ErrorCode::kInvalidParams, "latest-before requires BEFORE");
      break;
    case Predicate::kNearestFeasibleAfter:
      if (f != AllenFamily::kAfter)
        throw Error(ErrorCode::kInvalidParams, "earliest-after requires AFTER");
      break;
  }
}

AllenFamily required_family(const RetrievalPattern& p) {
  if (p.required_relation) return *p.required_relation;
  switch (p.predicate) {
    case Predicate::kNearestFeasibleBefore: return AllenFamily::kBefore;
    case Predicate::kNearestFeasibleAfter: return AllenFamily::kAfter;
    default: return AllenFamily::kDuring;
  }
}

std::optional<bool> match(const EventFacts& h, const RetrievalPattern& p, const TimeRef& window) {
  if (h.measure != p.event_kind) return std::nullopt;
  // Membership in the window is the DURING projection widened by partial
  // overlap; anything BEFORE/AFTER the window is not evidence for it.
  if (!shares_time(allen_relation(h.time, window))) return std::nullopt;
  return h.abnormal && h.value > p.threshold;
}

RetrievalBatch psi(const TemporalKG& kg, const TimeRef& anchor, NodeId loc,
                   const RetrievalPattern& p, const RetrievalParams& params, SeenSet& seen,
                   int step) {
  if (params.radius < 0 || params.hop_cap < 0)
    throw Error(ErrorCode::kInvalidParams, "negative radius");
  const TimeRef w{anchor.start - params.window_pad, anchor.end + params.window_pad};
  RetrievalBatch batch;
  batch.anchor = anchor;
  batch.loc = loc;
  batch.step = step;
  for (auto [l, hop] : kg.near_with_distance(loc, std::min(params.radius, params.hop_cap))) {
    batch.scanned.push_back(l);
    for (const WindowHit& hit : kg.window_query(l, w)) {
      if (seen.events.count(hit.event.value)) continue;
      const EventFacts& h = kg.event(hit.event);
      auto violating = match(h, p, w);
      if (!violating) continue;
      Observation o;
      o.event = h.event;
      o.location = h.location;
      o.time = h.time;
      o.value = h.value;
      o.measure = h.measure;
      o.violating = *violating;
      o.hop = hop;
      o.provenance = kg.provenance(h.event);
      o.triples = h.triples;
      batch.observations.push_back(std::move(o));
    }
  }
  if (seen.triples + batch.triple_count() > params.budget)
    throw Error(ErrorCode::kBudgetExceeded, "retrieval budget of " +
                                                std::to_string(params.budget) +
                                                " triples exceeded");
  prioritize(batch.observations, anchor);
  for (const Observation& o : batch.observations) seen.events.insert(o.event.value);
  seen.triples += batch.triple_count();
  return batch;
}

void prioritize(std::vector<Observation>& c, const TimeRef& anchor) {
  auto key = [&](const Observation& o) {
    int tier = 2;
    Seconds gap = 0;
    if (o.time.start == anchor.start) {
      tier = 0;
    } else if (intersects(o.time, anchor)) {
      tier = 1;
    } else {
      gap = o.time.end <= anchor.start ? anchor.start - o.time.end : o.time.start - anchor.end;
      if (gap < 0) gap = 0;
    }
    return std::make_tuple(tier, gap, o.hop, o.time.start, o.event.value);
  };
  std::stable_sort(c.begin(), c.end(),
                   [&](const Observation& a, const Observation& b) { return key(a) < key(b); });
}

std::vector<Seconds> slots_of(const TimeRef& window, Seconds slot) {
  std::vector<Seconds> out;
  if (slot <= 0) return out;
  const Seconds first = floor_to_slot(window.start, slot);
  if (window.is_point()) return {first};
  for (Seconds s = first; s < window.end; s += slot) out.push_back(s);
  return out;
}

void Evidence::add(const RetrievalBatch& batch) {
  for (NodeId l : batch.scanned) mark_probed(l, batch.anchor);
  for (const Observation& o : batch.observations) add(o);
}

void Evidence::add(const Observation& o) {
  if (!events_.insert(o.event.value).second) return;
  cells_[{o.location.value, floor_to_slot(o.time.start, slot_)}].push_back(observations_.size());
  observations_.push_back(o);
}

void Evidence::mark_probed(NodeId loc, const TimeRef& window) {
  for (Seconds s : slots_of(window, slot_)) probed_.insert({loc.value, s});
}

bool Evidence::probed(NodeId loc, Seconds slot_start) const {
  return probed_.count({loc.value, slot_start}) > 0;
}

std::vector<const Observation*> Evidence::cell(NodeId loc, Seconds slot_start) const {
  std::vector<const Observation*> out;
  auto it = cells_.find({loc.value, slot_start});
  if (it != cells_.end())
    for (std::size_t i : it->second) out.push_back(&observations_[i]);
  return out;
}

WindowAssessment Evidence::assess(const TimeRef& window, std::span<const NodeId> path,
                                  double theta) const {
  WindowAssessment a;
  for (NodeId loc : path) {
    for (Seconds s : slots_of(window, slot_)) {
      ++a.cells;
      const bool read = probed(loc, s);
      if (read) ++a.probed;
      else a.unprobed.emplace_back(loc, s);
      const auto obs = cell(loc, s);
      if (obs.empty()) continue;
      const bool agree = std::all_of(obs.begin(), obs.end(), [&](const Observation* o) {
        return o->value == obs.front()->value;
      });
      if (!agree) continue;
      ++a.observed;
      for (const Observation* o : obs)
        if (o->violating && intersects(o->time, window)) a.violations.push_back(o);
    }
  }
  if (!a.violations.empty()) a.status = WindowStatus::kInfeasible;
  else if (a.cells > 0 && a.coverage() >= theta) a.status = WindowStatus::kFeasible;
  else if (a.unprobed.empty()) a.status = WindowStatus::kUndecidable;
  else a.status = WindowStatus::kOpen;
  return a;
}

std::string_view to_string(Predicate p) {
  switch (p) {
    case Predicate::kNoEventInWindow: return "NO_EVENT_IN_WINDOW";
    case Predicate::kEventExistsInWindow: return "EVENT_EXISTS_IN_WINDOW";
    case Predicate::kNearestFeasibleBefore: return "NEAREST_FEASIBLE_BEFORE";
    case Predicate::kNearestFeasibleAfter: return "NEAREST_FEASIBLE_AFTER";
  }
  return "?";
}

std::optional<Predicate> parse_predicate(std::string_view s) {
  if (s == "NO_EVENT_IN_WINDOW") return Predicate::kNoEventInWindow;
  if (s == "EVENT_EXISTS_IN_WINDOW") return Predicate::kEventExistsInWindow;
  if (s == "NEAREST_FEASIBLE_BEFORE") return Predicate::kNearestFeasibleBefore;
  if (s == "NEAREST_FEASIBLE_AFTER") return Predicate::kNearestFeasibleAfter;
  return std::nullopt;
}

std::string_view to_string(WindowStatus s) {
  switch (s) {
    case WindowStatus::kOpen: return "open";
    case WindowStatus::kFeasible: return "feasible";
    case WindowStatus::kInfeasible: return "infeasible";
    case WindowStatus::kUndecidable: return "undecidable";
  }
  return "?";
}

}  // namespace tkgqa
