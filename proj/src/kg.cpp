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

#include "tkgqa/kg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <sstream>

#include "tkgqa/error.hpp"

namespace tkgqa {

namespace {

std::string describe(NodeId id) { return "node " + std::to_string(id.value); }

bool legal_endpoints(Relation rel, NodeKind head, NodeKind tail) {
  switch (rel) {
    case Relation::kOccursAt:
      return head == NodeKind::kEvent && tail == NodeKind::kTime;
    case Relation::kAtLocation:
      return head == NodeKind::kEvent && tail == NodeKind::kLocation;
    case Relation::kHasValue:
      return head == NodeKind::kEvent && tail == NodeKind::kValue;
    case Relation::kBefore:
    case Relation::kAfter:
    case Relation::kDuring:
    case Relation::kOverlaps:
      return head == NodeKind::kTime && tail == NodeKind::kTime;
    case Relation::kNear:
      return head == NodeKind::kLocation && tail == NodeKind::kLocation;
  }
  return false;
}

}  // namespace

std::string location_key(const RawRecord& r) {
  if (r.direction && !r.direction->empty()) return r.location_id + "/" + *r.direction;
  return r.location_id;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string record_provenance(const RawRecord& r) {
  return location_key(r) + '@' + format_timestamp(r.date) + '#' +
         std::string(to_string(r.measure_kind)) + '=' + format_number(r.measure);
}

Relation derived_relation(const TimeRef& a, const TimeRef& b) {
  switch (family(allen_relation(a, b))) {
    case AllenFamily::kBefore: return Relation::kBefore;
    case AllenFamily::kAfter: return Relation::kAfter;
    case AllenFamily::kDuring: return Relation::kDuring;
    case AllenFamily::kOverlaps: return Relation::kOverlaps;
  }
  return Relation::kOverlaps;
}

// --- TemporalKG ------------------------------------------------------------

TemporalKG TemporalKG::from_parts(Seconds slot_duration, std::vector<Node> nodes,
                                  std::vector<Triple> triples) {
  if (slot_duration <= 0)
    throw Error(ErrorCode::kInvalidFormat, "slot duration must be positive");
  TemporalKG kg;
  kg.slot_duration_ = slot_duration;
  kg.nodes_ = std::move(nodes);
  kg.triples_ = std::move(triples);

  for (std::size_t i = 0; i < kg.nodes_.size(); ++i) {
    if (kg.nodes_[i].id.value != i)
      throw Error(ErrorCode::kInvalidFormat, "node ids must be dense and ordered");
    if (const auto* loc = std::get_if<LocationPayload>(&kg.nodes_[i].payload)) {
      if (!kg.location_by_key_.emplace(loc->key, kg.nodes_[i].id).second)
        throw Error(ErrorCode::kInvalidFormat, "duplicate location key " + loc->key);
      kg.location_by_name_.emplace(loc->name, kg.nodes_[i].id);
    }
  }
  for (const auto& [key, id] : kg.location_by_key_) kg.locations_.push_back(id);

  struct Partial {
    std::optional<TripleIndex> occurs, at, has;
  };
  std::map<std::uint32_t, Partial> partial;
  for (std::size_t i = 0; i < kg.triples_.size(); ++i) {
    const Triple& t = kg.triples_[i];
    if (!kg.contains(t.head) || !kg.contains(t.tail))
      throw Error(ErrorCode::kInvalidFormat, "triple references a missing node");
    const NodeKind hk = kg.nodes_[t.head.value].kind();
    const NodeKind tk = kg.nodes_[t.tail.value].kind();
    if (!legal_endpoints(t.rel, hk, tk))
      throw Error(ErrorCode::kInvalidFormat,
                  std::string("illegal endpoints for ") + std::string(to_string(t.rel)));
    const auto idx = static_cast<TripleIndex>(i);
    auto set_once = [&](std::optional<TripleIndex>& slot) {
      if (slot)
        throw Error(ErrorCode::kInvalidFormat,
                    describe(t.head) + " has more than one " +
                        std::string(to_string(t.rel)) + " edge");
      slot = idx;
    };
    switch (t.rel) {
      case Relation::kOccursAt: set_once(partial[t.head.value].occurs); break;
      case Relation::kAtLocation: set_once(partial[t.head.value].at); break;
      case Relation::kHasValue: set_once(partial[t.head.value].has); break;
      case Relation::kNear:
        kg.adjacency_[t.head.value].push_back(t.tail);
        kg.adjacency_[t.tail.value].push_back(t.head);
        ++kg.near_edges_;
        break;
      default:
        break;
    }
  }

  for (const Node& n : kg.nodes_) {
    if (n.kind() != NodeKind::kEvent) continue;
    auto it = partial.find(n.id.value);
    if (it == partial.end() || !it->second.occurs || !it->second.at || !it->second.has)
      throw Error(ErrorCode::kInvalidFormat,
                  describe(n.id) + " lacks an occursAt/atLocation/hasValue edge");
    const auto& ev = std::get<EventPayload>(n.payload);
    EventFacts f;
    f.event = n.id;
    f.triples = {*it->second.occurs, *it->second.at, *it->second.has};
    f.time_node = kg.triples_[f.triples[0]].tail;
    f.location = kg.triples_[f.triples[1]].tail;
    f.value_node = kg.triples_[f.triples[2]].tail;
    f.time = std::get<TimePayload>(kg.nodes_[f.time_node.value].payload).time;
    f.value = std::get<ValuePayload>(kg.nodes_[f.value_node.value].payload).magnitude;
    f.measure = ev.measure;
    f.abnormal = ev.tag != kNoEventTag;
    kg.event_slot_.emplace(n.id.value, kg.events_.size());
    kg.events_.push_back(f);
    kg.time_index_[f.location.value].push_back({f.time, f.event});
    Seconds& span = kg.max_span_[f.location.value];
    span = std::max(span, f.time.length());
    if (!kg.coverage_) {
      kg.coverage_ = f.time;
    } else {
      kg.coverage_->start = std::min(kg.coverage_->start, f.time.start);
      kg.coverage_->end = std::max(kg.coverage_->end, f.time.end);
    }
  }
  for (auto& [loc, entries] : kg.time_index_) {
    std::sort(entries.begin(), entries.end(), [](const IndexEntry& a, const IndexEntry& b) {
      return std::tie(a.time.start, a.time.end, a.event) <
             std::tie(b.time.start, b.time.end, b.event);
    });
  }
  for (auto& [loc, adj] : kg.adjacency_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  return kg;
}

const Node& TemporalKG::node(NodeId id) const {
  if (!contains(id)) throw Error(ErrorCode::kInvalidParams, describe(id) + " does not exist");
  return nodes_[id.value];
}

void TemporalKG::require_location(NodeId loc) const {
  if (!contains(loc) || nodes_[loc.value].kind() != NodeKind::kLocation)
    throw Error(ErrorCode::kUnknownLocation, describe(loc) + " is not a location");
}

const LocationPayload& TemporalKG::location(NodeId id) const {
  require_location(id);
  return std::get<LocationPayload>(nodes_[id.value].payload);
}

std::optional<NodeId> TemporalKG::find_location(std::string_view key_or_name) const {
  if (auto it = location_by_key_.find(key_or_name); it != location_by_key_.end())
    return it->second;
  if (auto it = location_by_name_.find(key_or_name); it != location_by_name_.end())
    return it->second;
  return std::nullopt;
}

const EventFacts& TemporalKG::event(NodeId id) const {
  auto it = event_slot_.find(id.value);
  if (it == event_slot_.end())
    throw Error(ErrorCode::kInvalidParams, describe(id) + " is not an event");
  return events_[it->second];
}

const std::string& TemporalKG::provenance(NodeId event) const {
  return std::get<EventPayload>(node(event).payload).observation;
}

std::span<const IndexEntry> TemporalKG::series(NodeId loc) const {
  require_location(loc);
  auto it = time_index_.find(loc.value);
  if (it == time_index_.end()) return {};
  return it->second;
}

std::vector<WindowHit> TemporalKG::window_query(NodeId loc, const TimeRef& w) const {
  const auto entries = series(loc);
  std::vector<WindowHit> out;
  if (entries.empty()) return out;
  const Seconds max_span = max_span_.at(loc.value);
  // Anything starting before w.start - max_span cannot reach w.
  const Seconds lo = w.start - max_span;
  auto first = std::lower_bound(entries.begin(), entries.end(), lo,
                                [](const IndexEntry& e, Seconds t) { return e.time.start < t; });
  for (auto it = first; it != entries.end() && it->time.start <= w.end; ++it) {
    if (intersects(it->time, w)) out.push_back({it->time, it->event, event(it->event).value});
  }
  return out;
}

std::span<const NodeId> TemporalKG::neighbors(NodeId loc) const {
  require_location(loc);
  auto it = adjacency_.find(loc.value);
  if (it == adjacency_.end()) return {};
  return it->second;
}

std::vector<std::pair<NodeId, int>> TemporalKG::near_with_distance(NodeId loc,
                                                                   int hops) const {
  require_location(loc);
  if (hops < 0) throw Error(ErrorCode::kInvalidParams, "hop count must be >= 0");
  std::vector<std::pair<NodeId, int>> out{{loc, 0}};
  std::unordered_set<std::uint32_t> visited{loc.value};
  std::deque<std::pair<NodeId, int>> frontier{{loc, 0}};
  while (!frontier.empty()) {
    auto [cur, d] = frontier.front();
    frontier.pop_front();
    if (d >= hops) continue;
    for (NodeId nb : neighbors(cur)) {
      if (visited.insert(nb.value).second) {
        out.emplace_back(nb, d + 1);
        frontier.emplace_back(nb, d + 1);
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.second, a.first) < std::tie(b.second, b.first);
  });
  return out;
}

std::vector<NodeId> TemporalKG::near(NodeId loc, int hops) const {
  std::vector<NodeId> out;
  for (auto [id, d] : near_with_distance(loc, hops)) out.push_back(id);
  std::sort(out.begin(), out.end());
  return out;
}

KgStats TemporalKG::stats() const {
  KgStats s;
  s.period = coverage_;
  s.entities = nodes_.size();
  s.relations = triples_.size();
  s.records = events_.size();
  s.near_edges = near_edges_;
  for (const Node& n : nodes_) {
    switch (n.kind()) {
      case NodeKind::kTime: ++s.time_nodes; break;
      case NodeKind::kLocation: ++s.locations; break;
      case NodeKind::kValue: ++s.value_nodes; break;
      case NodeKind::kEvent: break;
    }
  }
  return s;
}

// --- KgBuilder -------------------------------------------------------------

KgBuilder::KgBuilder(Seconds slot_duration) : slot_duration_(slot_duration) {
  if (slot_duration <= 0)
    throw Error(ErrorCode::kInvalidParams, "slot duration must be positive");
}

void KgBuilder::set_volume_threshold(const std::string& location_key, double threshold) {
  volume_thresholds_[location_key] = threshold;
}

NodeId KgBuilder::new_node(decltype(Node::payload) payload) {
  const NodeId id{static_cast<std::uint32_t>(nodes_.size())};
  nodes_.push_back(Node{id, std::move(payload)});
  return id;
}

NodeId KgBuilder::add_location(const std::string& key, const std::string& name,
                               std::optional<Coordinates> coords) {
  if (auto it = locations_.find(key); it != locations_.end()) return it->second;
  const NodeId id = new_node(LocationPayload{key, name.empty() ? key : name, coords});
  locations_.emplace(key, id);
  return id;
}

NodeId KgBuilder::time_node(const TimeRef& t) {
  if (auto it = times_.find(t); it != times_.end()) return it->second;
  const NodeId id = new_node(TimePayload{t});
  times_.emplace(t, id);
  return id;
}

NodeId KgBuilder::value_node(double magnitude, const std::string& unit) {
  auto key = std::make_pair(magnitude, unit);
  if (auto it = values_.find(key); it != values_.end()) return it->second;
  const NodeId id = new_node(ValuePayload{magnitude, unit});
  values_.emplace(std::move(key), id);
  return id;
}

std::vector<Triple> KgBuilder::map_record(const RawRecord& record) {
  if (!std::isfinite(record.measure) || record.measure < 0.0)
    throw Error(ErrorCode::kMalformedRecord, "measure must be finite and non-negative");
  if (!slot_aligned(record.date, slot_duration_))
    throw Error(ErrorCode::kMalformedRecord,
                "date " + format_timestamp(record.date) + " is not slot-aligned");
  if (record.location_id.empty())
    throw Error(ErrorCode::kMalformedRecord, "record has no location id");

  std::string prov = record_provenance(record);
  if (!seen_records_.insert(prov).second) return {};

  const std::string loc_key = location_key(record);
  const NodeId loc = add_location(loc_key, record.location_name.empty()
                                               ? loc_key
                                               : (record.direction
                                                      ? record.location_name + " " + *record.direction
                                                      : record.location_name));
  bool abnormal = false;
  std::string tag;
  if (record.measure_kind == MeasureKind::kRain) {
    abnormal = record.measure > rain_threshold_;
    tag = abnormal ? std::string(kRainTag) : std::string(kNoEventTag);
  } else {
    auto it = volume_thresholds_.find(loc_key);
    abnormal = it != volume_thresholds_.end() && record.measure > it->second;
    tag = abnormal ? std::string(kTrafficTag) : std::string(kNoEventTag);
  }
  const NodeId t = time_node(TimeRef::span(record.date, slot_duration_));
  const NodeId v = value_node(record.measure, std::string(measure_unit(record.measure_kind)));
  const NodeId e = new_node(EventPayload{tag, record.measure_kind, prov});

  std::vector<Triple> emitted = {
      {e, Relation::kOccursAt, t, prov},
      {e, Relation::kAtLocation, loc, prov},
      {e, Relation::kHasValue, v, prov},
  };
  triples_.insert(triples_.end(), emitted.begin(), emitted.end());
  return emitted;
}

void KgBuilder::add_near(const std::string& key_a, const std::string& key_b) {
  auto a = locations_.find(key_a);
  auto b = locations_.find(key_b);
  if (a == locations_.end())
    throw Error(ErrorCode::kUnknownLocation, "near-edge endpoint " + key_a);
  if (b == locations_.end())
    throw Error(ErrorCode::kUnknownLocation, "near-edge endpoint " + key_b);
  if (a->second == b->second) return;
  auto pair = key_a < key_b ? std::make_pair(key_a, key_b) : std::make_pair(key_b, key_a);
  if (!near_pairs_.insert(pair).second) return;
  const NodeId lo = locations_.at(pair.first);
  const NodeId hi = locations_.at(pair.second);
  triples_.push_back({lo, Relation::kNear, hi, "near:" + pair.first + "|" + pair.second});
}

TemporalKG KgBuilder::build() && {
  return TemporalKG::from_parts(slot_duration_, std::move(nodes_), std::move(triples_));
}

// --- names -----------------------------------------------------------------

std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::kTime: return "TIME";
    case NodeKind::kLocation: return "LOCATION";
    case NodeKind::kEvent: return "EVENT";
    case NodeKind::kValue: return "VALUE";
  }
  return "?";
}

std::string_view to_string(MeasureKind k) {
  return k == MeasureKind::kRain ? "RAIN" : "VOLUME";
}

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::kOccursAt: return "occursAt";
    case Relation::kAtLocation: return "atLocation";
    case Relation::kHasValue: return "hasValue";
    case Relation::kBefore: return "before";
    case Relation::kAfter: return "after";
    case Relation::kDuring: return "during";
    case Relation::kOverlaps: return "overlaps";
    case Relation::kNear: return "near";
  }
  return "?";
}

std::optional<NodeKind> parse_node_kind(std::string_view s) {
  for (NodeKind k : {NodeKind::kTime, NodeKind::kLocation, NodeKind::kEvent, NodeKind::kValue})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::optional<MeasureKind> parse_measure_kind(std::string_view s) {
  if (s == "RAIN") return MeasureKind::kRain;
  if (s == "VOLUME") return MeasureKind::kVolume;
  return std::nullopt;
}

std::optional<Relation> parse_relation(std::string_view s) {
  for (Relation r : {Relation::kOccursAt, Relation::kAtLocation, Relation::kHasValue,
                     Relation::kBefore, Relation::kAfter, Relation::kDuring,
                     Relation::kOverlaps, Relation::kNear})
    if (to_string(r) == s) return r;
  return std::nullopt;
}

std::string_view measure_family(MeasureKind k) {
  return k == MeasureKind::kRain ? kRainTag : kTrafficTag;
}

std::string_view measure_unit(MeasureKind k) {
  return k == MeasureKind::kRain ? "mm" : "vehicles";
}

}  // namespace tkgqa
