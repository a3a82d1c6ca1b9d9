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

#ifndef TKGQA_KG_HPP_
#define TKGQA_KG_HPP_

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "tkgqa/allen.hpp"
#include "tkgqa/time.hpp"

namespace tkgqa {

struct NodeId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

using TripleIndex = std::uint32_t;

enum class NodeKind { kTime, kLocation, kEvent, kValue };
enum class MeasureKind { kRain, kVolume };

/// Event tags. Zero-measure and below-threshold observations are stored
/// explicitly as kNoEventTag so that window coverage can be proven.
inline constexpr std::string_view kRainTag = "rain";
inline constexpr std::string_view kTrafficTag = "traffic";
inline constexpr std::string_view kNoEventTag = "no-event";

struct Coordinates {
  double lat = 0.0;
  double lon = 0.0;
  friend bool operator==(const Coordinates&, const Coordinates&) = default;
};

struct TimePayload {
  TimeRef time;
};
struct LocationPayload {
  std::string key;
  std::string name;
  std::optional<Coordinates> coords;
};
struct EventPayload {
  std::string tag;
  MeasureKind measure = MeasureKind::kRain;
  std::string observation;  // provenance of the source record
};
struct ValuePayload {
  double magnitude = 0.0;
  std::string unit;
};

struct Node {
  NodeId id;
  std::variant<TimePayload, LocationPayload, EventPayload, ValuePayload> payload;

  NodeKind kind() const { return static_cast<NodeKind>(payload.index()); }
};

enum class Relation {
  kOccursAt,
  kAtLocation,
  kHasValue,
  kBefore,
  kAfter,
  kDuring,
  kOverlaps,
  kNear,
};

struct Triple {
  NodeId head;
  Relation rel = Relation::kOccursAt;
  NodeId tail;
  std::string provenance;

  friend bool operator==(const Triple&, const Triple&) = default;
};

/// One raw corpus row after normalization.
struct RawRecord {
  Seconds date = 0;
  std::string location_id;
  std::string location_name;
  double measure = 0.0;
  MeasureKind measure_kind = MeasureKind::kRain;
  std::optional<std::string> direction;

  friend bool operator==(const RawRecord&, const RawRecord&) = default;
};

/// Location identity of a record; traffic directions are separate counters.
std::string location_key(const RawRecord& r);
/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

/// Stable provenance id derived from record content.
std::string record_provenance(const RawRecord& r);

/// The three facts of one event, resolved.
struct EventFacts {
  NodeId event;
  NodeId time_node;
  NodeId location;
  NodeId value_node;
  TimeRef time;
  double value = 0.0;
  MeasureKind measure = MeasureKind::kRain;
  bool abnormal = false;
  std::array<TripleIndex, 3> triples{};  // occursAt, atLocation, hasValue
};

struct IndexEntry {
  TimeRef time;
  NodeId event;
};

struct WindowHit {
  TimeRef time;
  NodeId event;
  double value = 0.0;
};

struct KgStats {
  std::optional<TimeRef> period;
  std::size_t entities = 0;
  std::size_t relations = 0;
  std::size_t records = 0;
  std::size_t time_nodes = 0;
  std::size_t locations = 0;
  std::size_t value_nodes = 0;
  std::size_t near_edges = 0;
};

inline constexpr int kUnboundedHops = std::numeric_limits<int>::max();

/// Typed temporal multigraph. Immutable once constructed and safe for
/// concurrent readers.
class TemporalKG {
 public:
  TemporalKG() = default;

  /// Validates endpoint kinds and the three-edges-per-event invariant, then
  /// builds the per-location time index and the near adjacency.
  static TemporalKG from_parts(Seconds slot_duration, std::vector<Node> nodes,
                               std::vector<Triple> triples);

  Seconds slot_duration() const { return slot_duration_; }
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Triple> triples() const { return triples_; }
  const Node& node(NodeId id) const;
  bool contains(NodeId id) const { return id.value < nodes_.size(); }

  const LocationPayload& location(NodeId id) const;
  std::optional<NodeId> find_location(std::string_view key_or_name) const;
  /// All location nodes ordered by key.
  const std::vector<NodeId>& locations() const { return locations_; }

  const EventFacts& event(NodeId id) const;
  std::span<const EventFacts> events() const { return events_; }
  const std::string& provenance(NodeId event) const;

  /// Time-sorted observations at a location.
  std::span<const IndexEntry> series(NodeId loc) const;

  /// Observations at `loc` intersecting `w` (half-open), sorted by start.
  std::vector<WindowHit> window_query(NodeId loc, const TimeRef& w) const;

  /// Locations within `hops` near-edges of `loc`, including `loc`.
  std::vector<NodeId> near(NodeId loc, int hops) const;
  /// Same set with hop distances, ordered by (distance, id).
  std::vector<std::pair<NodeId, int>> near_with_distance(NodeId loc, int hops) const;
  std::span<const NodeId> neighbors(NodeId loc) const;

  std::optional<TimeRef> coverage() const { return coverage_; }
  KgStats stats() const;

 private:
  void require_location(NodeId loc) const;

  Seconds slot_duration_ = 0;
  std::vector<Node> nodes_;
  std::vector<Triple> triples_;
  std::vector<EventFacts> events_;
  std::unordered_map<std::uint32_t, std::size_t> event_slot_;
  std::unordered_map<std::uint32_t, std::vector<IndexEntry>> time_index_;
  std::unordered_map<std::uint32_t, Seconds> max_span_;
  std::unordered_map<std::uint32_t, std::vector<NodeId>> adjacency_;
  std::map<std::string, NodeId, std::less<>> location_by_key_;
  std::map<std::string, NodeId, std::less<>> location_by_name_;
  std::vector<NodeId> locations_;
  std::optional<TimeRef> coverage_;
  std::size_t near_edges_ = 0;
};

/// Derived temporal edge between two time nodes, computed on demand rather
/// than materialized.
Relation derived_relation(const TimeRef& a, const TimeRef& b);

/// Incremental graph construction with the deterministic record mapper.
class KgBuilder {
 public:
  explicit KgBuilder(Seconds slot_duration);

  /// Cutoff above which a record is an abnormal event. Rain defaults to 0
  /// (any measurable rain); volume thresholds are per location.
  void set_rain_threshold(double mm) { rain_threshold_ = mm; }
  void set_volume_threshold(const std::string& location_key, double threshold);

  NodeId add_location(const std::string& key, const std::string& name,
                      std::optional<Coordinates> coords = std::nullopt);

  /// Emits (e, occursAt, t), (e, atLocation, l), (e, hasValue, v) for a
  /// fresh event e. Re-mapping an identical record emits nothing.
  /// Throws MALFORMED_RECORD for negative/non-finite measures or a date
  /// that is not slot-aligned.
  std::vector<Triple> map_record(const RawRecord& record);

  /// Symmetric proximity; stored once per unordered pair.
  void add_near(const std::string& key_a, const std::string& key_b);

  std::size_t triple_count() const { return triples_.size(); }

  TemporalKG build() &&;

 private:
  NodeId new_node(decltype(Node::payload) payload);
  NodeId time_node(const TimeRef& t);
  NodeId value_node(double magnitude, const std::string& unit);

  Seconds slot_duration_;
  double rain_threshold_ = 0.0;
  std::map<std::string, double, std::less<>> volume_thresholds_;
  std::vector<Node> nodes_;
  std::vector<Triple> triples_;
  std::map<std::string, NodeId, std::less<>> locations_;
  std::map<TimeRef, NodeId> times_;
  std::map<std::pair<double, std::string>, NodeId> values_;
  std::unordered_set<std::string> seen_records_;
  std::set<std::pair<std::string, std::string>> near_pairs_;
};

std::string_view to_string(NodeKind k);
std::string_view to_string(MeasureKind k);
std::string_view to_string(Relation r);
std::optional<NodeKind> parse_node_kind(std::string_view s);
std::optional<MeasureKind> parse_measure_kind(std::string_view s);
std::optional<Relation> parse_relation(std::string_view s);

/// "rain" for RAIN measures, "traffic" for VOLUME measures.
std::string_view measure_family(MeasureKind k);
std::string_view measure_unit(MeasureKind k);

}  // namespace tkgqa

#endif  // TKGQA_KG_HPP_
