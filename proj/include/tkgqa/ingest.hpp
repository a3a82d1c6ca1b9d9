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

#ifndef TKGQA_INGEST_HPP_
#define TKGQA_INGEST_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tkgqa/kg.hpp"

namespace tkgqa {

enum class Schema { kIrish, kSydney, kTfnsw };

std::optional<Schema> parse_schema(std::string_view s);
std::string_view to_string(Schema s);

/// Declared columns of a corpus schema, in canonical write order. Header
/// matching ignores case, spaces and underscores ("station ID" ==
/// "station_id"); undeclared columns (humidity, sunlight, ...) are ignored.
///
///   IRISH   date, county, station_id, station, rain     (mm per hour)
///   SYDNEY  date, station_id, station, rain             (mm per 30 min)
///   TFNSW   date, station_id, direction, volume         (vehicles per hour)
std::span<const std::string_view> schema_columns(Schema s);

struct ParseOptions {
  /// Offset of corpus-local time from UTC; subtracted on parse.
  Seconds utc_offset = 0;
  /// When positive, timestamps are floored to this slot.
  Seconds slot_duration = 0;
};

struct ParseStats {
  std::size_t rows_in = 0;
  std::size_t kept = 0;
  std::size_t duplicates = 0;
  std::size_t skipped = 0;  // unparseable date or measure, negative measure
};

struct ParseResult {
  std::vector<RawRecord> records;
  ParseStats stats;
};

ParseResult parse_corpus(std::istream& in, Schema schema, const ParseOptions& opts = {});
ParseResult parse_corpus(const std::string& path, Schema schema,
                         const ParseOptions& opts = {});

/// Writes records back in the schema's canonical column order (UTC
/// timestamps, so re-parse with a zero offset).
void write_corpus(std::span<const RawRecord> records, Schema schema, std::ostream& out);

/// Deterministic merge of independently parsed files: sorted by location,
/// then time; exact duplicates across files are dropped.
std::vector<RawRecord> merge_records(std::vector<std::vector<RawRecord>> parts);

struct NearEdge {
  std::string a;
  std::string b;
};

struct BuildOptions {
  /// Rain events are measure strictly above this (mm).
  double rain_threshold = 0.0;
  /// Traffic events are volume strictly above this per-location percentile
  /// (nearest-rank) of the ingested span.
  double traffic_percentile = 0.95;
};

/// Nearest-rank percentile of `values` (p in (0, 1]).
double nearest_rank_percentile(std::vector<double> values, double p);

/// Maps every record through the graph mapper and adds the declared
/// near-edges. Records are processed in (location, time) order.
TemporalKG build_kg(std::span<const RawRecord> records, Seconds slot_duration,
                    std::span<const NearEdge> near_edges = {},
                    const BuildOptions& opts = {});

/// Stats table with the columns period | entities | relations | records.
std::string format_stats_table(const KgStats& stats, std::string_view title);

struct SynthParams {
  int locations = 3;
  Seconds start = 1704067200;  // 2024-01-01T00:00:00Z
  Seconds span = 14 * kDay;
  Seconds slot_duration = 1800;
  double event_rate = 0.3;
  std::uint64_t seed = 7;
};

/// One RAIN record per slot per location; a slot is wet with probability
/// event_rate. Deterministic for a given seed on every platform.
std::vector<RawRecord> synth_corpus(const SynthParams& params);

/// Key of the i-th synthetic location ("S01", "S02", ...).
std::string synth_location_key(int index);

/// Path-graph near-edges S01-S02-...-Sn for synthetic corpora.
std::vector<NearEdge> synth_near_edges(int locations);

/// Portable uniform double in [0, 1) from a 64-bit draw.
inline double unit_interval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace tkgqa

#endif  // TKGQA_INGEST_HPP_
