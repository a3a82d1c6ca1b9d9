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

#include "tkgqa/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "tkgqa/error.hpp"

namespace tkgqa {

namespace {

constexpr std::array<std::string_view, 5> kIrishColumns = {"date", "county", "station_id",
                                                            "station", "rain"};
constexpr std::array<std::string_view, 4> kSydneyColumns = {"date", "station_id", "station",
                                                             "rain"};
constexpr std::array<std::string_view, 4> kTfnswColumns = {"date", "station_id", "direction",
                                                            "volume"};

std::string normalize_header(std::string_view h) {
  std::string out;
  for (char c : h) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) out.push_back(static_cast<char>(std::tolower(u)));
  }
  return out;
}

// RFC 4180-style split: quoted fields, doubled quotes inside quotes.
std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

bool record_less(const RawRecord& a, const RawRecord& b) {
  const std::string ka = location_key(a), kb = location_key(b);
  if (ka != kb) return ka < kb;
  if (a.date != b.date) return a.date < b.date;
  if (a.measure_kind != b.measure_kind) return a.measure_kind < b.measure_kind;
  return a.measure < b.measure;
}

}  // namespace

std::optional<Schema> parse_schema(std::string_view s) {
  if (s == "irish") return Schema::kIrish;
  if (s == "sydney") return Schema::kSydney;
  if (s == "tfnsw") return Schema::kTfnsw;
  return std::nullopt;
}

std::string_view to_string(Schema s) {
  switch (s) {
    case Schema::kIrish: return "irish";
    case Schema::kSydney: return "sydney";
    case Schema::kTfnsw: return "tfnsw";
  }
  return "?";
}

std::span<const std::string_view> schema_columns(Schema s) {
  switch (s) {
    case Schema::kIrish: return kIrishColumns;
    case Schema::kSydney: return kSydneyColumns;
    case Schema::kTfnsw: return kTfnswColumns;
  }
  return {};
}

ParseResult parse_corpus(std::istream& in, Schema schema, const ParseOptions& opts) {
  ParseResult result;
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorCode::kSchemaMismatch, "empty corpus (no header row)");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);

  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t> by_name;
  for (std::size_t i = 0; i < header.size(); ++i)
    by_name.emplace(normalize_header(header[i]), i);
  std::map<std::string_view, std::size_t> col;
  for (std::string_view c : schema_columns(schema)) {
    auto it = by_name.find(normalize_header(c));
    if (it == by_name.end())
      throw Error(ErrorCode::kSchemaMismatch,
                  std::string(to_string(schema)) + " corpus lacks column '" + std::string(c) + "'");
    col.emplace(c, it->second);
  }
  const std::string_view measure_col = schema == Schema::kTfnsw ? "volume" : "rain";
  const MeasureKind kind = schema == Schema::kTfnsw ? MeasureKind::kVolume : MeasureKind::kRain;
  std::size_t name_col = header.size();  // sentinel: no name column
  if (schema != Schema::kTfnsw) name_col = col.at("station");
  else if (auto it = by_name.find("station"); it != by_name.end()) name_col = it->second;

  std::set<std::string> seen;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++result.stats.rows_in;
    const auto fields = split_csv_line(line);
    auto field = [&](std::size_t i) -> std::string_view {
      return i < fields.size() ? trim(fields[i]) : std::string_view();
    };
    auto date = parse_timestamp(field(col.at("date")), opts.utc_offset);
    auto measure = parse_number(field(col.at(measure_col)));
    const std::string_view station_id = field(col.at("station_id"));
    if (!date || !measure || *measure < 0.0 || station_id.empty()) {
      ++result.stats.skipped;
      continue;
    }
    RawRecord r;
    r.date = opts.slot_duration > 0 ? floor_to_slot(*date, opts.slot_duration) : *date;
    r.location_id = std::string(station_id);
    r.location_name = std::string(field(name_col));
    r.measure = *measure;
    r.measure_kind = kind;
    if (schema == Schema::kTfnsw) {
      const std::string_view dir = field(col.at("direction"));
      if (!dir.empty()) r.direction = std::string(dir);
    }
    if (!seen.insert(record_provenance(r)).second) {
      ++result.stats.duplicates;
      continue;
    }
    result.records.push_back(std::move(r));
    ++result.stats.kept;
  }
  return result;
}

ParseResult parse_corpus(const std::string& path, Schema schema, const ParseOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  return parse_corpus(in, schema, opts);
}

void write_corpus(std::span<const RawRecord> records, Schema schema, std::ostream& out) {
  const auto cols = schema_columns(schema);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const RawRecord& r : records) {
    const std::string measure = format_number(r.measure);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const std::string_view c = cols[i];
      std::string v;
      if (c == "date") v = format_timestamp(r.date);
      else if (c == "county") v = "";
      else if (c == "station_id") v = r.location_id;
      else if (c == "station") v = r.location_name;
      else if (c == "direction") v = r.direction.value_or("");
      else v = measure;
      out << (i ? "," : "") << csv_field(v);
    }
    out << '\n';
  }
}

std::vector<RawRecord> merge_records(std::vector<std::vector<RawRecord>> parts) {
  std::vector<RawRecord> all;
  for (auto& p : parts) all.insert(all.end(), std::make_move_iterator(p.begin()),
                                   std::make_move_iterator(p.end()));
  std::stable_sort(all.begin(), all.end(), record_less);
  std::set<std::string> seen;
  std::vector<RawRecord> out;
  for (auto& r : all)
    if (seen.insert(record_provenance(r)).second) out.push_back(std::move(r));
  return out;
}

double nearest_rank_percentile(std::vector<double> values, double p) {
  if (values.empty()) throw Error(ErrorCode::kInvalidParams, "percentile of no values");
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorCode::kInvalidParams, "percentile outside (0,1]");
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(values.size())));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

TemporalKG build_kg(std::span<const RawRecord> records, Seconds slot_duration,
                    std::span<const NearEdge> near_edges, const BuildOptions& opts) {
  KgBuilder builder(slot_duration);
  builder.set_rain_threshold(opts.rain_threshold);

  std::vector<RawRecord> sorted(records.begin(), records.end());
  std::stable_sort(sorted.begin(), sorted.end(), record_less);

  std::map<std::string, std::vector<double>> volumes;
  for (const RawRecord& r : sorted)
    if (r.measure_kind == MeasureKind::kVolume) volumes[location_key(r)].push_back(r.measure);
  for (auto& [key, vals] : volumes)
    builder.set_volume_threshold(key, nearest_rank_percentile(std::move(vals),
                                                              opts.traffic_percentile));

  for (const RawRecord& r : sorted) builder.map_record(r);
  for (const NearEdge& e : near_edges) builder.add_near(e.a, e.b);
  return std::move(builder).build();
}

std::string format_stats_table(const KgStats& s, std::string_view title) {
  std::string period = "-";
  if (s.period)
    period = format_timestamp(s.period->start).substr(0, 10) + " -- " +
             format_timestamp(s.period->end - 1).substr(0, 10);
  std::ostringstream os;
  os << title << '\n';
  os << std::left << std::setw(26) << "period" << std::setw(12) << "entities" << std::setw(12)
     << "relations" << "records\n";
  os << std::left << std::setw(26) << period << std::setw(12) << s.entities << std::setw(12)
     << s.relations << s.records << '\n';
  return os.str();
}

std::string synth_location_key(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "S%02d", index + 1);
  return buf;
}

std::vector<RawRecord> synth_corpus(const SynthParams& p) {
  if (!(p.event_rate >= 0.0 && p.event_rate <= 1.0))
    throw Error(ErrorCode::kInvalidParams, "event_rate must lie in [0, 1]");
  if (p.slot_duration <= 0 || p.span < p.slot_duration)
    throw Error(ErrorCode::kInvalidParams, "span must cover at least one slot");
  if (p.locations < 1) throw Error(ErrorCode::kInvalidParams, "need at least one location");
  if (!slot_aligned(p.start, p.slot_duration))
    throw Error(ErrorCode::kInvalidParams, "start must be slot-aligned");

  std::mt19937_64 rng(p.seed);
  const Seconds slots = p.span / p.slot_duration;
  std::vector<RawRecord> out;
  out.reserve(static_cast<std::size_t>(slots) * static_cast<std::size_t>(p.locations));
  for (int l = 0; l < p.locations; ++l) {
    const std::string key = synth_location_key(l);
    for (Seconds s = 0; s < slots; ++s) {
      const bool wet = unit_interval(rng()) < p.event_rate;
      const double amount = 0.2 * static_cast<double>(1 + (rng() % 25));
      RawRecord r;
      r.date = p.start + s * p.slot_duration;
      r.location_id = key;
      r.location_name = "STATION " + key.substr(1);
      r.measure = wet ? amount : 0.0;
      r.measure_kind = MeasureKind::kRain;
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<NearEdge> synth_near_edges(int locations) {
  std::vector<NearEdge> out;
  for (int i = 0; i + 1 < locations; ++i)
    out.push_back({synth_location_key(i), synth_location_key(i + 1)});
  return out;
}

}  // namespace tkgqa
