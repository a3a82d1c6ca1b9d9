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

#ifndef TKGQA_QA_GEN_HPP_
#define TKGQA_QA_GEN_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tkgqa/kg.hpp"
#include "tkgqa/query.hpp"

namespace tkgqa {

enum class GoldKind { kTrue, kFalse, kTime, kNoNeed, kNoAnswer };

struct Gold {
  GoldKind kind = GoldKind::kNoAnswer;
  std::optional<Seconds> time;  // TIME only

  friend bool operator==(const Gold&, const Gold&) = default;
};

struct QAItem {
  std::string id;
  QueryKind kind = QueryKind::kQ1Avoid;  // Q1 items are phrased as avoidability
  Seconds anchor = 0;
  Seconds duration = 0;
  Seconds horizon = 0;
  std::vector<std::string> location_path;  // location keys
  MeasureKind event_kind = MeasureKind::kRain;
  double threshold = 0.0;
  std::string question_text;
  Gold gold;
  std::optional<Gold> gold_detect;  // Q1: the "will it rain" phrasing
  std::vector<std::string> sd;      // provenance ids, sorted

  friend bool operator==(const QAItem&, const QAItem&) = default;
};

/// Resolves the item's path against `kg` (UNKNOWN_LOCATION otherwise).
QueryIntent to_query(const QAItem& item, const TemporalKG& kg);

/// Brute-force label functions; each reads the per-location series with a
/// linear scan. Slots without any stored observation count as event-free.
bool i_exist(const TemporalKG& kg, std::span<const NodeId> path, Seconds t, Seconds dt,
             MeasureKind kind = MeasureKind::kRain, double threshold = 0.0);
/// max{t' < t, t' > t - L, slot-aligned | no event in [t', t'+Δt)}.
std::optional<Seconds> a_early(const TemporalKG& kg, std::span<const NodeId> path, Seconds t,
                               Seconds dt, Seconds horizon,
                               MeasureKind kind = MeasureKind::kRain, double threshold = 0.0);
/// min{t' > t, t' < t + L, slot-aligned | no event in [t', t'+Δt)}.
std::optional<Seconds> a_late(const TemporalKG& kg, std::span<const NodeId> path, Seconds t,
                              Seconds dt, Seconds horizon,
                              MeasureKind kind = MeasureKind::kRain, double threshold = 0.0);

/// Gold label of a query by exhaustive scan.
Gold gold_label(const TemporalKG& kg, const QueryIntent& q);

struct GenParams {
  int m = 600;
  Seconds duration = 4 * kHour;
  Seconds horizon = 12 * kHour;
  std::uint64_t seed = 7;
  int path_length = 1;  // random walk on the near graph
  MeasureKind event_kind = MeasureKind::kRain;
  double threshold = 0.0;
};

/// M Q1 items at anchors drawn uniformly from slot boundaries in
/// [coverage.start + L, coverage.end - L - Δt]; one Q2 and one Q3 item per
/// anchor whose window holds an event. Items are ordered by (anchor, kind,
/// path) and duplicates removed. Throws INSUFFICIENT_COVERAGE when no anchor
/// fits.
std::vector<QAItem> generate(const TemporalKG& kg, const GenParams& params);

/// Provenance ids of a minimal evidence set for the item's gold label.
/// Throws NO_GOLD_LABEL when the label is not derivable from the graph.
std::vector<std::string> minimal_evidence(const TemporalKG& kg, const QAItem& item);

/// True when the gold label follows from the observations in `evidence`
/// alone: every cell of a claimed dry window observed without a violation,
/// every rejected window holding a violating observation.
bool derivable(const TemporalKG& kg, const QAItem& item, const std::set<std::string>& evidence);

std::string question_text(const TemporalKG& kg, const QAItem& item);

std::string_view to_string(GoldKind g);
std::optional<GoldKind> parse_gold_kind(std::string_view s);
std::string format_gold(const Gold& g);

void write_qa_jsonl(std::span<const QAItem> items, std::ostream& out);
/// Reads item lines; lines of other record types are skipped.
std::vector<QAItem> read_qa_jsonl(std::istream& in);

}  // namespace tkgqa

#endif  // TKGQA_QA_GEN_HPP_
