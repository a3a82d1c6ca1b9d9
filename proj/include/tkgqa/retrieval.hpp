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

#ifndef TKGQA_RETRIEVAL_HPP_
#define TKGQA_RETRIEVAL_HPP_

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tkgqa/allen.hpp"
#include "tkgqa/kg.hpp"

namespace tkgqa {

enum class Predicate {
  kNoEventInWindow,
  kEventExistsInWindow,
  kNearestFeasibleBefore,
  kNearestFeasibleAfter,
};

struct RetrievalPattern {
  Predicate predicate = Predicate::kNoEventInWindow;
  MeasureKind event_kind = MeasureKind::kRain;
  double threshold = 0.0;
  /// Window predicates require DURING; nearest-feasible predicates carry the
  /// direction of the answer relative to `reference` (BEFORE or AFTER).
  std::optional<AllenFamily> required_relation;
  std::optional<TimeRef> reference;  // query anchor window
};

/// Throws INVALID_PARAMS on a negative threshold or a relation that does not
/// fit the predicate.
void validate(const RetrievalPattern& p);

/// Required relation with the predicate default filled in.
AllenFamily required_family(const RetrievalPattern& p);

struct Observation {
  NodeId event;
  NodeId location;
  TimeRef time;
  double value = 0.0;
  MeasureKind measure = MeasureKind::kRain;
  bool violating = false;  // abnormal event with value above the pattern threshold
  int hop = 0;             // near-graph distance from the probed location
  std::string provenance;
  std::array<TripleIndex, 3> triples{};
};

struct RetrievalBatch {
  TimeRef anchor;  // the probed window
  NodeId loc;
  int step = 0;
  std::vector<Observation> observations;
  std::vector<NodeId> scanned;  // every location the window was read at

  std::size_t triple_count() const { return 3 * observations.size(); }
};

struct RetrievalParams {
  Seconds window_pad = 0;  // W(τ) = τ widened by this on both sides
  int radius = 0;
  int hop_cap = 1;
  std::size_t budget = 1'000'000;  // triples per run
};

/// Per-run dedup set and budget counter. Single owner.
struct SeenSet {
  std::unordered_set<std::uint32_t> events;
  std::size_t triples = 0;
};

/// Event kind, value-vs-threshold classification and the Allen test of the
/// observation time against the window. Returns nullopt when `h` does not
/// match; otherwise whether it is violating.
std::optional<bool> match(const EventFacts& h, const RetrievalPattern& p, const TimeRef& window);

/// Time-aware retrieval around `anchor` at `loc`. Every stored observation
/// intersecting W(anchor) within min(radius, hop_cap) hops that matches `p`
/// and is not already in `seen`. Throws BUDGET_EXCEEDED when the batch would
/// push the run past `params.budget` triples; `seen` is untouched then.
RetrievalBatch psi(const TemporalKG& kg, const TimeRef& anchor, NodeId loc,
                   const RetrievalPattern& p, const RetrievalParams& params, SeenSet& seen,
                   int step = 0);

/// Stable order: exact start match, then inside the window, then nearest in
/// time; ties by hop distance, then start, then event id.
void prioritize(std::vector<Observation>& candidates, const TimeRef& anchor);

enum class WindowStatus { kOpen, kFeasible, kInfeasible, kUndecidable };

struct WindowAssessment {
  WindowStatus status = WindowStatus::kOpen;
  std::size_t cells = 0;     // path locations x slots
  std::size_t observed = 0;  // cells with one unambiguous observation value
  std::size_t probed = 0;
  std::vector<const Observation*> violations;
  std::vector<std::pair<NodeId, Seconds>> unprobed;

  double coverage() const {
    return cells == 0 ? 0.0 : static_cast<double>(observed) / static_cast<double>(cells);
  }
};

/// Accumulated evidence of one run: deduplicated observations plus the
/// (location, slot) cells that have been read.
class Evidence {
 public:
  explicit Evidence(Seconds slot_duration) : slot_(slot_duration) {}

  void add(const RetrievalBatch& batch);
  void add(const Observation& o);
  void mark_probed(NodeId loc, const TimeRef& window);

  Seconds slot_duration() const { return slot_; }
  const std::vector<Observation>& observations() const { return observations_; }
  bool probed(NodeId loc, Seconds slot_start) const;
  std::size_t probed_cells() const { return probed_.size(); }

  /// Observations recorded for the cell starting at `slot_start`.
  std::vector<const Observation*> cell(NodeId loc, Seconds slot_start) const;

  /// Infeasible if an observed violation shares time with `window` at a path
  /// location; Feasible if coverage reaches theta; Undecidable if every cell
  /// was read and coverage is still short; Open otherwise. Cells whose
  /// observations disagree on the value count as unobserved.
  WindowAssessment assess(const TimeRef& window, std::span<const NodeId> path,
                          double theta) const;

 private:
  using Cell = std::pair<std::uint32_t, Seconds>;

  Seconds slot_;
  std::vector<Observation> observations_;
  std::unordered_set<std::uint32_t> events_;
  std::map<Cell, std::vector<std::size_t>> cells_;
  std::set<Cell> probed_;
};

/// Slot starts covering `window` (a point window covers its own slot).
std::vector<Seconds> slots_of(const TimeRef& window, Seconds slot);

std::string_view to_string(Predicate p);
std::optional<Predicate> parse_predicate(std::string_view s);
std::string_view to_string(WindowStatus s);

}  // namespace tkgqa

#endif  // TKGQA_RETRIEVAL_HPP_
