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

#ifndef TKGQA_CONTROLLER_HPP_
#define TKGQA_CONTROLLER_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tkgqa/agents.hpp"
#include "tkgqa/answer.hpp"
#include "tkgqa/query.hpp"
#include "tkgqa/retrieval.hpp"

namespace tkgqa {

enum class RunMode { kIterative, kSinglePass, kLimitedRecall, kNoSufficiencyCheck };

struct RunConfig {
  double theta = 1.0;
  int t_max = 6;
  double lambda = 0.5;
  double gamma = 1.0;
  int radius = 0;
  int hop_cap = 1;
  std::size_t budget = 1'000'000;
  RunMode mode = RunMode::kIterative;
  int neighborhood = 1;  // |N_τ| for the rule-based planner
  int single_pass_w = 0;  // slots, SINGLE_PASS only

  /// Throws INVALID_PARAMS when a field is out of range.
  void validate() const;
  RetrievalParams retrieval() const;
};

struct ReasoningState {
  TimeRef anchor;
  NodeId loc;
  RetrievalPattern pattern;
  int step = 0;
};

struct StepRecord {
  ReasoningState state;
  std::vector<RetrievalBatch> batches;
  Judgment judgment;
  bool consistent = false;
  bool stopped = false;
  std::optional<AnchorProposal> proposal;

  std::size_t batch_size() const;
};

enum class Termination {
  kStopRule,
  kStepLimit,
  kHorizonExhausted,
  kBudgetExceeded,
  kStepsCompleted,  // NO_SUFFICIENCY_CHECK ran its steps
  kSinglePass,
};

struct RunTrace {
  RunMode mode = RunMode::kIterative;
  std::vector<StepRecord> steps;
  std::size_t llm_calls = 0;
  std::size_t kg_calls = 0;
  std::size_t triples_retrieved = 0;
  Termination termination = Termination::kStopRule;
  bool fallback = false;  // answer did not come from an accepted judgment
  std::string note;
  Answer final;

  /// Every observation retrieved during the run, in retrieval order.
  std::vector<const Observation*> retrieved() const;
};

struct RunResult {
  Answer answer;
  RunTrace trace;
};

/// (i) no event appears with two different times; (ii) the pattern's
/// relation holds on `window` over evidence at `locations` (all when empty):
/// NO_EVENT / NEAREST_* forbid a violating observation sharing time with the
/// window, EVENT_EXISTS requires one, and NEAREST_* additionally require the
/// window start to stand in the BEFORE/AFTER relation to the reference
/// anchor. Empty evidence is vacuously consistent.
bool allen_consistent(std::span<const Observation> evidence, const RetrievalPattern& p,
                      const TimeRef& window, std::span<const NodeId> locations = {});

/// Pattern and window that a candidate answer claims; nullopt for NO_ANSWER.
std::optional<std::pair<RetrievalPattern, TimeRef>> claimed_pattern(const QueryIntent& q,
                                                                    const Answer& candidate);

RunResult run(const QueryIntent& q, const TemporalKG& kg, const RunConfig& cfg, Planner& planner,
              Verifier& verifier);
/// Rule-based planner and verifier from `cfg`.
RunResult run(const QueryIntent& q, const TemporalKG& kg, const RunConfig& cfg);

/// One retrieval per path location over the window widened by `w` slots in
/// the query's search direction, one judgment, no iteration.
RunResult run_single_pass(const QueryIntent& q, const TemporalKG& kg, int w,
                          const RunConfig& cfg, Verifier& verifier);
RunResult run_single_pass(const QueryIntent& q, const TemporalKG& kg, int w,
                          const RunConfig& cfg);

/// The range a single pass of radius `w` slots reads.
TimeRef single_pass_range(const QueryIntent& q, int w, Seconds slot);

std::string_view to_string(RunMode m);
std::optional<RunMode> parse_run_mode(std::string_view s);
std::string_view to_string(Termination t);

}  // namespace tkgqa

#endif  // TKGQA_CONTROLLER_HPP_
