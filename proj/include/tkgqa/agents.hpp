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

#ifndef TKGQA_AGENTS_HPP_
#define TKGQA_AGENTS_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tkgqa/answer.hpp"
#include "tkgqa/query.hpp"
#include "tkgqa/retrieval.hpp"

namespace tkgqa {

struct Judgment {
  bool sufficient = false;
  double confidence = 0.0;
  Answer candidate;
  std::vector<std::pair<NodeId, Seconds>> missing;  // unprobed (location, slot) cells
  std::string missing_text;                          // free-text MISSING line of a remote reply
  TimeRef window;       // candidate window the judgment is about
  bool fallback = false;  // produced by the rule-based stand-in for a failed remote call
};

struct AnchorProposal {
  TimeRef next_anchor;
  NodeId next_loc;
  RetrievalPattern next_pattern;
  double utility = 0.0;
  double gain = 0.0;
  double overlap = 0.0;
  bool fallback = false;
};

struct InitialPlan {
  TimeRef anchor;
  NodeId loc;
  RetrievalPattern pattern;
};

RetrievalPattern pattern_for(const QueryIntent& q);

/// τ(0) = [t, t+Δt), ℓ(0) = first path location, p(0) by query kind.
InitialPlan plan_init(const QueryIntent& q);

class Verifier {
 public:
  virtual ~Verifier() = default;
  virtual Judgment judge(const QueryIntent& q, const Evidence& evidence) = 0;
};

class Planner {
 public:
  virtual ~Planner() = default;
  /// Throws HORIZON_EXHAUSTED when no candidate window needs more evidence.
  virtual AnchorProposal update(const QueryIntent& q, const Evidence& evidence) = 0;
};

/// Coverage-based verifier. Q1: the anchor window, confidence = coverage.
/// Q2/Q3: walks the candidate windows in scan order; the anchor window
/// feasible gives NO_NEED, the first feasible candidate gives TIME, the first
/// still-open window makes the judgment insufficient, and a fully rejected
/// horizon gives NO_ANSWER.
class RuleVerifier final : public Verifier {
 public:
  explicit RuleVerifier(double theta = 1.0) : theta_(theta) {}
  Judgment judge(const QueryIntent& q, const Evidence& evidence) override;

 private:
  double theta_;
};

struct ScoredCandidate {
  TimeRef window;
  NodeId loc;
  double gain = 0.0;     // unread cells at loc
  double overlap = 0.0;  // already-read cells at loc
  double utility = 0.0;  // gain - lambda * overlap
};

/// N_τ x N_ℓ with scores: N_τ is the first `neighborhood` candidate windows
/// in scan order that still need evidence, N_ℓ the path. Only entries with
/// positive gain are listed, in (window scan order, path order).
std::vector<ScoredCandidate> enumerate_candidates(const QueryIntent& q, const Evidence& evidence,
                                                  double lambda, double theta,
                                                  int neighborhood);

/// Exact-coverage planner: argmax utility over enumerate_candidates, first
/// listed wins ties.
class RulePlanner final : public Planner {
 public:
  explicit RulePlanner(double lambda = 0.5, double theta = 1.0, int neighborhood = 1)
      : lambda_(lambda), theta_(theta), neighborhood_(neighborhood) {}
  AnchorProposal update(const QueryIntent& q, const Evidence& evidence) override;

 private:
  double lambda_;
  double theta_;
  int neighborhood_;
};

/// Recognizes the generator's question templates (and close variants):
/// a start time ("11-Mar-2024 04:00" or ISO), a bracketed location path, a
/// duration ("in 4 hours", "for 90 minutes") and the kind cue ("latest ...
/// leave early" for Q2, "earliest ... leave late" / "postpone" for Q3,
/// "avoid" for Q1 avoidability, "will it rain" for Q1 detection). Returns
/// nullopt when any part is missing or a location is unknown.
std::optional<QueryIntent> parse_question(std::string_view text, const TemporalKG& kg,
                                          Seconds horizon, Seconds utc_offset = 0);

}  // namespace tkgqa

#endif  // TKGQA_AGENTS_HPP_
