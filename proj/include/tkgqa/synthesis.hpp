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

#ifndef TKGQA_SYNTHESIS_HPP_
#define TKGQA_SYNTHESIS_HPP_

#include <optional>
#include <span>
#include <vector>

#include "tkgqa/answer.hpp"
#include "tkgqa/query.hpp"
#include "tkgqa/retrieval.hpp"

namespace tkgqa {

struct FilterResult {
  std::vector<Observation> kept;
  std::vector<ConflictSlot> conflicts;
};

/// Drops every observation of a (kind, slot, location) cell whose values
/// disagree and reports the cell. Everything else passes unchanged, in input
/// order.
FilterResult contradiction_filter(std::span<const Observation> evidence);

/// Start window of the certified answer: the anchor window for a feasible
/// Q1, otherwise the first feasible candidate in scan order provided no
/// earlier candidate is still open. Conflicted cells count as unknown.
std::optional<TimeRef> select_decisive_time(const Evidence& evidence, const QueryIntent& q,
                                            double theta = 1.0);

/// Weighted answer around t*: α(h) ∝ exp(-γ·|mid(h) - mid(t*)|) with the
/// distance in hours, over facts of the query's event kind at path
/// locations; weights sum to 1 and the rationale is in descending α. The
/// verdict is the query predicate evaluated on t*. Throws EMPTY_EVIDENCE
/// when no fact qualifies.
Answer fuse(const QueryIntent& q, std::span<const Observation> filtered, const TimeRef& t_star,
            double gamma = 1.0);

}  // namespace tkgqa

#endif  // TKGQA_SYNTHESIS_HPP_
