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

#include "tkgqa/controller.hpp"

#include <algorithm>
#include <map>

#include "tkgqa/error.hpp"
#include "tkgqa/synthesis.hpp"

namespace tkgqa {

namespace {

bool on(std::span<const NodeId> locations, NodeId loc) {
  return locations.empty() || std::find(locations.begin(), locations.end(), loc) != locations.end();
}

// Clause (i): no event carries two different times.
bool single_timed(std::span<const Observation> evidence) {
  std::map<std::uint32_t, TimeRef> when;
  for (const Observation& o : evidence) {
    auto [it, fresh] = when.emplace(o.event.value, o.time);
    if (!fresh && it->second != o.time) return false;
  }
  return true;
}

bool has_unprobed(const Evidence& ev, NodeId loc, const TimeRef& w) {
  for (Seconds s : slots_of(w, ev.slot_duration()))
    if (!ev.probed(loc, s)) return true;
  return false;
}

// Answer for a window the caller vouches for (or NO_ANSWER with a
// best-effort rationale when `t_star` is empty).
Answer synthesize(const QueryIntent& q, const Evidence& ev, std::optional<TimeRef> t_star,
                  double gamma) {
  const FilterResult filtered = contradiction_filter(ev.observations());
  Answer a;
  try {
    if (t_star) {
      a = fuse(q, filtered.kept, *t_star, gamma);
    } else {
      a = fuse(q, filtered.kept, q.window(), gamma);
      if (!is_q1(q.kind)) {
        a.verdict = Verdict::kNoAnswer;
        a.decisive_time.reset();
      }
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kEmptyEvidence) throw;
    a = Answer{};
  }
  a.conflicts = filtered.conflicts;
  return a;
}

Answer fallback_answer(const QueryIntent& q, const Evidence& ev, double gamma) {
  Answer a = synthesize(q, ev, std::nullopt, gamma);
  a.verdict = Verdict::kNoAnswer;
  a.decisive_time.reset();
  return a;
}

// Answer of an accepted judgment; t* is recomputed from evidence and only
// falls back to the judgment's own window when the verifier is not the
// rule-based one.
Answer accept(const QueryIntent& q, const Evidence& ev, const Judgment& j, double theta,
              double gamma) {
  if (j.candidate.verdict == Verdict::kNoAnswer) return fallback_answer(q, ev, gamma);
  if (is_q1(q.kind)) return synthesize(q, ev, q.window(), gamma);
  std::optional<TimeRef> t_star = select_decisive_time(ev, q, theta);
  if (!t_star) t_star = j.candidate.decisive_time;
  return synthesize(q, ev, t_star, gamma);
}

}  // namespace

void RunConfig::validate() const {
  if (!(theta > 0.0 && theta <= 1.0)) throw Error(ErrorCode::kInvalidParams, "theta outside (0,1]");
  if (t_max < 1) throw Error(ErrorCode::kInvalidParams, "t_max must be at least 1");
  if (!(lambda >= 0.0)) throw Error(ErrorCode::kInvalidParams, "lambda must be non-negative");
  if (!(gamma >= 0.0)) throw Error(ErrorCode::kInvalidParams, "gamma must be non-negative");
  if (radius < 0 || hop_cap < 0) throw Error(ErrorCode::kInvalidParams, "negative radius");
  if (budget == 0) throw Error(ErrorCode::kInvalidParams, "budget must be positive");
  if (neighborhood < 1) throw Error(ErrorCode::kInvalidParams, "neighborhood must be >= 1");
  if (single_pass_w < 0) throw Error(ErrorCode::kInvalidParams, "negative single-pass radius");
}

RetrievalParams RunConfig::retrieval() const {
  RetrievalParams p;
  p.radius = radius;
  p.hop_cap = hop_cap;
  p.budget = budget;
  return p;
}

std::size_t StepRecord::batch_size() const {
  std::size_t n = 0;
  for (const RetrievalBatch& b : batches) n += b.observations.size();
  return n;
}

std::vector<const Observation*> RunTrace::retrieved() const {
  std::vector<const Observation*> out;
  for (const StepRecord& s : steps)
    for (const RetrievalBatch& b : s.batches)
      for (const Observation& o : b.observations) out.push_back(&o);
  return out;
}

bool allen_consistent(std::span<const Observation> evidence, const RetrievalPattern& p,
                      const TimeRef& window, std::span<const NodeId> locations) {
  if (!single_timed(evidence)) return false;
  bool any = false, violation = false;
  for (const Observation& o : evidence) {
    if (!on(locations, o.location) || o.measure != p.event_kind) continue;
    any = true;
    if (o.violating && shares_time(allen_relation(o.time, window))) violation = true;
  }
  if (!any) return true;
  switch (p.predicate) {
    case Predicate::kEventExistsInWindow:
      return violation;
    case Predicate::kNoEventInWindow:
      return !violation;
    case Predicate::kNearestFeasibleBefore:
    case Predicate::kNearestFeasibleAfter:
      if (violation) return false;
      if (!p.reference) return true;
      return family(allen_relation(TimeRef::point(window.start),
                                   TimeRef::point(p.reference->start))) == required_family(p);
  }
  return false;
}

std::optional<std::pair<RetrievalPattern, TimeRef>> claimed_pattern(const QueryIntent& q,
                                                                    const Answer& c) {
  RetrievalPattern p = pattern_for(q);
  p.reference.reset();
  p.required_relation = AllenFamily::kDuring;
  const bool event_claim = (q.kind == QueryKind::kQ1Avoid && c.verdict == Verdict::kNo) ||
                           (q.kind == QueryKind::kQ1Detect && c.verdict == Verdict::kYes);
  if (is_q1(q.kind)) {
    p.predicate = event_claim ? Predicate::kEventExistsInWindow : Predicate::kNoEventInWindow;
    return std::pair{p, q.window()};
  }
  switch (c.verdict) {
    case Verdict::kNoNeed:
      p.predicate = Predicate::kNoEventInWindow;
      return std::pair{p, q.window()};
    case Verdict::kTime:
      if (!c.decisive_time) return std::nullopt;
      return std::pair{pattern_for(q), *c.decisive_time};
    default:
      return std::nullopt;
  }
}

RunResult run(const QueryIntent& q, const TemporalKG& kg, const RunConfig& cfg, Planner& planner,
              Verifier& verifier) {
  cfg.validate();
  validate(q, kg);
  if (cfg.mode == RunMode::kSinglePass)
    return run_single_pass(q, kg, cfg.single_pass_w, cfg, verifier);

  RunResult res;
  RunTrace& trace = res.trace;
  trace.mode = cfg.mode;
  Evidence ev(kg.slot_duration());
  SeenSet seen;
  const RetrievalParams rp = cfg.retrieval();
  const int t_max = cfg.mode == RunMode::kLimitedRecall ? std::min(cfg.t_max, 2) : cfg.t_max;
  RulePlanner rule_planner(cfg.lambda, cfg.theta, cfg.neighborhood);

  const InitialPlan init = plan_init(q);
  ReasoningState state{init.anchor, init.loc, init.pattern, 0};
  std::optional<Answer> answer;
  trace.termination = Termination::kStepLimit;

  try {
    for (int t = 0;; ++t) {
      trace.steps.push_back(StepRecord{});
      StepRecord& rec = trace.steps.back();
      rec.state = state;

      // ℓ walks the path inside the step, starting at the proposed location.
      std::vector<NodeId> order(q.location_path);
      auto first = std::find(order.begin(), order.end(), state.loc);
      if (first != order.end()) std::rotate(order.begin(), first, order.end());
      for (NodeId loc : order) {
        if (!has_unprobed(ev, loc, state.anchor)) continue;
        RetrievalBatch b = psi(kg, state.anchor, loc, state.pattern, rp, seen, t);
        ++trace.kg_calls;
        ev.add(b);
        rec.batches.push_back(std::move(b));
      }

      rec.judgment = verifier.judge(q, ev);
      ++trace.llm_calls;
      const auto claim = claimed_pattern(q, rec.judgment.candidate);
      // NO_ANSWER claims nothing about a window; only clause (i) applies.
      rec.consistent = claim ? allen_consistent(ev.observations(), claim->first, claim->second,
                                                q.location_path)
                             : single_timed(ev.observations());

      if (cfg.mode != RunMode::kNoSufficiencyCheck && rec.judgment.sufficient &&
          rec.consistent) {
        rec.stopped = true;
        trace.termination = Termination::kStopRule;
        answer = accept(q, ev, rec.judgment, cfg.theta, cfg.gamma);
        break;
      }
      if (t >= t_max) {
        trace.termination = cfg.mode == RunMode::kNoSufficiencyCheck
                                ? Termination::kStepsCompleted
                                : Termination::kStepLimit;
        break;
      }
      AnchorProposal prop;
      try {
        prop = planner.update(q, ev);
        ++trace.llm_calls;
        const bool in_horizon = prop.next_anchor.start >= q.anchor - q.horizon &&
                                prop.next_anchor.start <= q.anchor + q.horizon &&
                                prop.next_anchor.length() == q.duration &&
                                std::find(q.location_path.begin(), q.location_path.end(),
                                          prop.next_loc) != q.location_path.end();
        if (!in_horizon) {
          prop = rule_planner.update(q, ev);
          prop.fallback = true;
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kHorizonExhausted) throw;
        trace.termination = Termination::kHorizonExhausted;
        break;
      }
      rec.proposal = prop;
      state = ReasoningState{prop.next_anchor, prop.next_loc, prop.next_pattern, t + 1};
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kBudgetExceeded) throw;
    trace.termination = Termination::kBudgetExceeded;
    trace.note = e.what();
    if (!trace.steps.empty() && trace.steps.back().batches.empty() &&
        trace.steps.back().judgment.window == TimeRef{})
      trace.steps.pop_back();
  }

  if (!answer) {
    if (cfg.mode == RunMode::kNoSufficiencyCheck &&
        trace.termination != Termination::kBudgetExceeded) {
      // Without the stop rule the answer is read off the final anchor.
      if (is_q1(q.kind)) {
        answer = synthesize(q, ev, q.window(), cfg.gamma);
      } else {
        const WindowAssessment a = ev.assess(state.anchor, q.location_path, cfg.theta);
        answer = synthesize(q, ev,
                            a.violations.empty() ? std::optional(state.anchor) : std::nullopt,
                            cfg.gamma);
      }
    } else {
      trace.fallback = true;
      answer = fallback_answer(q, ev, cfg.gamma);
    }
  }
  trace.triples_retrieved = seen.triples;
  trace.final = *answer;
  res.answer = std::move(*answer);
  return res;
}

RunResult run(const QueryIntent& q, const TemporalKG& kg, const RunConfig& cfg) {
  RulePlanner planner(cfg.lambda, cfg.theta, cfg.neighborhood);
  RuleVerifier verifier(cfg.theta);
  return run(q, kg, cfg, planner, verifier);
}

TimeRef single_pass_range(const QueryIntent& q, int w, Seconds slot) {
  const Seconds pad = static_cast<Seconds>(w) * slot;
  const TimeRef base = q.window();
  switch (q.kind) {
    case QueryKind::kQ3EarliestAfter: return {base.start, base.end + pad};
    case QueryKind::kQ2LatestBefore: return {base.start - pad, base.end};
    default: return {base.start - pad, base.end + pad};
  }
}

RunResult run_single_pass(const QueryIntent& q, const TemporalKG& kg, int w,
                          const RunConfig& cfg, Verifier& verifier) {
  cfg.validate();
  validate(q, kg);
  if (w < 0) throw Error(ErrorCode::kInvalidParams, "negative single-pass radius");
  RunResult res;
  RunTrace& trace = res.trace;
  trace.mode = RunMode::kSinglePass;
  trace.termination = Termination::kSinglePass;
  Evidence ev(kg.slot_duration());
  SeenSet seen;
  const RetrievalParams rp = cfg.retrieval();
  const InitialPlan init = plan_init(q);
  const TimeRef range = single_pass_range(q, w, kg.slot_duration());

  trace.steps.push_back(StepRecord{});
  StepRecord& rec = trace.steps.back();
  rec.state = ReasoningState{range, init.loc, init.pattern, 0};
  std::optional<Answer> answer;
  try {
    for (NodeId loc : q.location_path) {
      if (!has_unprobed(ev, loc, range)) continue;
      RetrievalBatch b = psi(kg, range, loc, init.pattern, rp, seen, 0);
      ++trace.kg_calls;
      ev.add(b);
      rec.batches.push_back(std::move(b));
    }
    rec.judgment = verifier.judge(q, ev);
    ++trace.llm_calls;
    const auto claim = claimed_pattern(q, rec.judgment.candidate);
    rec.consistent = claim ? allen_consistent(ev.observations(), claim->first, claim->second,
                                              q.location_path)
                           : single_timed(ev.observations());
    if (rec.judgment.sufficient && rec.consistent) {
      rec.stopped = true;
      answer = accept(q, ev, rec.judgment, cfg.theta, cfg.gamma);
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kBudgetExceeded) throw;
    trace.note = e.what();
  }
  if (!answer) {
    trace.fallback = true;
    answer = fallback_answer(q, ev, cfg.gamma);
  }
  trace.triples_retrieved = seen.triples;
  trace.final = *answer;
  res.answer = std::move(*answer);
  return res;
}

RunResult run_single_pass(const QueryIntent& q, const TemporalKG& kg, int w,
                          const RunConfig& cfg) {
  RuleVerifier verifier(cfg.theta);
  return run_single_pass(q, kg, w, cfg, verifier);
}

std::string_view to_string(RunMode m) {
  switch (m) {
    case RunMode::kIterative: return "iterative";
    case RunMode::kSinglePass: return "single-pass";
    case RunMode::kLimitedRecall: return "limited-recall";
    case RunMode::kNoSufficiencyCheck: return "no-sufficiency";
  }
  return "?";
}

std::optional<RunMode> parse_run_mode(std::string_view s) {
  if (s == "iterative") return RunMode::kIterative;
  if (s == "single-pass") return RunMode::kSinglePass;
  if (s == "limited-recall") return RunMode::kLimitedRecall;
  if (s == "no-sufficiency") return RunMode::kNoSufficiencyCheck;
  return std::nullopt;
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::kStopRule: return "stop-rule";
    case Termination::kStepLimit: return "step-limit";
    case Termination::kHorizonExhausted: return "horizon-exhausted";
    case Termination::kBudgetExceeded: return "budget-exceeded";
    case Termination::kStepsCompleted: return "steps-completed";
    case Termination::kSinglePass: return "single-pass";
  }
  return "?";
}

}  // namespace tkgqa
