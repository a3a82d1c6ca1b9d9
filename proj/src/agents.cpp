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

#include "tkgqa/agents.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "tkgqa/error.hpp"

namespace tkgqa {

RetrievalPattern pattern_for(const QueryIntent& q) {
  RetrievalPattern p;
  p.event_kind = q.event_kind;
  p.threshold = q.threshold;
  switch (q.kind) {
    case QueryKind::kQ1Avoid:
      p.predicate = Predicate::kNoEventInWindow;
      p.required_relation = AllenFamily::kDuring;
      break;
    case QueryKind::kQ1Detect:
      p.predicate = Predicate::kEventExistsInWindow;
      p.required_relation = AllenFamily::kDuring;
      break;
    case QueryKind::kQ2LatestBefore:
      p.predicate = Predicate::kNearestFeasibleBefore;
      p.required_relation = AllenFamily::kBefore;
      p.reference = q.window();
      break;
    case QueryKind::kQ3EarliestAfter:
      p.predicate = Predicate::kNearestFeasibleAfter;
      p.required_relation = AllenFamily::kAfter;
      p.reference = q.window();
      break;
  }
  return p;
}

InitialPlan plan_init(const QueryIntent& q) {
  if (q.location_path.empty()) throw Error(ErrorCode::kInvalidParams, "empty location path");
  return {q.window(), q.location_path.front(), pattern_for(q)};
}

Judgment RuleVerifier::judge(const QueryIntent& q, const Evidence& ev) {
  Judgment j;
  const std::span<const NodeId> path = q.location_path;
  if (is_q1(q.kind)) {
    const TimeRef w = q.window();
    const WindowAssessment a = ev.assess(w, path, theta_);
    const bool violated = !a.violations.empty();
    j.window = w;
    j.confidence = a.coverage();
    j.sufficient = j.confidence >= theta_ && (violated || a.status == WindowStatus::kFeasible);
    const bool yes = q.kind == QueryKind::kQ1Avoid ? !violated : violated;
    j.candidate.verdict = yes ? Verdict::kYes : Verdict::kNo;
    if (!violated) j.candidate.decisive_time = w;
    j.missing = a.unprobed;
    return j;
  }
  const auto windows = candidate_windows(q, ev.slot_duration());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const WindowAssessment a = ev.assess(windows[i], path, theta_);
    if (a.status != WindowStatus::kFeasible && a.status != WindowStatus::kOpen) continue;
    j.window = windows[i];
    j.confidence = a.coverage();
    j.sufficient = a.status == WindowStatus::kFeasible;
    j.candidate.verdict = i == 0 ? Verdict::kNoNeed : Verdict::kTime;
    j.candidate.decisive_time = windows[i];
    j.missing = a.unprobed;
    return j;
  }
  // Every candidate within the horizon was rejected on observed evidence.
  j.window = windows.front();
  j.confidence = 1.0;
  j.sufficient = true;
  j.candidate.verdict = Verdict::kNoAnswer;
  return j;
}

std::vector<ScoredCandidate> enumerate_candidates(const QueryIntent& q, const Evidence& ev,
                                                  double lambda, double theta,
                                                  int neighborhood) {
  std::vector<ScoredCandidate> out;
  int taken = 0;
  for (const TimeRef& w : candidate_windows(q, ev.slot_duration())) {
    if (taken >= neighborhood) break;
    const WindowAssessment a = ev.assess(w, q.location_path, theta);
    const bool needs = is_q1(q.kind) ? !a.unprobed.empty() : a.status == WindowStatus::kOpen;
    if (!needs) continue;
    ++taken;
    const auto slots = slots_of(w, ev.slot_duration());
    for (NodeId loc : q.location_path) {
      double gain = 0.0;
      for (Seconds s : slots)
        if (!ev.probed(loc, s)) gain += 1.0;
      if (gain <= 0.0) continue;
      const double overlap = static_cast<double>(slots.size()) - gain;
      out.push_back({w, loc, gain, overlap, gain - lambda * overlap});
    }
  }
  return out;
}

AnchorProposal RulePlanner::update(const QueryIntent& q, const Evidence& ev) {
  const auto cands = enumerate_candidates(q, ev, lambda_, theta_, neighborhood_);
  if (cands.empty())
    throw Error(ErrorCode::kHorizonExhausted, "no candidate window within the horizon "
                                              "needs further evidence");
  const ScoredCandidate* best = &cands.front();
  for (const ScoredCandidate& c : cands)
    if (c.utility > best->utility) best = &c;
  AnchorProposal p;
  p.next_anchor = best->window;
  p.next_loc = best->loc;
  p.next_pattern = pattern_for(q);
  p.utility = best->utility;
  p.gain = best->gain;
  p.overlap = best->overlap;
  return p;
}

std::optional<QueryIntent> parse_question(std::string_view text, const TemporalKG& kg,
                                          Seconds horizon, Seconds utc_offset) {
  const std::string s(text);
  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

  static const std::regex date_re(
      R"((\d{1,2}-[A-Za-z]{3}-\d{4} \d{1,2}:\d{2})|(\d{4}-\d{2}-\d{2}[T ]\d{2}:\d{2}(?::\d{2})?Z?))");
  static const std::regex path_re(R"(\[([^\]]*)\])");
  static const std::regex item_re(R"re('([^']*)'|"([^"]*)")re");
  static const std::regex dur_re(
      R"((?:in|for|within|of)\s+(\d+(?:\.\d+)?)\s*(hours?|hrs?|h|minutes?|mins?)\b)");

  std::smatch m;
  if (!std::regex_search(s, m, date_re)) return std::nullopt;
  auto start = parse_timestamp(m.str(0), utc_offset);
  if (!start) return std::nullopt;

  QueryIntent q;
  q.anchor = *start;
  q.horizon = horizon;

  if (!std::regex_search(s, m, path_re)) return std::nullopt;
  const std::string items = m.str(1);
  for (auto it = std::sregex_iterator(items.begin(), items.end(), item_re);
       it != std::sregex_iterator(); ++it) {
    const std::string name = (*it)[1].matched ? (*it)[1].str() : (*it)[2].str();
    auto loc = kg.find_location(name);
    if (!loc) return std::nullopt;
    q.location_path.push_back(*loc);
  }
  if (q.location_path.empty()) return std::nullopt;

  if (!std::regex_search(lower, m, dur_re)) return std::nullopt;
  const double amount = std::stod(m.str(1));
  const bool minutes = m.str(2).front() == 'm';
  q.duration = static_cast<Seconds>(amount * static_cast<double>(minutes ? kMinute : kHour));
  if (q.duration <= 0) return std::nullopt;

  if (lower.find("latest") != std::string::npos) q.kind = QueryKind::kQ2LatestBefore;
  else if (lower.find("earliest") != std::string::npos || lower.find("postpone") != std::string::npos)
    q.kind = QueryKind::kQ3EarliestAfter;
  else if (lower.find("avoid") != std::string::npos) q.kind = QueryKind::kQ1Avoid;
  else if (lower.find("will it rain") != std::string::npos ||
           lower.find("will there be") != std::string::npos)
    q.kind = QueryKind::kQ1Detect;
  else
    return std::nullopt;

  if (lower.find("traffic") != std::string::npos || lower.find("congestion") != std::string::npos)
    q.event_kind = MeasureKind::kVolume;
  if (q.horizon < q.duration) q.horizon = q.duration;
  return q;
}

}  // namespace tkgqa
