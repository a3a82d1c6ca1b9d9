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

#include "tkgqa/report_io.hpp"

#include <sstream>

#include "tkgqa/agents.hpp"
#include "tkgqa/error.hpp"

namespace tkgqa {

using nlohmann::json;

namespace {

Seconds duration_field(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_number_integer()) return v.get<Seconds>();
  if (v.is_string()) {
    if (auto d = parse_duration(v.get<std::string>())) return *d;
  }
  throw Error(ErrorCode::kInvalidFormat, std::string("bad duration for '") + key + "'");
}

std::string loc_key(const TemporalKG& kg, NodeId id) {
  return kg.contains(id) && kg.node(id).kind() == NodeKind::kLocation ? kg.location(id).key
                                                                      : std::to_string(id.value);
}

json pattern_json(const RetrievalPattern& p) {
  json j{{"predicate", to_string(p.predicate)},
         {"event_kind", measure_family(p.event_kind)},
         {"threshold", p.threshold},
         {"required_relation", to_string(required_family(p))}};
  if (p.reference) j["reference"] = to_json(*p.reference);
  return j;
}

json observation_json(const Observation& o) {
  return {{"fact", o.provenance}, {"event", o.event.value}, {"time", to_json(o.time)},
          {"value", o.value},     {"violating", o.violating}, {"hop", o.hop}};
}

}  // namespace

QueryIntent query_from_json(const json& j, const TemporalKG& kg, Seconds default_horizon) {
  try {
    Seconds tz = 0;
    if (j.contains("tz")) {
      auto off = parse_utc_offset(j.at("tz").get<std::string>());
      if (!off) throw Error(ErrorCode::kInvalidFormat, "unsupported tz (use UTC or +HH:MM)");
      tz = *off;
    }
    const Seconds horizon = j.contains("horizon") ? duration_field(j, "horizon") : default_horizon;
    if (!j.contains("kind") && j.contains("question")) {
      auto q = parse_question(j.at("question").get<std::string>(), kg, horizon, tz);
      if (!q) throw Error(ErrorCode::kInvalidFormat, "question does not match a known template");
      return *q;
    }
    QueryIntent q;
    auto kind = parse_query_kind(j.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorCode::kInvalidFormat, "unknown query kind");
    q.kind = *kind;
    auto anchor = parse_timestamp(j.at("anchor").get<std::string>(), tz);
    if (!anchor) throw Error(ErrorCode::kInvalidFormat, "bad anchor timestamp");
    q.anchor = *anchor;
    q.duration = duration_field(j, "duration");
    q.horizon = horizon;
    for (const auto& name : j.at("path")) {
      auto id = kg.find_location(name.get<std::string>());
      if (!id)
        throw Error(ErrorCode::kUnknownLocation, "unknown location '" + name.get<std::string>() + "'");
      q.location_path.push_back(*id);
    }
    const std::string ek = j.value("event_kind", "rain");
    if (ek == "traffic") q.event_kind = MeasureKind::kVolume;
    else if (ek != "rain") throw Error(ErrorCode::kInvalidFormat, "unknown event kind '" + ek + "'");
    q.threshold = j.value("threshold", 0.0);
    validate(q, kg);
    return q;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidFormat, std::string("query: ") + e.what());
  }
}

json query_to_json(const QueryIntent& q, const TemporalKG& kg) {
  json path = json::array();
  for (NodeId id : q.location_path) path.push_back(loc_key(kg, id));
  return {{"kind", to_string(q.kind)},
          {"anchor", format_timestamp(q.anchor)},
          {"duration", format_duration(q.duration)},
          {"horizon", format_duration(q.horizon)},
          {"path", path},
          {"event_kind", measure_family(q.event_kind)},
          {"threshold", q.threshold}};
}

json to_json(const TimeRef& t) {
  return {{"start", format_timestamp(t.start)}, {"end", format_timestamp(t.end)}};
}

json to_json(const Answer& a, const TemporalKG& kg) {
  json j{{"verdict", to_string(a.verdict)}, {"answer", format_verdict(a)}};
  j["decisive_time"] = a.decisive_time ? to_json(*a.decisive_time) : json(nullptr);
  json rationale = json::array();
  for (const Citation& c : a.rationale)
    rationale.push_back({{"fact", c.provenance},
                         {"event", c.event.value},
                         {"weight", c.weight},
                         {"violating", c.violating},
                         {"text", c.text}});
  j["rationale"] = rationale;
  json conflicts = json::array();
  for (const ConflictSlot& c : a.conflicts) {
    json events = json::array();
    for (NodeId e : c.events) events.push_back(e.value);
    conflicts.push_back({{"location", loc_key(kg, c.location)},
                         {"time", to_json(c.time)},
                         {"event_kind", measure_family(c.measure)},
                         {"events", events}});
  }
  j["filter_report"] = {{"conflicts", conflicts}};
  return j;
}

json to_json(const RunTrace& t, const TemporalKG& kg) {
  json steps = json::array();
  for (const StepRecord& s : t.steps) {
    json batches = json::array();
    for (const RetrievalBatch& b : s.batches) {
      json scanned = json::array();
      for (NodeId l : b.scanned) scanned.push_back(loc_key(kg, l));
      json obs = json::array();
      for (const Observation& o : b.observations) obs.push_back(observation_json(o));
      batches.push_back({{"window", to_json(b.anchor)},
                         {"loc", loc_key(kg, b.loc)},
                         {"scanned", scanned},
                         {"observations", obs}});
    }
    json missing = json::array();
    for (auto [loc, t] : s.judgment.missing)
      missing.push_back(loc_key(kg, loc) + "@" + format_timestamp(t));
    if (!s.judgment.missing_text.empty()) missing.push_back(s.judgment.missing_text);
    json step{{"step", s.state.step},
              {"anchor", to_json(s.state.anchor)},
              {"loc", loc_key(kg, s.state.loc)},
              {"pattern", pattern_json(s.state.pattern)},
              {"batches", batches},
              {"batch_size", s.batch_size()},
              {"judgment",
               {{"sufficient", s.judgment.sufficient},
                {"confidence", s.judgment.confidence},
                {"candidate", format_verdict(s.judgment.candidate)},
                {"window", to_json(s.judgment.window)},
                {"missing", missing},
                {"fallback", s.judgment.fallback}}},
              {"consistent", s.consistent},
              {"stopped", s.stopped}};
    if (s.proposal)
      step["proposal"] = {{"next_anchor", to_json(s.proposal->next_anchor)},
                          {"next_loc", loc_key(kg, s.proposal->next_loc)},
                          {"utility", s.proposal->utility},
                          {"gain", s.proposal->gain},
                          {"overlap", s.proposal->overlap},
                          {"fallback", s.proposal->fallback}};
    steps.push_back(step);
  }
  return {{"mode", to_string(t.mode)},
          {"termination", to_string(t.termination)},
          {"fallback", t.fallback},
          {"note", t.note},
          {"totals",
           {{"llm_calls", t.llm_calls},
            {"kg_calls", t.kg_calls},
            {"triples_retrieved", t.triples_retrieved}}},
          {"steps", steps}};
}

json to_json(const EvalReport& r) {
  json kinds = json::object();
  for (const auto& [k, v] : r.per_kind)
    kinds[k] = {{"n", v.n},
                {"accuracy", v.accuracy},
                {"macro_f1", v.macro_f1},
                {"hit_rate_jaccard", v.hit_rate},
                {"hallucination_rate", v.hallucination_rate}};
  json hist = json::object();
  for (const auto& [steps, n] : r.cost.steps_histogram) hist[std::to_string(steps)] = n;
  return {{"n", r.n},
          {"accuracy", r.accuracy},
          {"macro_f1", r.macro_f1},
          {"hit_rate_jaccard", r.hit_rate},
          {"hallucination_rate", r.hallucination_rate},
          {"per_kind", kinds},
          {"hallucination_clauses", r.clauses},
          {"cost",
           {{"mean_kg_calls", r.cost.mean_kg_calls},
            {"mean_llm_calls", r.cost.mean_llm_calls},
            {"mean_triples", r.cost.mean_triples},
            {"median_steps", r.cost.median_steps},
            {"steps_histogram", hist}}}};
}

json to_json(const CostReport& r) {
  auto points = [](const std::vector<CostPoint>& v) {
    json a = json::array();
    for (const CostPoint& c : v)
      a.push_back({{"id", c.id},
                   {"d_star", c.d_star},
                   {"kg_calls", c.kg_calls},
                   {"triples", c.triples},
                   {"success", c.success}});
    return a;
  };
  json sp = json::object();
  for (const auto& [w, v] : r.single_pass) sp[std::to_string(w)] = points(v);
  json curve = json::array();
  for (const PrecisionPoint& p : r.precision_curve)
    curve.push_back({{"w", p.w},
                     {"median_precision", p.median_precision},
                     {"mean_triples", p.mean_triples},
                     {"successes", p.successes}});
  return {{"iterative", points(r.iterative)},
          {"iterative_fit",
           {{"slope", r.iterative_fit.slope},
            {"intercept", r.iterative_fit.intercept},
            {"r2", r.iterative_fit.r2}}},
          {"single_pass", sp},
          {"precision_curve", curve},
          {"minimal_w", r.minimal_w}};
}

std::string cost_csv(const CostReport& r) {
  std::ostringstream os;
  os << "section,w,id,d_star,kg_calls,triples,success\n";
  for (const CostPoint& c : r.iterative)
    os << "iterative,," << c.id << ',' << c.d_star << ',' << c.kg_calls << ',' << c.triples << ','
       << c.success << '\n';
  for (const auto& [w, v] : r.single_pass)
    for (const CostPoint& c : v)
      os << "single_pass," << w << ',' << c.id << ',' << c.d_star << ',' << c.kg_calls << ','
         << c.triples << ',' << c.success << '\n';
  os << "\nw,median_precision,mean_triples,successes\n";
  for (const PrecisionPoint& p : r.precision_curve)
    os << p.w << ',' << p.median_precision << ',' << p.mean_triples << ',' << p.successes << '\n';
  return os.str();
}

}  // namespace tkgqa
