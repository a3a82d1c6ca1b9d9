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

#include "tkgqa/qa_gen.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <tuple>

#include <json.hpp>

#include "tkgqa/error.hpp"

namespace tkgqa {

namespace {

using nlohmann::json;

bool is_violation(const EventFacts& e, MeasureKind kind, double threshold) {
  return e.measure == kind && e.abnormal && e.value > threshold;
}

Seconds ceil_to_slot(Seconds t, Seconds slot) {
  const Seconds f = floor_to_slot(t, slot);
  return f == t ? t : f + slot;
}

std::vector<NodeId> resolve_path(const TemporalKG& kg, const std::vector<std::string>& keys) {
  std::vector<NodeId> out;
  for (const std::string& k : keys) {
    auto id = kg.find_location(k);
    if (!id) throw Error(ErrorCode::kUnknownLocation, "unknown location '" + k + "'");
    out.push_back(*id);
  }
  return out;
}

// Scan order of the candidate windows, anchor window first.
std::vector<Seconds> scan_starts(QueryKind kind, Seconds t, Seconds horizon, Seconds slot) {
  std::vector<Seconds> out{t};
  if (kind == QueryKind::kQ3EarliestAfter)
    for (Seconds s = t + slot; s < t + horizon; s += slot) out.push_back(s);
  if (kind == QueryKind::kQ2LatestBefore)
    for (Seconds s = t - slot; s > t - horizon; s -= slot) out.push_back(s);
  return out;
}

std::string trip_date(Seconds t) {
  static constexpr const char* kMonths[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                            "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  const std::string iso = format_timestamp(t);
  const int month = std::stoi(iso.substr(5, 2));
  return iso.substr(8, 2) + "-" + kMonths[month - 1] + "-" + iso.substr(0, 4) + " " +
         iso.substr(11, 5);
}

std::string duration_phrase(Seconds d) {
  if (d % kHour == 0) {
    const Seconds h = d / kHour;
    return std::to_string(h) + (h == 1 ? " hour" : " hours");
  }
  return std::to_string(d / kMinute) + " minutes";
}

json gold_json(const Gold& g) {
  json j{{"kind", to_string(g.kind)}};
  if (g.time) j["time"] = format_timestamp(*g.time);
  return j;
}

Gold gold_from_json(const json& j) {
  Gold g;
  auto k = parse_gold_kind(j.at("kind").get<std::string>());
  if (!k) throw Error(ErrorCode::kInvalidFormat, "unknown gold kind");
  g.kind = *k;
  if (j.contains("time")) {
    auto t = parse_timestamp(j.at("time").get<std::string>());
    if (!t) throw Error(ErrorCode::kInvalidFormat, "bad gold time");
    g.time = *t;
  }
  return g;
}

std::string_view short_kind(QueryKind k) {
  switch (k) {
    case QueryKind::kQ2LatestBefore: return "Q2";
    case QueryKind::kQ3EarliestAfter: return "Q3";
    default: return "Q1";
  }
}

// Observations of the item's kind per (path position, slot start).
class PathSeries {
 public:
  PathSeries(const TemporalKG& kg, std::span<const NodeId> path, MeasureKind kind)
      : kg_(kg), path_(path.begin(), path.end()), kind_(kind) {}

  std::vector<const EventFacts*> at(std::size_t pos, Seconds slot_start) const {
    std::vector<const EventFacts*> out;
    for (const IndexEntry& e : kg_.series(path_[pos])) {
      const EventFacts& f = kg_.event(e.event);
      if (f.measure == kind_ && f.time.start == slot_start) out.push_back(&f);
    }
    return out;
  }

  std::vector<std::pair<std::size_t, const EventFacts*>> violations(const TimeRef& w,
                                                                    double thr) const {
    std::vector<std::pair<std::size_t, const EventFacts*>> out;
    for (std::size_t p = 0; p < path_.size(); ++p)
      for (const IndexEntry& e : kg_.series(path_[p])) {
        const EventFacts& f = kg_.event(e.event);
        if (is_violation(f, kind_, thr) && intersects(f.time, w)) out.emplace_back(p, &f);
      }
    return out;
  }

  std::size_t size() const { return path_.size(); }

 private:
  const TemporalKG& kg_;
  std::vector<NodeId> path_;
  MeasureKind kind_;
};

}  // namespace

QueryIntent to_query(const QAItem& item, const TemporalKG& kg) {
  QueryIntent q;
  q.kind = item.kind;
  q.anchor = item.anchor;
  q.duration = item.duration;
  q.horizon = item.horizon;
  q.location_path = resolve_path(kg, item.location_path);
  q.event_kind = item.event_kind;
  q.threshold = item.threshold;
  return q;
}

bool i_exist(const TemporalKG& kg, std::span<const NodeId> path, Seconds t, Seconds dt,
             MeasureKind kind, double threshold) {
  const TimeRef w = TimeRef::span(t, dt);
  for (NodeId loc : path)
    for (const IndexEntry& e : kg.series(loc)) {
      const EventFacts& f = kg.event(e.event);
      if (is_violation(f, kind, threshold) && intersects(f.time, w)) return true;
    }
  return false;
}

std::optional<Seconds> a_early(const TemporalKG& kg, std::span<const NodeId> path, Seconds t,
                               Seconds dt, Seconds horizon, MeasureKind kind, double threshold) {
  const Seconds slot = kg.slot_duration();
  for (Seconds s = floor_to_slot(t - 1, slot); s > t - horizon; s -= slot)
    if (!i_exist(kg, path, s, dt, kind, threshold)) return s;
  return std::nullopt;
}

std::optional<Seconds> a_late(const TemporalKG& kg, std::span<const NodeId> path, Seconds t,
                              Seconds dt, Seconds horizon, MeasureKind kind, double threshold) {
  const Seconds slot = kg.slot_duration();
  for (Seconds s = floor_to_slot(t, slot) + slot; s < t + horizon; s += slot)
    if (!i_exist(kg, path, s, dt, kind, threshold)) return s;
  return std::nullopt;
}

Gold gold_label(const TemporalKG& kg, const QueryIntent& q) {
  const bool event = i_exist(kg, q.location_path, q.anchor, q.duration, q.event_kind, q.threshold);
  switch (q.kind) {
    case QueryKind::kQ1Avoid: return {event ? GoldKind::kFalse : GoldKind::kTrue, std::nullopt};
    case QueryKind::kQ1Detect: return {event ? GoldKind::kTrue : GoldKind::kFalse, std::nullopt};
    default: break;
  }
  if (!event) return {GoldKind::kNoNeed, std::nullopt};
  const auto t = q.kind == QueryKind::kQ2LatestBefore
                     ? a_early(kg, q.location_path, q.anchor, q.duration, q.horizon,
                               q.event_kind, q.threshold)
                     : a_late(kg, q.location_path, q.anchor, q.duration, q.horizon,
                              q.event_kind, q.threshold);
  if (!t) return {GoldKind::kNoAnswer, std::nullopt};
  return {GoldKind::kTime, *t};
}

std::string question_text(const TemporalKG& kg, const QAItem& item) {
  const bool traffic = item.event_kind == MeasureKind::kVolume;
  const std::string ev = traffic ? "heavy traffic" : "rain";
  std::string names = "[", home;
  for (std::size_t i = 0; i < item.location_path.size(); ++i) {
    auto id = kg.find_location(item.location_path[i]);
    std::string name = id ? kg.location(*id).name : item.location_path[i];
    if (name.empty()) name = item.location_path[i];
    if (i == 0) home = name;
    const char quote = name.find('\'') == std::string::npos ? '\'' : '"';
    names += (i ? ", " : "") + std::string(1, quote) + name + quote;
  }
  names += "]";
  std::string text = "I live near " + home + " and plan a trip starting " +
                     trip_date(item.anchor) + ", passing " + names + " in " +
                     duration_phrase(item.duration) + ". Given the " +
                     (traffic ? "traffic" : "weather") + ", can I avoid " + ev +
                     " during this time?";
  if (item.kind == QueryKind::kQ2LatestBefore || item.kind == QueryKind::kQ3EarliestAfter) {
    const bool early = item.kind == QueryKind::kQ2LatestBefore;
    text += std::string(" If I cannot avoid ") + ev + ", I could leave " +
            (early ? "early" : "late") + " instead: what is the " +
            (early ? "latest" : "earliest") + " time I can leave? Answer 'no need' if " + ev +
            " can be avoided, or 'no answer' if there is no such time.";
  }
  return text;
}

std::vector<QAItem> generate(const TemporalKG& kg, const GenParams& p) {
  if (p.m < 0 || p.duration <= 0 || p.horizon < p.duration || p.path_length < 1)
    throw Error(ErrorCode::kInvalidParams, "invalid generation parameters");
  const auto cov = kg.coverage();
  const Seconds slot = kg.slot_duration();
  if (!cov || kg.locations().empty())
    throw Error(ErrorCode::kInsufficientCoverage, "graph holds no observations");
  const Seconds lo = ceil_to_slot(cov->start + p.horizon, slot);
  const Seconds hi = floor_to_slot(cov->end - p.horizon - p.duration, slot);
  if (hi < lo)
    throw Error(ErrorCode::kInsufficientCoverage,
                "coverage too short for the horizon and duration on both sides");
  const auto n_slots = static_cast<std::uint64_t>((hi - lo) / slot + 1);
  const auto& locs = kg.locations();

  std::mt19937_64 rng(p.seed);
  std::vector<QAItem> items;
  for (int i = 0; i < p.m; ++i) {
    const Seconds t = lo + static_cast<Seconds>(rng() % n_slots) * slot;
    std::vector<NodeId> path{locs[rng() % locs.size()]};
    while (static_cast<int>(path.size()) < p.path_length) {
      std::vector<NodeId> next;
      for (NodeId n : kg.neighbors(path.back()))
        if (std::find(path.begin(), path.end(), n) == path.end()) next.push_back(n);
      if (next.empty()) break;
      std::sort(next.begin(), next.end());
      path.push_back(next[rng() % next.size()]);
    }
    QAItem base;
    base.anchor = t;
    base.duration = p.duration;
    base.horizon = p.horizon;
    for (NodeId n : path) base.location_path.push_back(kg.location(n).key);
    base.event_kind = p.event_kind;
    base.threshold = p.threshold;

    QueryIntent q = to_query(base, kg);
    const bool event = i_exist(kg, q.location_path, t, p.duration, p.event_kind, p.threshold);
    QAItem q1 = base;
    q1.kind = QueryKind::kQ1Avoid;
    q1.gold = {event ? GoldKind::kFalse : GoldKind::kTrue, std::nullopt};
    q1.gold_detect = Gold{event ? GoldKind::kTrue : GoldKind::kFalse, std::nullopt};
    items.push_back(std::move(q1));
    if (!event) continue;
    for (QueryKind k : {QueryKind::kQ2LatestBefore, QueryKind::kQ3EarliestAfter}) {
      QAItem it = base;
      it.kind = k;
      q.kind = k;
      it.gold = gold_label(kg, q);
      items.push_back(std::move(it));
    }
  }
  auto key = [](const QAItem& a) { return std::tie(a.anchor, a.kind, a.location_path); };
  std::sort(items.begin(), items.end(),
            [&](const QAItem& a, const QAItem& b) { return key(a) < key(b); });
  items.erase(std::unique(items.begin(), items.end(),
                          [&](const QAItem& a, const QAItem& b) { return key(a) == key(b); }),
              items.end());
  for (std::size_t i = 0; i < items.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "qa-%06zu", i + 1);
    items[i].id = buf;
    items[i].question_text = question_text(kg, items[i]);
    items[i].sd = minimal_evidence(kg, items[i]);
  }
  return items;
}

std::vector<std::string> minimal_evidence(const TemporalKG& kg, const QAItem& item) {
  const QueryIntent q = to_query(item, kg);
  const Seconds slot = kg.slot_duration();
  const PathSeries series(kg, q.location_path, q.event_kind);
  std::set<std::string> sd;

  auto all_cells = [&](const TimeRef& w) {
    for (std::size_t p = 0; p < series.size(); ++p)
      for (Seconds s = w.start; s < w.end; s += slot) {
        const auto obs = series.at(p, s);
        if (obs.empty())
          throw Error(ErrorCode::kNoGoldLabel, "unobserved slot " + format_timestamp(s) +
                                                   " leaves the label underivable");
        for (const EventFacts* f : obs) sd.insert(kg.provenance(f->event));
      }
  };
  // Greedy interval stabbing: windows by end, the rightmost violation of
  // each window not yet hit.
  auto stab = [&](std::vector<TimeRef> windows) {
    std::sort(windows.begin(), windows.end(),
              [](const TimeRef& a, const TimeRef& b) { return a.end < b.end; });
    std::vector<const EventFacts*> chosen;
    for (const TimeRef& w : windows) {
      const bool hit = std::any_of(chosen.begin(), chosen.end(),
                                   [&](const EventFacts* f) { return intersects(f->time, w); });
      if (hit) continue;
      const auto v = series.violations(w, q.threshold);
      if (v.empty())
        throw Error(ErrorCode::kNoGoldLabel, "rejected window without a violation");
      auto best = v.front();
      for (const auto& c : v)
        if (c.second->time.start > best.second->time.start ||
            (c.second->time.start == best.second->time.start && c.first < best.first))
          best = c;
      chosen.push_back(best.second);
      sd.insert(kg.provenance(best.second->event));
    }
  };

  const TimeRef w0 = q.window();
  const Gold& g = item.gold;
  if (is_q1(item.kind)) {
    const bool event = item.kind == QueryKind::kQ1Avoid ? g.kind == GoldKind::kFalse
                                                        : g.kind == GoldKind::kTrue;
    if (event) {
      auto v = series.violations(w0, q.threshold);
      if (v.empty()) throw Error(ErrorCode::kNoGoldLabel, "no witness for the event label");
      auto best = *std::min_element(v.begin(), v.end(), [](const auto& a, const auto& b) {
        return std::tie(a.second->time.start, a.first) < std::tie(b.second->time.start, b.first);
      });
      sd.insert(kg.provenance(best.second->event));
    } else {
      all_cells(w0);
    }
  } else {
    const auto starts = scan_starts(item.kind, item.anchor, item.horizon, slot);
    std::vector<TimeRef> rejected;
    switch (g.kind) {
      case GoldKind::kNoNeed:
        all_cells(w0);
        break;
      case GoldKind::kTime: {
        if (!g.time) throw Error(ErrorCode::kNoGoldLabel, "TIME label without a time");
        for (Seconds s : starts) {
          if (s == *g.time) break;
          rejected.push_back(TimeRef::span(s, item.duration));
        }
        all_cells(TimeRef::span(*g.time, item.duration));
        stab(rejected);
        break;
      }
      case GoldKind::kNoAnswer:
        for (Seconds s : starts) rejected.push_back(TimeRef::span(s, item.duration));
        stab(rejected);
        break;
      default:
        throw Error(ErrorCode::kNoGoldLabel, "yes/no label on a time query");
    }
  }
  return {sd.begin(), sd.end()};
}

bool derivable(const TemporalKG& kg, const QAItem& item, const std::set<std::string>& evidence) {
  const QueryIntent q = to_query(item, kg);
  const Seconds slot = kg.slot_duration();
  // (path position, slot) -> observations present in `evidence`
  std::map<std::pair<std::size_t, Seconds>, std::vector<const EventFacts*>> cells;
  for (std::size_t p = 0; p < q.location_path.size(); ++p)
    for (const IndexEntry& e : kg.series(q.location_path[p])) {
      const EventFacts& f = kg.event(e.event);
      if (f.measure == q.event_kind && evidence.count(kg.provenance(f.event)))
        cells[{p, f.time.start}].push_back(&f);
    }
  auto infeasible = [&](const TimeRef& w) {
    for (const auto& [key, obs] : cells)
      for (const EventFacts* f : obs)
        if (is_violation(*f, q.event_kind, q.threshold) && intersects(f->time, w)) return true;
    return false;
  };
  auto feasible = [&](const TimeRef& w) {
    if (infeasible(w)) return false;
    for (std::size_t p = 0; p < q.location_path.size(); ++p)
      for (Seconds s = w.start; s < w.end; s += slot) {
        auto it = cells.find({p, s});
        if (it == cells.end() || it->second.empty()) return false;
        for (const EventFacts* f : it->second)
          if (f->value != it->second.front()->value) return false;
      }
    return true;
  };

  const TimeRef w0 = q.window();
  const Gold& g = item.gold;
  if (is_q1(item.kind)) {
    const bool event = item.kind == QueryKind::kQ1Avoid ? g.kind == GoldKind::kFalse
                                                        : g.kind == GoldKind::kTrue;
    return event ? infeasible(w0) : feasible(w0);
  }
  const auto starts = scan_starts(item.kind, item.anchor, item.horizon, slot);
  switch (g.kind) {
    case GoldKind::kNoNeed:
      return feasible(w0);
    case GoldKind::kTime:
      for (Seconds s : starts) {
        const TimeRef w = TimeRef::span(s, item.duration);
        if (s == *g.time) return feasible(w);
        if (!infeasible(w)) return false;
      }
      return false;
    case GoldKind::kNoAnswer:
      return std::all_of(starts.begin(), starts.end(), [&](Seconds s) {
        return infeasible(TimeRef::span(s, item.duration));
      });
    default:
      return false;
  }
}

std::string_view to_string(GoldKind g) {
  switch (g) {
    case GoldKind::kTrue: return "TRUE";
    case GoldKind::kFalse: return "FALSE";
    case GoldKind::kTime: return "TIME";
    case GoldKind::kNoNeed: return "NO_NEED";
    case GoldKind::kNoAnswer: return "NO_ANSWER";
  }
  return "?";
}

std::optional<GoldKind> parse_gold_kind(std::string_view s) {
  if (s == "TRUE") return GoldKind::kTrue;
  if (s == "FALSE") return GoldKind::kFalse;
  if (s == "TIME") return GoldKind::kTime;
  if (s == "NO_NEED") return GoldKind::kNoNeed;
  if (s == "NO_ANSWER") return GoldKind::kNoAnswer;
  return std::nullopt;
}

std::string format_gold(const Gold& g) {
  if (g.kind == GoldKind::kTime && g.time) return "TIME " + format_timestamp(*g.time);
  return std::string(to_string(g.kind));
}

void write_qa_jsonl(std::span<const QAItem> items, std::ostream& out) {
  for (const QAItem& it : items) {
    json j;
    j["type"] = "qa";
    j["id"] = it.id;
    j["kind"] = short_kind(it.kind);
    j["anchor"] = format_timestamp(it.anchor);
    j["duration_s"] = it.duration;
    j["horizon_s"] = it.horizon;
    j["location_path"] = it.location_path;
    j["event_kind"] = measure_family(it.event_kind);
    j["threshold"] = it.threshold;
    j["question"] = it.question_text;
    j["gold"] = gold_json(it.gold);
    if (it.gold_detect) j["gold_detect"] = gold_json(*it.gold_detect);
    j["sd"] = it.sd;
    out << j.dump() << '\n';
  }
}

std::vector<QAItem> read_qa_jsonl(std::istream& in) {
  std::vector<QAItem> items;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidFormat,
                  "line " + std::to_string(lineno) + ": " + e.what());
    }
    if (j.value("type", "") != "qa") continue;
    try {
      QAItem it;
      it.id = j.at("id").get<std::string>();
      auto kind = parse_query_kind(j.at("kind").get<std::string>());
      auto anchor = parse_timestamp(j.at("anchor").get<std::string>());
      if (!kind || !anchor) throw Error(ErrorCode::kInvalidFormat, "bad kind or anchor");
      it.kind = *kind;
      it.anchor = *anchor;
      it.duration = j.at("duration_s").get<Seconds>();
      it.horizon = j.at("horizon_s").get<Seconds>();
      it.location_path = j.at("location_path").get<std::vector<std::string>>();
      const std::string ek = j.value("event_kind", "rain");
      it.event_kind = ek == "traffic" ? MeasureKind::kVolume : MeasureKind::kRain;
      it.threshold = j.value("threshold", 0.0);
      it.question_text = j.value("question", "");
      it.gold = gold_from_json(j.at("gold"));
      if (j.contains("gold_detect")) it.gold_detect = gold_from_json(j.at("gold_detect"));
      it.sd = j.value("sd", std::vector<std::string>{});
      items.push_back(std::move(it));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidFormat,
                  "line " + std::to_string(lineno) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return items;
}

}  // namespace tkgqa
