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

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include <doctest.h>

#include "test_util.hpp"
#include "tkgqa/error.hpp"
#include "tkgqa/retrieval.hpp"

using namespace tkgqa;
using namespace tkgqa::testing;

namespace {

TemporalKG random_kg(std::uint64_t seed, int slots = 96) {
  std::mt19937_64 rng(seed);
  std::vector<Series> s;
  for (const char* key : {"S01", "S02", "S03", "S04"}) {
    Series x{key, {}};
    for (int i = 0; i < slots; ++i)
      x.rain.push_back(rng() % 3 == 0 ? 0.1 * static_cast<double>(1 + rng() % 20) : 0.0);
    s.push_back(x);
  }
  return rain_kg(s, kT0, kSlot, {{"S01", "S02"}, {"S02", "S03"}, {"S03", "S04"}});
}

RetrievalPattern rain_pattern(double threshold = 0.0) {
  RetrievalPattern p;
  p.threshold = threshold;
  return p;
}

Observation obs_at(NodeId loc, Seconds start, double value, std::uint32_t id) {
  Observation o;
  o.event = NodeId{id};
  o.location = loc;
  o.time = TimeRef::span(start, kSlot);
  o.value = value;
  o.violating = value > 0;
  return o;
}

}  // namespace

TEST_CASE("retrieval: psi equals a brute-force filter on 1000 probes") {
  const TemporalKG kg = random_kg(17);
  std::mt19937_64 rng(171);
  for (int probe = 0; probe < 1000; ++probe) {
    RetrievalParams params;
    params.radius = static_cast<int>(rng() % 4);
    params.hop_cap = 1 + static_cast<int>(rng() % 3);
    params.window_pad = (rng() % 2) * kSlot;
    const double threshold = 0.1 * static_cast<double>(rng() % 15);
    const NodeId loc = kg.locations()[rng() % kg.locations().size()];
    const Seconds start = kT0 + static_cast<Seconds>(rng() % 110) * 900 - kHour;
    const TimeRef anchor{start, start + 900 * (1 + static_cast<Seconds>(rng() % 16))};
    SeenSet seen;
    const RetrievalBatch got = psi(kg, anchor, loc, rain_pattern(threshold), params, seen);

    const TimeRef w{anchor.start - params.window_pad, anchor.end + params.window_pad};
    const auto reach = kg.near(loc, std::min(params.radius, params.hop_cap));
    std::map<std::uint32_t, bool> expected;
    for (const EventFacts& e : kg.events()) {
      if (std::find(reach.begin(), reach.end(), e.location) == reach.end()) continue;
      if (!(e.time.start < w.end && w.start < e.time.end)) continue;
      expected[e.event.value] = e.value > threshold && e.abnormal;
    }
    std::map<std::uint32_t, bool> actual;
    for (const Observation& o : got.observations) actual[o.event.value] = o.violating;
    REQUIRE(actual == expected);
    CHECK(got.scanned.size() == reach.size());
    CHECK(seen.triples == 3 * expected.size());
  }
}

TEST_CASE("retrieval: seen events are never returned twice") {
  const TemporalKG kg = random_kg(5);
  const NodeId loc = kg.locations()[0];
  SeenSet seen;
  const auto a = psi(kg, TimeRef::span(at(4), 4 * kSlot), loc, rain_pattern(), {}, seen);
  CHECK(a.observations.size() == 4);
  const auto b = psi(kg, TimeRef::span(at(4), 4 * kSlot), loc, rain_pattern(), {}, seen);
  CHECK(b.observations.empty());
  const auto c = psi(kg, TimeRef::span(at(6), 4 * kSlot), loc, rain_pattern(), {}, seen);
  CHECK(c.observations.size() == 2);
  CHECK(seen.triples == 18);
}

TEST_CASE("retrieval: a wider radius never loses evidence") {
  const TemporalKG kg = random_kg(23);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    const NodeId loc = kg.locations()[rng() % 4];
    const TimeRef anchor = TimeRef::span(at(static_cast<int>(rng() % 80)), 4 * kSlot);
    std::set<std::uint32_t> prev;
    for (int r = 0; r <= 3; ++r) {
      RetrievalParams params;
      params.radius = r;
      params.hop_cap = 3;
      SeenSet seen;
      std::set<std::uint32_t> cur;
      for (const auto& o : psi(kg, anchor, loc, rain_pattern(), params, seen).observations)
        cur.insert(o.event.value);
      CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      prev = cur;
    }
  }
}

TEST_CASE("retrieval: the hop cap bounds the radius") {
  const TemporalKG kg = random_kg(2);
  const NodeId loc = kg.locations()[0];
  RetrievalParams params;
  params.radius = 3;
  params.hop_cap = 1;
  SeenSet seen;
  const auto b = psi(kg, TimeRef::span(at(0), kSlot), loc, rain_pattern(), params, seen);
  CHECK(b.scanned.size() == 2);
  for (const auto& o : b.observations) CHECK(o.hop <= 1);
}

TEST_CASE("retrieval: budget overflow throws and leaves the seen set untouched") {
  const TemporalKG kg = random_kg(4);
  RetrievalParams params;
  params.budget = 11;
  SeenSet seen;
  try {
    psi(kg, TimeRef::span(at(0), 4 * kSlot), kg.locations()[0], rain_pattern(), params, seen);
    FAIL("expected BUDGET_EXCEEDED");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kBudgetExceeded);
  }
  CHECK(seen.events.empty());
  CHECK(seen.triples == 0);
  params.budget = 12;
  CHECK(psi(kg, TimeRef::span(at(0), 4 * kSlot), kg.locations()[0], rain_pattern(), params, seen)
            .triple_count() == 12);
}

TEST_CASE("retrieval: match needs the measure and shared time") {
  EventFacts h;
  h.measure = MeasureKind::kRain;
  h.time = TimeRef::span(at(2), kSlot);
  h.value = 0.4;
  h.abnormal = true;
  CHECK(match(h, rain_pattern(), TimeRef::span(at(2), 2 * kSlot)) == true);
  CHECK(match(h, rain_pattern(0.5), TimeRef::span(at(2), 2 * kSlot)) == false);
  CHECK_FALSE(match(h, rain_pattern(), TimeRef::span(at(3), kSlot)));  // met-by
  CHECK_FALSE(match(h, rain_pattern(), TimeRef::span(at(0), 2 * kSlot)));  // meets
  RetrievalPattern traffic;
  traffic.event_kind = MeasureKind::kVolume;
  CHECK_FALSE(match(h, traffic, TimeRef::span(at(2), kSlot)));
  h.abnormal = false;
  CHECK(match(h, rain_pattern(), TimeRef::span(at(2), kSlot)) == false);
}

TEST_CASE("retrieval: prioritize puts exact starts first, then inside, then nearest") {
  const NodeId l{1};
  std::vector<Observation> c{obs_at(l, at(9), 0, 1), obs_at(l, at(5), 0, 2),
                             obs_at(l, at(3), 0, 3), obs_at(l, at(4), 0, 4),
                             obs_at(l, at(1), 0, 5)};
  c[1].hop = 1;
  const TimeRef anchor = TimeRef::span(at(3), 3 * kSlot);
  prioritize(c, anchor);
  std::vector<std::uint32_t> ids;
  for (const auto& o : c) ids.push_back(o.event.value);
  // 3 exact; 4 and 5 inside (5 has a larger hop); 1 is one slot before; 9 is far after.
  CHECK(ids == std::vector<std::uint32_t>{3, 4, 2, 5, 1});
}

TEST_CASE("retrieval: window assessment statuses") {
  const NodeId a{1}, b{2};
  const std::vector<NodeId> path{a, b};
  const TimeRef w = TimeRef::span(at(0), 2 * kSlot);
  Evidence ev(kSlot);
  CHECK(ev.assess(w, path, 1.0).status == WindowStatus::kOpen);
  CHECK(ev.assess(w, path, 1.0).unprobed.size() == 4);

  ev.mark_probed(a, w);
  ev.add(obs_at(a, at(0), 0, 10));
  ev.add(obs_at(a, at(1), 0, 11));
  auto s = ev.assess(w, path, 1.0);
  CHECK(s.status == WindowStatus::kOpen);
  CHECK(s.coverage() == doctest::Approx(0.5));
  CHECK(ev.assess(w, path, 0.5).status == WindowStatus::kFeasible);

  ev.mark_probed(b, w);
  ev.add(obs_at(b, at(0), 0, 12));
  CHECK(ev.assess(w, path, 1.0).status == WindowStatus::kUndecidable);
  ev.add(obs_at(b, at(1), 0, 13));
  CHECK(ev.assess(w, path, 1.0).status == WindowStatus::kFeasible);

  ev.add(obs_at(b, at(1), 0.8, 14));  // conflicting reading of the same cell
  s = ev.assess(w, path, 1.0);
  CHECK(s.status == WindowStatus::kUndecidable);
  CHECK(s.observed == 3);
  CHECK(s.violations.empty());

  ev.add(obs_at(a, at(2), 1.0, 15));
  CHECK(ev.assess(TimeRef::span(at(1), 2 * kSlot), {&a, 1}, 1.0).status ==
        WindowStatus::kInfeasible);
  ev.add(obs_at(a, at(2), 1.0, 15));
  CHECK(ev.observations().size() == 6);
}

TEST_CASE("retrieval: slots of a window") {
  CHECK(slots_of(TimeRef::span(at(1), 3 * kSlot), kSlot) ==
        std::vector<Seconds>{at(1), at(2), at(3)});
  CHECK(slots_of(TimeRef::point(at(1) + 60), kSlot) == std::vector<Seconds>{at(1)});
  CHECK(slots_of({at(1) + 60, at(2) + 60}, kSlot) == std::vector<Seconds>{at(1), at(2)});
}

TEST_CASE("retrieval: pattern validation") {
  RetrievalPattern p;
  p.threshold = -1;
  CHECK_THROWS_AS(validate(p), Error);
  p.threshold = 0;
  p.required_relation = AllenFamily::kBefore;
  CHECK_THROWS_AS(validate(p), Error);
  p.predicate = Predicate::kNearestFeasibleBefore;
  CHECK_NOTHROW(validate(p));
  CHECK(required_family(rain_pattern()) == AllenFamily::kDuring);
}
