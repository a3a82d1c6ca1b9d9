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

#include <cmath>
#include <random>

#include <doctest.h>

#include "test_util.hpp"
#include "tkgqa/agents.hpp"
#include "tkgqa/error.hpp"
#include "tkgqa/synthesis.hpp"

using namespace tkgqa;
using namespace tkgqa::testing;

namespace {

Observation obs(NodeId loc, int slot, double value, std::uint32_t id) {
  Observation o;
  o.event = NodeId{id};
  o.location = loc;
  o.time = TimeRef::span(at(slot), kSlot);
  o.value = value;
  o.violating = value > 0;
  o.provenance = "L" + std::to_string(loc.value) + "@" + format_timestamp(at(slot)) + "#RAIN=" +
                 format_number(value);
  return o;
}

QueryIntent q_at(QueryKind k, int slot, int slots, std::vector<NodeId> path) {
  QueryIntent q;
  q.kind = k;
  q.anchor = at(slot);
  q.duration = slots * kSlot;
  q.horizon = 8 * kSlot;
  q.location_path = std::move(path);
  return q;
}

}  // namespace

TEST_CASE("synthesis: conflicting readings of one cell are all removed") {
  const NodeId a{1}, b{2};
  const std::vector<Observation> ev{obs(a, 0, 0.0, 1), obs(a, 0, 5.0, 2), obs(a, 1, 0.0, 3),
                                    obs(b, 0, 5.0, 4)};
  const FilterResult r = contradiction_filter(ev);
  REQUIRE(r.conflicts.size() == 1);
  CHECK(r.conflicts[0].location == a);
  CHECK(r.conflicts[0].time == TimeRef::span(at(0), kSlot));
  CHECK(r.conflicts[0].events.size() == 2);
  REQUIRE(r.kept.size() == 2);
  CHECK(r.kept[0].event == NodeId{3});
  CHECK(r.kept[1].event == NodeId{4});

  const std::vector<Observation> three{obs(a, 0, 0.0, 1), obs(a, 0, 1.0, 2), obs(a, 0, 2.0, 3)};
  const FilterResult r3 = contradiction_filter(three);
  CHECK(r3.kept.empty());
  CHECK(r3.conflicts.at(0).events.size() == 3);

  const std::vector<Observation> clean{obs(a, 0, 0.0, 1), obs(a, 1, 1.0, 2), obs(a, 1, 1.0, 3)};
  const FilterResult rc = contradiction_filter(clean);
  CHECK(rc.conflicts.empty());
  CHECK(rc.kept.size() == 3);
}

TEST_CASE("synthesis: filtered evidence holds no conflicting pair") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Observation> ev;
    for (std::uint32_t i = 0; i < 30; ++i)
      ev.push_back(obs(NodeId{static_cast<std::uint32_t>(1 + rng() % 2)},
                       static_cast<int>(rng() % 8), static_cast<double>(rng() % 3), i));
    const FilterResult r = contradiction_filter(ev);
    for (std::size_t i = 0; i < r.kept.size(); ++i)
      for (std::size_t j = i + 1; j < r.kept.size(); ++j) {
        const bool same_cell = r.kept[i].location == r.kept[j].location &&
                               r.kept[i].time == r.kept[j].time;
        CHECK_FALSE((same_cell && r.kept[i].value != r.kept[j].value));
      }
    std::size_t dropped = 0;
    for (const auto& c : r.conflicts) dropped += c.events.size();
    CHECK(dropped + r.kept.size() == ev.size());
  }
}

TEST_CASE("synthesis: decisive time of the postponement evidence") {
  const TemporalKG kg =
      build_kg(parse_corpus(fixture("case_study.csv"), Schema::kSydney).records, 1800);
  const NodeId opera = *kg.find_location("OPERA");
  QueryIntent q;
  q.kind = QueryKind::kQ3EarliestAfter;
  q.anchor = from_civil(2023, 12, 5, 14);
  q.duration = 2 * kHour;
  q.horizon = 4 * kHour;
  q.location_path = {opera};
  Evidence ev(1800);
  SeenSet seen;
  for (int h : {14, 16})
    ev.add(psi(kg, TimeRef::span(from_civil(2023, 12, 5, h), 2 * kHour), opera, pattern_for(q), {},
               seen));
  CHECK_FALSE(select_decisive_time(ev, q));  // 18:00 unread and [16:30,18:30) is still open
  ev.add(psi(kg, TimeRef::span(from_civil(2023, 12, 5, 16, 30), 2 * kHour), opera,
             pattern_for(q), {}, seen));
  const auto t = select_decisive_time(ev, q);
  REQUIRE(t);
  CHECK(t->start == from_civil(2023, 12, 5, 16, 30));

  const Answer a = fuse(q, contradiction_filter(ev.observations()).kept, *t);
  CHECK(a.verdict == Verdict::kTime);
  bool rain_1530 = false, rain_1600 = false, dry_stretch = false;
  for (const Citation& c : a.rationale) {
    if (c.violating && c.time.start == from_civil(2023, 12, 5, 15, 30)) rain_1530 = true;
    if (c.violating && c.time.start == from_civil(2023, 12, 5, 16)) rain_1600 = true;
    if (!c.violating && c.time.start == from_civil(2023, 12, 5, 18)) dry_stretch = true;
  }
  CHECK(rain_1530);
  CHECK(rain_1600);
  CHECK(dry_stretch);

  QueryIntent q1 = q;
  q1.kind = QueryKind::kQ1Avoid;
  CHECK_FALSE(select_decisive_time(ev, q1));
  q1.anchor = from_civil(2023, 12, 5, 16, 30);
  CHECK(select_decisive_time(ev, q1) == q1.window());
}

TEST_CASE("synthesis: nothing feasible gives no decisive time") {
  const NodeId a{1};
  Evidence ev(kSlot);
  const QueryIntent q = q_at(QueryKind::kQ3EarliestAfter, 0, 2, {a});
  ev.mark_probed(a, {at(-8), at(12)});
  for (int s = 0; s < 12; ++s) ev.add(obs(a, s, 1.0, static_cast<std::uint32_t>(s + 1)));
  CHECK_FALSE(select_decisive_time(ev, q));
}

TEST_CASE("synthesis: weights decay with temporal distance") {
  const NodeId a{1};
  const QueryIntent q = q_at(QueryKind::kQ1Avoid, 4, 1, {a});
  const std::vector<Observation> two{obs(a, 4, 0.0, 1), obs(a, 8, 0.0, 2)};  // 0 h and 2 h away
  const Answer ans = fuse(q, two, q.window(), 1.0);
  REQUIRE(ans.rationale.size() == 2);
  CHECK(ans.rationale[1].weight / ans.rationale[0].weight == doctest::Approx(std::exp(-2.0)));
  CHECK(ans.rationale[0].weight + ans.rationale[1].weight == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ans.verdict == Verdict::kYes);

  const std::vector<Observation> one{obs(a, 9, 0.0, 1)};
  CHECK(fuse(q, one, q.window()).rationale.at(0).weight == doctest::Approx(1.0));

  std::vector<Observation> many;
  for (int s = 0; s < 10; ++s) many.push_back(obs(a, s, 0.0, static_cast<std::uint32_t>(s + 1)));
  const Answer flat = fuse(q, many, q.window(), 0.0);
  for (const Citation& c : flat.rationale) CHECK(c.weight == doctest::Approx(0.1));
  const Answer decay = fuse(q, many, q.window(), 1.0);
  double sum = 0;
  for (const Citation& c : decay.rationale) sum += c.weight;
  CHECK(std::abs(sum - 1.0) < 1e-9);
  for (std::size_t i = 0; i + 1 < decay.rationale.size(); ++i) {
    const double d0 = std::abs(midpoint(decay.rationale[i].time) - midpoint(q.window()));
    const double d1 = std::abs(midpoint(decay.rationale[i + 1].time) - midpoint(q.window()));
    CHECK(decay.rationale[i].weight >= decay.rationale[i + 1].weight);
    if (d0 < d1) CHECK(decay.rationale[i].weight > decay.rationale[i + 1].weight);
  }
}

TEST_CASE("synthesis: verdict and t* do not depend on gamma") {
  std::mt19937_64 rng(8);
  const NodeId a{1};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Observation> ev;
    for (int s = 0; s < 12; ++s)
      ev.push_back(obs(a, s, rng() % 3 == 0 ? 1.0 : 0.0, static_cast<std::uint32_t>(s + 1)));
    const QueryIntent q = q_at(trial % 2 ? QueryKind::kQ3EarliestAfter : QueryKind::kQ1Avoid,
                               static_cast<int>(rng() % 8), 2, {a});
    const TimeRef t = TimeRef::span(at(static_cast<int>(rng() % 10)), 2 * kSlot);
    const Answer ref = fuse(q, ev, t, 1.0);
    for (double g = 0.25; g <= 4.0; g *= 2) {
      const Answer x = fuse(q, ev, t, g);
      CHECK(x.verdict == ref.verdict);
      CHECK(x.decisive_time == ref.decisive_time);
      CHECK(x.rationale.size() == ref.rationale.size());
    }
  }
}

TEST_CASE("synthesis: facts off the path or of another kind are not cited") {
  const NodeId a{1}, b{2};
  const QueryIntent q = q_at(QueryKind::kQ1Avoid, 0, 2, {a});
  std::vector<Observation> ev{obs(b, 0, 1.0, 1)};
  CHECK_THROWS_AS(fuse(q, ev, q.window()), Error);
  ev[0].location = a;
  ev[0].measure = MeasureKind::kVolume;
  try {
    fuse(q, ev, q.window());
    FAIL("expected EMPTY_EVIDENCE");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyEvidence);
  }
}
