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
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include <doctest.h>

#include "test_util.hpp"
#include "tkgqa/error.hpp"
#include "tkgqa/kg_io.hpp"

using namespace tkgqa;
using namespace tkgqa::testing;

namespace {

std::string dump(const TemporalKG& kg) {
  std::ostringstream os;
  write_kg_jsonl(kg, os);
  return os.str();
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInvalidFormat;
}

}  // namespace

TEST_CASE("kg: a record maps to three triples and re-mapping is idempotent") {
  KgBuilder b(kSlot);
  const RawRecord r{kT0, "OPERA", "OPERA HOUSE", 1.2, MeasureKind::kRain, std::nullopt};
  const auto first = b.map_record(r);
  REQUIRE(first.size() == 3);
  CHECK(first[0].rel == Relation::kOccursAt);
  CHECK(first[1].rel == Relation::kAtLocation);
  CHECK(first[2].rel == Relation::kHasValue);
  CHECK(first[0].head == first[1].head);
  for (const Triple& t : first) CHECK(t.provenance == record_provenance(r));
  CHECK(b.map_record(r).empty());
  CHECK(b.triple_count() == 3);

  const TemporalKG kg = std::move(b).build();
  REQUIRE(kg.events().size() == 1);
  const EventFacts& e = kg.events()[0];
  CHECK(e.abnormal);
  CHECK(e.value == doctest::Approx(1.2));
  CHECK(e.time == TimeRef::span(kT0, kSlot));
  CHECK(kg.location(e.location).name == "OPERA HOUSE");
}

TEST_CASE("kg: zero rain is stored as an explicit non-event") {
  const TemporalKG kg = rain_kg({{"A", {0.0, 0.4}}});
  REQUIRE(kg.events().size() == 2);
  CHECK_FALSE(kg.events()[0].abnormal);
  CHECK(kg.events()[1].abnormal);
  const auto& ev = std::get<EventPayload>(kg.node(kg.events()[0].event).payload);
  CHECK(ev.tag == kNoEventTag);
}

TEST_CASE("kg: malformed records are rejected") {
  KgBuilder b(kSlot);
  CHECK(code_of([&] {
          b.map_record({kT0, "A", "A", -1.0, MeasureKind::kRain, std::nullopt});
        }) == ErrorCode::kMalformedRecord);
  CHECK(code_of([&] {
          b.map_record({kT0 + 17, "A", "A", 1.0, MeasureKind::kRain, std::nullopt});
        }) == ErrorCode::kMalformedRecord);
  CHECK(code_of([&] {
          b.map_record({kT0, "A", "A", std::nan(""), MeasureKind::kRain, std::nullopt});
        }) == ErrorCode::kMalformedRecord);
}

TEST_CASE("kg: construction is independent of record order") {
  auto recs = rain_records({{"A", {0, 1, 0, 2, 0, 0, 3}}, {"B", {1, 1, 0, 0, 0, 4, 0}}});
  const std::vector<NearEdge> near{{"A", "B"}};
  const std::string ref = dump(build_kg(recs, kSlot, near));
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(recs.begin(), recs.end(), rng);
    CHECK(dump(build_kg(recs, kSlot, near)) == ref);
  }
}

TEST_CASE("kg: window index agrees with a linear scan") {
  std::mt19937_64 rng(3);
  std::vector<double> a(200), b(200);
  for (auto& v : a) v = (rng() % 3 == 0) ? 0.2 * static_cast<double>(rng() % 10) : 0.0;
  for (auto& v : b) v = (rng() % 4 == 0) ? 1.0 : 0.0;
  const TemporalKG kg = rain_kg({{"A", a}, {"B", b}});
  for (int probe = 0; probe < 500; ++probe) {
    const NodeId loc = kg.locations()[rng() % 2];
    const Seconds s = kT0 + static_cast<Seconds>(rng() % 220) * 600 - 3600;
    const TimeRef w = probe % 7 == 0 ? TimeRef::point(s) : TimeRef{s, s + 600 * (1 + static_cast<Seconds>(rng() % 30))};
    std::vector<std::uint32_t> expected;
    for (const EventFacts& e : kg.events())
      if (e.location == loc && intersects(e.time, w)) expected.push_back(e.event.value);
    std::vector<std::uint32_t> got;
    for (const WindowHit& h : kg.window_query(loc, w)) got.push_back(h.event.value);
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    REQUIRE(got == expected);
  }
}

TEST_CASE("kg: near neighborhoods on a path graph") {
  const TemporalKG kg = rain_kg({{"S01", {0}}, {"S02", {0}}, {"S03", {0}}}, kT0, kSlot,
                                {{"S01", "S02"}, {"S02", "S03"}});
  const NodeId s1 = *kg.find_location("S01"), s2 = *kg.find_location("S02"),
               s3 = *kg.find_location("S03");
  CHECK(kg.near(s1, 0) == std::vector<NodeId>{s1});
  CHECK(kg.near(s1, 1).size() == 2);
  CHECK(kg.near(s1, 2).size() == 3);
  const auto d = kg.near_with_distance(s1, kUnboundedHops);
  REQUIRE(d.size() == 3);
  CHECK(d[0] == std::pair{s1, 0});
  CHECK(d[1] == std::pair{s2, 1});
  CHECK(d[2] == std::pair{s3, 2});
  CHECK(kg.stats().near_edges == 2);
  CHECK(code_of([&] { (void)kg.near(kg.events()[0].event, 1); }) == ErrorCode::kUnknownLocation);
}

TEST_CASE("kg: locations resolve by key or name") {
  const TemporalKG kg = build_kg(
      std::vector<RawRecord>{{kT0, "SYD-PN", "PARRAMATTA NORTH", 0, MeasureKind::kRain, {}}},
      kSlot);
  REQUIRE(kg.find_location("SYD-PN"));
  CHECK(kg.find_location("PARRAMATTA NORTH") == kg.find_location("SYD-PN"));
  CHECK_FALSE(kg.find_location("NOWHERE"));
}

TEST_CASE("kg: JSON-lines dump round-trips byte for byte") {
  const TemporalKG kg = rain_kg({{"A", {0, 1.25, 0}}, {"B", {0.1, 0, 0}}}, kT0, kSlot, {{"A", "B"}});
  const std::string text = dump(kg);
  std::istringstream in(text);
  const TemporalKG back = read_kg_jsonl(in);
  CHECK(dump(back) == text);
  CHECK(back.events().size() == kg.events().size());
  CHECK(back.coverage() == kg.coverage());
}

TEST_CASE("kg: stats count entities, relations and records") {
  const TemporalKG kg = rain_kg({{"A", {0, 1, 0}}});
  const KgStats s = kg.stats();
  CHECK(s.records == 3);
  CHECK(s.relations == 9);
  CHECK(s.locations == 1);
  CHECK(s.time_nodes == 3);
  CHECK(s.entities == s.time_nodes + s.locations + s.value_nodes + s.records);
  CHECK(s.period == TimeRef{kT0, kT0 + 3 * kSlot});
}

TEST_CASE("kg: derived temporal relations come from the Allen family") {
  CHECK(derived_relation({0, 10}, {10, 20}) == Relation::kBefore);
  CHECK(derived_relation({10, 20}, {0, 10}) == Relation::kAfter);
  CHECK(derived_relation({2, 4}, {0, 10}) == Relation::kDuring);
  CHECK(derived_relation({0, 5}, {3, 10}) == Relation::kOverlaps);
}
