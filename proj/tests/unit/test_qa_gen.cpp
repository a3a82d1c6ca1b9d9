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
#include <random>
#include <sstream>

#include <doctest.h>

#include "test_util.hpp"
#include "tkgqa/error.hpp"
#include "tkgqa/qa_gen.hpp"

using namespace tkgqa;
using namespace tkgqa::testing;

namespace {

// Independent violation test through the window index rather than the series scan.
bool wet(const TemporalKG& kg, std::span<const NodeId> path, Seconds s, Seconds dt) {
  for (NodeId loc : path)
    for (const WindowHit& h : kg.window_query(loc, TimeRef::span(s, dt)))
      if (kg.event(h.event).abnormal && h.value > 0) return true;
  return false;
}

TemporalKG synthetic(double rate, std::uint64_t seed, int locations = 2, Seconds span = 4 * kDay) {
  SynthParams p;
  p.event_rate = rate;
  p.seed = seed;
  p.locations = locations;
  p.span = span;
  return build_kg(synth_corpus(p), p.slot_duration, synth_near_edges(locations));
}

TemporalKG case_study_kg() {
  return build_kg(parse_corpus(fixture("case_study.csv"), Schema::kSydney).records, 1800);
}

QAItem case_item(QueryKind kind, int h, int m, Seconds dt, Gold gold) {
  QAItem it;
  it.id = "t";
  it.kind = kind;
  it.anchor = from_civil(2023, 12, 5, h, m);
  it.duration = dt;
  it.horizon = 4 * kHour;
  it.location_path = {"OPERA"};
  it.gold = gold;
  return it;
}

std::string prov(int h, int m, const char* v) {
  return "OPERA@" + format_timestamp(from_civil(2023, 12, 5, h, m)) + "#RAIN=" + v;
}

}  // namespace

TEST_CASE("qa_gen: label functions on the shipped fixtures") {
  const TemporalKG cs = case_study_kg();
  const std::vector<NodeId> opera{*cs.find_location("OPERA")};
  CHECK(i_exist(cs, opera, from_civil(2023, 12, 5, 13), 2 * kHour));
  CHECK_FALSE(i_exist(cs, opera, from_civil(2023, 12, 5, 16, 30), 2 * kHour));
  CHECK(a_late(cs, opera, from_civil(2023, 12, 5, 13, 30), 2 * kHour, 4 * kHour) ==
        from_civil(2023, 12, 5, 16, 30));
  CHECK(a_late(cs, opera, from_civil(2023, 12, 5, 14), 2 * kHour, 4 * kHour) ==
        from_civil(2023, 12, 5, 16, 30));

  const TemporalKG syd =
      build_kg(parse_corpus(fixture("sydney_example.csv"), Schema::kSydney).records, 1800);
  const std::vector<NodeId> path{*syd.find_location("SYD-PN"), *syd.find_location("SYD-HCR")};
  const Seconds t = from_civil(2024, 3, 11, 4);
  CHECK(i_exist(syd, path, t, 4 * kHour));
  CHECK_FALSE(a_early(syd, path, t, 4 * kHour, 12 * kHour));
  CHECK(a_late(syd, path, t, 4 * kHour, 12 * kHour) == from_civil(2024, 3, 11, 4, 30));
}

TEST_CASE("qa_gen: oracle outputs satisfy their defining conditions") {
  std::mt19937_64 rng(19);
  for (double rate : {0.1, 0.3, 0.5, 0.8}) {
    const TemporalKG kg = synthetic(rate, 50 + static_cast<std::uint64_t>(rate * 10));
    const TimeRef cov = *kg.coverage();
    for (int i = 0; i < 150; ++i) {
      const Seconds dt = (1 + static_cast<Seconds>(rng() % 8)) * 1800;
      const Seconds L = 12 * kHour;
      const Seconds t = cov.start + L + static_cast<Seconds>(rng() % 100) * 1800;
      std::vector<NodeId> path{kg.locations()[rng() % 2]};
      if (rng() % 2) path = kg.locations();
      const auto late = a_late(kg, path, t, dt, L);
      const auto early = a_early(kg, path, t, dt, L);
      CHECK(i_exist(kg, path, t, dt) == wet(kg, path, t, dt));
      if (late) {
        CHECK(*late > t);
        CHECK(*late < t + L);
        CHECK(*late % 1800 == 0);
        CHECK_FALSE(wet(kg, path, *late, dt));
      }
      for (Seconds s = t + 1800; s < (late ? *late : t + L); s += 1800) CHECK(wet(kg, path, s, dt));
      if (early) {
        CHECK(*early < t);
        CHECK(*early > t - L);
        CHECK_FALSE(wet(kg, path, *early, dt));
      }
      for (Seconds s = t - 1800; s > (early ? *early : t - L); s -= 1800) CHECK(wet(kg, path, s, dt));
    }
  }
}

TEST_CASE("qa_gen: generated items are consistent with the labels") {
  const TemporalKG kg = synthetic(0.3, 7);
  GenParams gp;
  gp.m = 150;
  gp.duration = 2 * kHour;
  gp.path_length = 2;
  const auto items = generate(kg, gp);
  std::size_t q1_false = 0, q2 = 0, q3 = 0;
  std::set<std::string> ids;
  for (const QAItem& it : items) {
    ids.insert(it.id);
    const QueryIntent q = to_query(it, kg);
    CHECK(gold_label(kg, q) == it.gold);
    CHECK(it.question_text == question_text(kg, it));
    if (it.kind == QueryKind::kQ1Avoid) {
      q1_false += it.gold.kind == GoldKind::kFalse;
      REQUIRE(it.gold_detect);
      CHECK((it.gold_detect->kind == GoldKind::kTrue) == (it.gold.kind == GoldKind::kFalse));
    }
    q2 += it.kind == QueryKind::kQ2LatestBefore;
    q3 += it.kind == QueryKind::kQ3EarliestAfter;
    if (it.gold.kind == GoldKind::kTime) {
      const Seconds t2 = *it.gold.time;
      CHECK_FALSE(i_exist(kg, q.location_path, t2, it.duration));
      const Seconds lo = std::min(t2, it.anchor), hi = std::max(t2, it.anchor);
      for (Seconds s = lo + 1800; s < hi; s += 1800)
        CHECK(i_exist(kg, q.location_path, s, it.duration));
    }
    if (!is_q1(it.kind)) CHECK(it.gold.kind != GoldKind::kNoNeed);
  }
  CHECK(ids.size() == items.size());
  CHECK(q2 == q1_false);
  CHECK(q3 == q1_false);
  CHECK(std::is_sorted(items.begin(), items.end(), [](const QAItem& a, const QAItem& b) {
    return a.anchor < b.anchor;
  }));
}

TEST_CASE("qa_gen: generation is deterministic under a seed") {
  const TemporalKG kg = synthetic(0.3, 7);
  GenParams gp;
  gp.m = 80;
  const auto a = generate(kg, gp);
  CHECK(generate(kg, gp) == a);
  gp.seed = 8;
  CHECK(generate(kg, gp) != a);
}

TEST_CASE("qa_gen: degenerate event rates") {
  GenParams gp;
  gp.m = 50;
  for (const QAItem& it : generate(synthetic(0.0, 1), gp)) {
    CHECK(it.kind == QueryKind::kQ1Avoid);
    CHECK(it.gold.kind == GoldKind::kTrue);
  }
  const auto wet_items = generate(synthetic(1.0, 1), gp);
  CHECK(wet_items.size() == 3 * static_cast<std::size_t>(std::count_if(
                                    wet_items.begin(), wet_items.end(),
                                    [](const QAItem& i) { return is_q1(i.kind); })));
  for (const QAItem& it : wet_items)
    CHECK(it.gold.kind == (is_q1(it.kind) ? GoldKind::kFalse : GoldKind::kNoAnswer));
}

TEST_CASE("qa_gen: too little coverage is reported") {
  try {
    generate(synthetic(0.3, 1, 1, kDay), GenParams{});
    FAIL("expected INSUFFICIENT_COVERAGE");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInsufficientCoverage);
  }
}

TEST_CASE("qa_gen: minimal evidence examples") {
  const TemporalKG kg = case_study_kg();
  const auto wet_q1 = case_item(QueryKind::kQ1Avoid, 13, 0, 2 * kHour, {GoldKind::kFalse, {}});
  CHECK(minimal_evidence(kg, wet_q1) == std::vector<std::string>{prov(13, 30, "1.2")});

  const auto post = case_item(QueryKind::kQ3EarliestAfter, 14, 0, 2 * kHour,
                              {GoldKind::kTime, from_civil(2023, 12, 5, 16, 30)});
  auto sd = minimal_evidence(kg, post);
  std::vector<std::string> expected{prov(15, 30, "0.6"), prov(16, 0, "2.4"), prov(16, 30, "0"),
                                    prov(17, 0, "0"),   prov(17, 30, "0"),   prov(18, 0, "0")};
  std::sort(expected.begin(), expected.end());
  CHECK(sd == expected);

  const auto dry_q1 = case_item(QueryKind::kQ1Avoid, 16, 30, 2 * kHour, {GoldKind::kTrue, {}});
  CHECK(minimal_evidence(kg, dry_q1).size() == 4);
}

TEST_CASE("qa_gen: minimal evidence passes the removal test on 200 items") {
  const TemporalKG kg = synthetic(0.35, 3);
  GenParams gp;
  gp.m = 120;
  gp.duration = 3 * 1800;
  gp.horizon = 6 * kHour;
  gp.path_length = 2;
  auto items = generate(kg, gp);
  REQUIRE(items.size() >= 200);
  items.resize(200);
  for (const QAItem& it : items) {
    const std::set<std::string> sd(it.sd.begin(), it.sd.end());
    CHECK(it.sd == minimal_evidence(kg, it));
    REQUIRE(derivable(kg, it, sd));
    for (const std::string& d : sd) {
      std::set<std::string> less = sd;
      less.erase(d);
      CHECK_FALSE(derivable(kg, it, less));
    }
  }
}

TEST_CASE("qa_gen: an unobserved slot leaves a dry label underivable") {
  std::vector<RawRecord> recs = rain_records({{"A", {0, 0, 0, 0}}});
  recs.erase(recs.begin() + 1);
  const TemporalKG kg = build_kg(recs, kSlot);
  QAItem it;
  it.kind = QueryKind::kQ1Avoid;
  it.anchor = at(0);
  it.duration = 4 * kSlot;
  it.horizon = 4 * kSlot;
  it.location_path = {"A"};
  it.gold = {GoldKind::kTrue, {}};
  try {
    minimal_evidence(kg, it);
    FAIL("expected NO_GOLD_LABEL");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNoGoldLabel);
  }
}

TEST_CASE("qa_gen: JSON-lines round trip") {
  const TemporalKG kg = synthetic(0.3, 7);
  GenParams gp;
  gp.m = 30;
  const auto items = generate(kg, gp);
  std::ostringstream os;
  write_qa_jsonl(items, os);
  std::istringstream in("{\"type\":\"header\",\"slot_duration\":1800}\n" + os.str());
  CHECK(read_qa_jsonl(in) == items);
  CHECK(parse_gold_kind(to_string(GoldKind::kNoNeed)) == GoldKind::kNoNeed);
  CHECK(format_gold({GoldKind::kTime, from_civil(2024, 3, 11, 4, 30)}) ==
        "TIME 2024-03-11T04:30:00Z");
}
