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

#include <atomic>
#include <chrono>
#include <thread>

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include "test_util.hpp"
#include "tkgqa/controller.hpp"
#include "tkgqa/error.hpp"
#include "tkgqa/remote_agent.hpp"

using namespace tkgqa;
using namespace tkgqa::testing;
using nlohmann::json;

namespace {

std::string completion(const std::string& content) {
  return json{{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}})}}
      .dump();
}

// Chat-completion stand-in on a loopback port.
class FakeEndpoint {
 public:
  FakeEndpoint() {
    server_.Post("/ok", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits_;
      last_body_ = req.body;
      res.set_content(completion(reply_), "application/json");
    });
    server_.Post("/garbage", [this](const httplib::Request&, httplib::Response& res) {
      ++hits_;
      res.set_content(completion("I think it might rain, hard to say."), "application/json");
    });
    server_.Post("/slow", [](const httplib::Request&, httplib::Response& res) {
      std::this_thread::sleep_for(std::chrono::milliseconds(800));
      res.set_content(completion("SUFFICIENT: no"), "application/json");
    });
    server_.Post("/busy", [this](const httplib::Request&, httplib::Response& res) {
      ++hits_;
      res.status = 429;
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }

  RemoteSettings settings(const std::string& path) const {
    RemoteSettings s;
    s.url = "http://127.0.0.1:" + std::to_string(port_) + path;
    s.model = "test-model";
    s.api_key = "k";
    s.timeout_ms = 2000;
    s.backoff_ms = 1;
    return s;
  }

  std::string reply_;
  std::atomic<int> hits_{0};
  std::string last_body_;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TemporalKG case_study_kg() {
  return build_kg(parse_corpus(fixture("case_study.csv"), Schema::kSydney).records, 1800);
}

QueryIntent postponement(const TemporalKG& kg) {
  QueryIntent q;
  q.kind = QueryKind::kQ3EarliestAfter;
  q.anchor = from_civil(2023, 12, 5, 14);
  q.duration = 2 * kHour;
  q.horizon = 4 * kHour;
  q.location_path = {*kg.find_location("OPERA")};
  return q;
}

}  // namespace

TEST_CASE("remote: reply grammars") {
  const TemporalKG kg = case_study_kg();
  const QueryIntent q = postponement(kg);
  const Judgment j = parse_verifier_reply(
      "SUFFICIENT: yes\nCONFIDENCE: 0.9\nANSWER: TIME 2023-12-05T16:30:00Z\nMISSING: none\n", q);
  CHECK(j.sufficient);
  CHECK(j.confidence == doctest::Approx(0.9));
  CHECK(j.candidate.verdict == Verdict::kTime);
  CHECK(j.candidate.decisive_time == TimeRef::span(from_civil(2023, 12, 5, 16, 30), 2 * kHour));
  CHECK(j.missing_text == "none");
  CHECK_THROWS_AS(parse_verifier_reply("SUFFICIENT: maybe\nCONFIDENCE: 1\nANSWER: NO_NEED", q),
                  Error);
  CHECK_THROWS_AS(parse_verifier_reply("SUFFICIENT: yes\nCONFIDENCE: 1.5\nANSWER: NO_NEED", q),
                  Error);
  CHECK_THROWS_AS(parse_verifier_reply("SUFFICIENT: yes\nCONFIDENCE: 1\nANSWER: YES", q), Error);

  const AnchorProposal p = parse_planner_reply(
      "NEXT_WINDOW: 2023-12-05T16:00:00Z 2023-12-05T18:00:00Z\nNEXT_LOCATION: OPERA HOUSE\n"
      "UTILITY: 4\n",
      q, kg);
  CHECK(p.next_anchor == TimeRef{from_civil(2023, 12, 5, 16), from_civil(2023, 12, 5, 18)});
  CHECK(p.next_loc == q.location_path[0]);
  CHECK(p.utility == 4.0);
  try {
    parse_planner_reply("NEXT_WINDOW: soon\nNEXT_LOCATION: OPERA\nUTILITY: 1", q, kg);
    FAIL("expected PARSE_FAILURE");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParseFailure);
  }
}

TEST_CASE("remote: prompts embed the evidence as triples") {
  const TemporalKG kg = case_study_kg();
  const QueryIntent q = postponement(kg);
  Evidence ev(1800);
  SeenSet seen;
  ev.add(psi(kg, q.window(), q.location_path[0], RetrievalPattern{}, {}, seen));
  const std::string triples = evidence_triples(ev);
  CHECK(triples.find("occursAt") != std::string::npos);
  CHECK(triples.find("hasValue") != std::string::npos);
  const std::string vp = verifier_prompt(q, ev, kg);
  CHECK(vp.find("SUFFICIENT:") != std::string::npos);
  CHECK(vp.find(triples) != std::string::npos);
  CHECK(planner_prompt(q, ev, kg).find("NEXT_WINDOW:") != std::string::npos);
}

TEST_CASE("remote: a well-formed reply becomes a judgment") {
  FakeEndpoint ep;
  ep.reply_ = "SUFFICIENT: no\nCONFIDENCE: 0.25\nANSWER: NO_ANSWER\n";
  const TemporalKG kg = case_study_kg();
  const QueryIntent q = postponement(kg);
  RemoteClient client(ep.settings("/ok"));
  RemoteVerifier v(client, kg);
  const Judgment j = v.judge(q, Evidence(1800));
  CHECK_FALSE(j.fallback);
  CHECK(j.confidence == doctest::Approx(0.25));
  CHECK(v.failures() == 0);
  const json body = json::parse(ep.last_body_);
  CHECK(body.at("model") == "test-model");
  CHECK(body.at("messages").at(0).at("role") == "user");
}

TEST_CASE("remote: garbage twice falls back to the rule-based agents") {
  FakeEndpoint ep;
  const TemporalKG kg = case_study_kg();
  const QueryIntent q = postponement(kg);
  RemoteClient client(ep.settings("/garbage"));
  RemoteVerifier v(client, kg);
  const Judgment j = v.judge(q, Evidence(1800));
  CHECK(j.fallback);
  CHECK(ep.hits_ == 2);
  CHECK(v.failures() == 1);
  CHECK(v.last_error().find("PARSE_FAILURE") != std::string::npos);

  RemotePlanner p(client, kg);
  const RunResult r = run(q, kg, RunConfig{}, p, v);
  CHECK(format_verdict(r.answer) == "TIME 2023-12-05T16:30:00Z");
  for (const StepRecord& s : r.trace.steps) {
    CHECK(s.judgment.fallback);
    if (s.proposal) CHECK(s.proposal->fallback);
  }
}

TEST_CASE("remote: timeouts and rate limits") {
  FakeEndpoint ep;
  RemoteSettings slow = ep.settings("/slow");
  slow.timeout_ms = 200;
  RemoteClient c1(slow);
  try {
    c1.call("hi");
    FAIL("expected NETWORK_ERROR");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNetworkError);
  }

  RemoteClient c2(ep.settings("/busy"));
  try {
    c2.call("hi");
    FAIL("expected RATE_LIMITED");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kRateLimited);
  }
  CHECK(ep.hits_ == 4);

  RemoteSettings dead = ep.settings("/ok");
  dead.url = "http://127.0.0.1:1/v1/chat/completions";
  RemoteClient c3(dead);
  CHECK_THROWS_AS(c3.call("hi"), Error);
}
