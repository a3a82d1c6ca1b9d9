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

#include "tkgqa/remote_agent.hpp"

#include <chrono>
#include <cstdlib>
#include <map>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "tkgqa/error.hpp"

namespace tkgqa {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// KEY: value lines; later duplicates override earlier ones.
std::map<std::string, std::string> fields(std::string_view text) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    const std::string key(trim(std::string_view(line).substr(0, colon)));
    if (key.empty() || key.find(' ') != std::string::npos) continue;
    out[key] = std::string(trim(std::string_view(line).substr(colon + 1)));
  }
  return out;
}

[[noreturn]] void parse_fail(const std::string& why) {
  throw Error(ErrorCode::kParseFailure, "agent reply: " + why);
}

double parse_float(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) parse_fail(std::string("trailing text in ") + what);
    return v;
  } catch (const std::logic_error&) {
    parse_fail(std::string("bad number for ") + what);
  }
}

std::string describe_query(const QueryIntent& q, const TemporalKG& kg) {
  std::ostringstream os;
  os << "query_kind: " << to_string(q.kind) << '\n'
     << "window: [" << format_timestamp(q.anchor) << ", "
     << format_timestamp(q.anchor + q.duration) << ")\n"
     << "duration: " << format_duration(q.duration) << '\n'
     << "horizon: " << format_duration(q.horizon) << '\n'
     << "slot: " << format_duration(kg.slot_duration()) << '\n'
     << "event_kind: " << measure_family(q.event_kind) << " (violating when value > "
     << q.threshold << ")\n"
     << "path:";
  for (NodeId id : q.location_path) os << ' ' << kg.location(id).key;
  os << '\n';
  return os.str();
}

}  // namespace

std::optional<RemoteSettings> RemoteSettings::from_env() {
  const char* url = std::getenv("TKGQA_REMOTE_URL");
  if (!url || !*url) return std::nullopt;
  RemoteSettings s;
  s.url = url;
  if (const char* m = std::getenv("TKGQA_REMOTE_MODEL")) s.model = m;
  if (const char* k = std::getenv("TKGQA_REMOTE_KEY")) s.api_key = k;
  return s;
}

RemoteClient::RemoteClient(RemoteSettings settings) : settings_(std::move(settings)) {
  if (settings_.max_in_flight < 1) settings_.max_in_flight = 1;
}

std::string RemoteClient::call(const std::string& prompt) {
  {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return in_flight_ < settings_.max_in_flight; });
    ++in_flight_;
  }
  struct Release {
    RemoteClient* self;
    ~Release() {
      std::lock_guard lock(self->mu_);
      --self->in_flight_;
      self->cv_.notify_one();
    }
  } release{this};

  const std::string& url = settings_.url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw Error(ErrorCode::kNetworkError, "endpoint URL lacks a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  const std::string origin = url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(origin);
  const auto ms = std::chrono::milliseconds(settings_.timeout_ms);
  client.set_connection_timeout(ms);
  client.set_read_timeout(ms);
  client.set_write_timeout(ms);
  httplib::Headers headers;
  if (!settings_.api_key.empty()) headers.emplace("Authorization", "Bearer " + settings_.api_key);

  const json body{{"model", settings_.model},
                  {"temperature", settings_.temperature},
                  {"messages", json::array({{{"role", "user"}, {"content", prompt}}})}};
  int backoff = settings_.backoff_ms;
  for (int attempt = 0;; ++attempt) {
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res)
      throw Error(ErrorCode::kNetworkError,
                  "request to " + origin + " failed: " + httplib::to_string(res.error()));
    if (res->status == 429) {
      if (attempt >= settings_.rate_limit_retries)
        throw Error(ErrorCode::kRateLimited, "endpoint kept answering 429");
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
      continue;
    }
    if (res->status != 200)
      throw Error(ErrorCode::kNetworkError, "endpoint answered HTTP " + std::to_string(res->status));
    try {
      const json j = json::parse(res->body);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseFailure, std::string("malformed completion body: ") + e.what());
    }
  }
}

std::string evidence_triples(const Evidence& ev) {
  std::ostringstream os;
  for (const Observation& o : ev.observations()) {
    const std::string e = "e" + std::to_string(o.event.value);
    const auto at = o.provenance.find('@');
    const std::string loc = o.provenance.substr(0, at);
    os << '(' << e << ", occursAt, " << format_timestamp(o.time.start) << '/'
       << format_timestamp(o.time.end) << ")\n"
       << '(' << e << ", atLocation, " << loc << ")\n"
       << '(' << e << ", hasValue, " << o.value << ' ' << measure_unit(o.measure) << ")\n";
  }
  return os.str();
}

std::string verifier_prompt(const QueryIntent& q, const Evidence& ev, const TemporalKG& kg) {
  std::ostringstream os;
  os << "You check whether retrieved evidence settles a time-window question.\n"
     << describe_query(q, kg) << "evidence (one triple per line):\n"
     << evidence_triples(ev)
     << "Reply with exactly these lines:\n"
        "SUFFICIENT: yes|no\n"
        "CONFIDENCE: <number between 0 and 1>\n"
        "ANSWER: YES|NO|NO_NEED|NO_ANSWER|TIME <ISO-8601 start>\n"
        "MISSING: <slots still unknown, optional>\n";
  return os.str();
}

std::string planner_prompt(const QueryIntent& q, const Evidence& ev, const TemporalKG& kg) {
  std::ostringstream os;
  os << "You choose the next time window and location to retrieve evidence for.\n"
     << describe_query(q, kg) << "evidence so far (one triple per line):\n"
     << evidence_triples(ev)
     << "Prefer windows that add unseen slots and overlap little with seen ones.\n"
        "Reply with exactly these lines:\n"
        "NEXT_WINDOW: <ISO-8601 start> <ISO-8601 end>\n"
        "NEXT_LOCATION: <location key>\n"
        "UTILITY: <number>\n";
  return os.str();
}

Judgment parse_verifier_reply(std::string_view text, const QueryIntent& q) {
  const auto f = fields(text);
  auto need = [&](const char* key) -> const std::string& {
    auto it = f.find(key);
    if (it == f.end()) parse_fail(std::string("missing ") + key);
    return it->second;
  };
  Judgment j;
  const std::string& suff = need("SUFFICIENT");
  if (suff == "yes") j.sufficient = true;
  else if (suff == "no") j.sufficient = false;
  else parse_fail("SUFFICIENT must be yes or no");
  j.confidence = parse_float(need("CONFIDENCE"), "CONFIDENCE");
  if (!(j.confidence >= 0.0 && j.confidence <= 1.0)) parse_fail("CONFIDENCE outside [0,1]");

  const std::string& ans = need("ANSWER");
  if (ans.rfind("TIME", 0) == 0) {
    auto t = parse_timestamp(trim(std::string_view(ans).substr(4)));
    if (!t) parse_fail("bad TIME timestamp");
    j.candidate.verdict = Verdict::kTime;
    j.candidate.decisive_time = TimeRef::span(*t, q.duration);
  } else {
    auto v = parse_verdict(ans);
    if (!v || *v == Verdict::kTime) parse_fail("unknown ANSWER");
    j.candidate.verdict = *v;
    if (*v == Verdict::kNoNeed) j.candidate.decisive_time = q.window();
  }
  const bool q1_verdict = j.candidate.verdict == Verdict::kYes || j.candidate.verdict == Verdict::kNo;
  if (is_q1(q.kind) != q1_verdict) parse_fail("ANSWER does not fit the query kind");
  j.window = j.candidate.decisive_time.value_or(q.window());
  if (auto it = f.find("MISSING"); it != f.end()) j.missing_text = it->second;
  return j;
}

AnchorProposal parse_planner_reply(std::string_view text, const QueryIntent& q,
                                   const TemporalKG& kg) {
  const auto f = fields(text);
  auto need = [&](const char* key) -> const std::string& {
    auto it = f.find(key);
    if (it == f.end()) parse_fail(std::string("missing ") + key);
    return it->second;
  };
  std::istringstream win(need("NEXT_WINDOW"));
  std::string a, b, extra;
  if (!(win >> a >> b) || (win >> extra)) parse_fail("NEXT_WINDOW needs two timestamps");
  auto ta = parse_timestamp(a), tb = parse_timestamp(b);
  if (!ta || !tb || *tb <= *ta) parse_fail("bad NEXT_WINDOW");
  auto loc = kg.find_location(need("NEXT_LOCATION"));
  if (!loc) parse_fail("unknown NEXT_LOCATION");
  AnchorProposal p;
  p.next_anchor = {*ta, *tb};
  p.next_loc = *loc;
  p.next_pattern = pattern_for(q);
  p.utility = parse_float(need("UTILITY"), "UTILITY");
  return p;
}

Judgment RemoteVerifier::judge(const QueryIntent& q, const Evidence& ev) {
  const std::string prompt = verifier_prompt(q, ev, kg_);
  try {
    for (int attempt = 0;; ++attempt) {
      try {
        return parse_verifier_reply(client_.call(prompt), q);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kParseFailure || attempt >= 1) throw;
      }
    }
  } catch (const Error& e) {
    ++failures_;
    last_error_ = e.what();
  }
  Judgment j = fallback_.judge(q, ev);
  j.fallback = true;
  return j;
}

AnchorProposal RemotePlanner::update(const QueryIntent& q, const Evidence& ev) {
  // Exhaustion is decided on exact coverage, not by the remote model.
  AnchorProposal local = fallback_.update(q, ev);
  const std::string prompt = planner_prompt(q, ev, kg_);
  try {
    for (int attempt = 0;; ++attempt) {
      try {
        return parse_planner_reply(client_.call(prompt), q, kg_);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kParseFailure || attempt >= 1) throw;
      }
    }
  } catch (const Error& e) {
    ++failures_;
    last_error_ = e.what();
  }
  local.fallback = true;
  return local;
}

}  // namespace tkgqa
