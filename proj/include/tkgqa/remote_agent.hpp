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

#ifndef TKGQA_REMOTE_AGENT_HPP_
#define TKGQA_REMOTE_AGENT_HPP_

#include <condition_variable>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "tkgqa/agents.hpp"

namespace tkgqa {

struct RemoteSettings {
  std::string url;  // chat-completion endpoint, e.g. http://host:8080/v1/chat/completions
  std::string model;
  std::string api_key;
  int timeout_ms = 30000;
  int rate_limit_retries = 3;
  int backoff_ms = 500;  // doubled per rate-limited retry
  double temperature = 0.0;
  int max_in_flight = 4;

  /// TKGQA_REMOTE_URL, TKGQA_REMOTE_MODEL, TKGQA_REMOTE_KEY; nullopt when
  /// the URL is unset.
  static std::optional<RemoteSettings> from_env();
};

/// Reentrant chat-completion client. Throws NETWORK_ERROR on transport
/// failure or timeout, RATE_LIMITED once retries on HTTP 429 are spent.
class RemoteClient {
 public:
  explicit RemoteClient(RemoteSettings settings);
  std::string call(const std::string& prompt);
  const RemoteSettings& settings() const { return settings_; }

 private:
  RemoteSettings settings_;
  std::mutex mu_;
  std::condition_variable cv_;
  int in_flight_ = 0;
};

/// Evidence rendered as one (head, relation, tail) triple per line.
std::string evidence_triples(const Evidence& evidence);
std::string verifier_prompt(const QueryIntent& q, const Evidence& evidence,
                            const TemporalKG& kg);
std::string planner_prompt(const QueryIntent& q, const Evidence& evidence, const TemporalKG& kg);

/// Verifier grammar, one field per line, case-sensitive keys:
///   SUFFICIENT: yes|no
///   CONFIDENCE: <float in [0,1]>
///   ANSWER: YES|NO|NO_NEED|NO_ANSWER|TIME <timestamp>
///   MISSING: <free text>            (optional)
/// Throws PARSE_FAILURE.
Judgment parse_verifier_reply(std::string_view text, const QueryIntent& q);

/// Planner grammar:
///   NEXT_WINDOW: <timestamp> <timestamp>
///   NEXT_LOCATION: <location key or name>
///   UTILITY: <float>
/// Throws PARSE_FAILURE.
AnchorProposal parse_planner_reply(std::string_view text, const QueryIntent& q,
                                   const TemporalKG& kg);

/// Remote roles with one retry on an unparseable reply; any remaining
/// failure falls back to the rule-based agent and marks the result.
class RemoteVerifier final : public Verifier {
 public:
  RemoteVerifier(RemoteClient& client, const TemporalKG& kg, double theta = 1.0)
      : client_(client), kg_(kg), fallback_(theta) {}
  Judgment judge(const QueryIntent& q, const Evidence& evidence) override;
  int failures() const { return failures_; }
  const std::string& last_error() const { return last_error_; }

 private:
  RemoteClient& client_;
  const TemporalKG& kg_;
  RuleVerifier fallback_;
  int failures_ = 0;
  std::string last_error_;
};

class RemotePlanner final : public Planner {
 public:
  RemotePlanner(RemoteClient& client, const TemporalKG& kg, double lambda = 0.5,
                double theta = 1.0, int neighborhood = 1)
      : client_(client), kg_(kg), fallback_(lambda, theta, neighborhood) {}
  AnchorProposal update(const QueryIntent& q, const Evidence& evidence) override;
  int failures() const { return failures_; }
  const std::string& last_error() const { return last_error_; }

 private:
  RemoteClient& client_;
  const TemporalKG& kg_;
  RulePlanner fallback_;
  int failures_ = 0;
  std::string last_error_;
};

}  // namespace tkgqa

#endif  // TKGQA_REMOTE_AGENT_HPP_
