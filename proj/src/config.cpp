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

#include "tkgqa/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>

#include "tkgqa/error.hpp"

namespace tkgqa {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad(std::string_view key, std::string_view value) {
  throw Error(ErrorCode::kInvalidParams,
              "bad value '" + std::string(value) + "' for '" + std::string(key) + "'");
}

double number(std::string_view key, std::string_view v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad(key, v);
  return out;
}

long long integer(std::string_view key, std::string_view v) {
  long long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad(key, v);
  return out;
}

Seconds duration(std::string_view key, std::string_view v) {
  auto d = parse_duration(v);
  if (!d || *d <= 0) bad(key, v);
  return *d;
}

}  // namespace

std::vector<std::string_view> setting_keys() {
  return {"theta", "t_max", "lambda", "gamma", "radius", "hop_cap", "budget", "mode",
          "neighborhood", "w", "slot", "dt", "L", "traffic_percentile", "rain_threshold"};
}

void apply_setting(Settings& s, std::string_view key, std::string_view value) {
  value = trim(value);
  RunConfig& r = s.run;
  if (key == "theta") r.theta = number(key, value);
  else if (key == "t_max") r.t_max = static_cast<int>(integer(key, value));
  else if (key == "lambda") r.lambda = number(key, value);
  else if (key == "gamma") r.gamma = number(key, value);
  else if (key == "radius") r.radius = static_cast<int>(integer(key, value));
  else if (key == "hop_cap") r.hop_cap = static_cast<int>(integer(key, value));
  else if (key == "budget") {
    const long long b = integer(key, value);
    if (b <= 0) bad(key, value);
    r.budget = static_cast<std::size_t>(b);
  } else if (key == "mode") {
    auto m = parse_run_mode(value);
    if (!m) bad(key, value);
    r.mode = *m;
  } else if (key == "neighborhood") r.neighborhood = static_cast<int>(integer(key, value));
  else if (key == "w") r.single_pass_w = static_cast<int>(integer(key, value));
  else if (key == "slot") s.slot = duration(key, value);
  else if (key == "dt") s.duration = duration(key, value);
  else if (key == "L") s.horizon = duration(key, value);
  else if (key == "traffic_percentile") {
    s.traffic_percentile = number(key, value);
    if (!(s.traffic_percentile > 0.0 && s.traffic_percentile <= 1.0)) bad(key, value);
  } else if (key == "rain_threshold") {
    s.rain_threshold = number(key, value);
    if (s.rain_threshold < 0.0) bad(key, value);
  } else {
    throw Error(ErrorCode::kInvalidParams, "unknown setting '" + std::string(key) + "'");
  }
  r.validate();
}

void apply_config(Settings& s, std::istream& in, const std::string& origin) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view v = line;
    if (auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = trim(v);
    if (v.empty()) continue;
    const auto eq = v.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::kInvalidParams,
                  origin + ":" + std::to_string(lineno) + ": expected key = value");
    try {
      apply_setting(s, trim(v.substr(0, eq)), v.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(e.code(), origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void apply_config_file(Settings& s, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open config " + path);
  apply_config(s, in, path);
}

}  // namespace tkgqa
