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

#ifndef TKGQA_CONFIG_HPP_
#define TKGQA_CONFIG_HPP_

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tkgqa/controller.hpp"
#include "tkgqa/ingest.hpp"

namespace tkgqa {

/// Every tunable of the pipeline. Layering: defaults < config file < flags.
struct Settings {
  RunConfig run;
  Seconds slot = 1800;
  Seconds duration = 4 * kHour;  // Δt for generated items
  Seconds horizon = 12 * kHour;  // L
  double traffic_percentile = 0.95;
  double rain_threshold = 0.0;
};

/// Keys: theta, t_max, lambda, gamma, radius, hop_cap, budget, mode,
/// neighborhood, w, slot, dt, L, traffic_percentile, rain_threshold.
/// Durations accept "30m", "4h", "1h30m" or seconds. Throws INVALID_PARAMS.
void apply_setting(Settings& s, std::string_view key, std::string_view value);

/// `key = value` lines; '#' starts a comment.
void apply_config(Settings& s, std::istream& in, const std::string& origin = "config");
void apply_config_file(Settings& s, const std::string& path);

std::vector<std::string_view> setting_keys();

}  // namespace tkgqa

#endif  // TKGQA_CONFIG_HPP_
