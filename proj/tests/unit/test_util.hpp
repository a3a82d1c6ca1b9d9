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

// Small graph builders shared by the unit suites.

#ifndef TKGQA_TESTS_TEST_UTIL_HPP_
#define TKGQA_TESTS_TEST_UTIL_HPP_

#include <string>
#include <vector>

#include "tkgqa/ingest.hpp"
#include "tkgqa/kg.hpp"
#include "tkgqa/time.hpp"

namespace tkgqa::testing {

inline constexpr Seconds kT0 = 1701734400;  // 2023-12-05T00:00:00Z
inline constexpr Seconds kSlot = 1800;

struct Series {
  std::string key;
  std::vector<double> rain;  // one value per slot from the series start
};

inline std::vector<RawRecord> rain_records(const std::vector<Series>& series, Seconds start = kT0,
                                           Seconds slot = kSlot) {
  std::vector<RawRecord> out;
  for (const Series& s : series)
    for (std::size_t i = 0; i < s.rain.size(); ++i)
      out.push_back(RawRecord{start + static_cast<Seconds>(i) * slot, s.key, s.key, s.rain[i],
                              MeasureKind::kRain, std::nullopt});
  return out;
}

inline TemporalKG rain_kg(const std::vector<Series>& series, Seconds start = kT0,
                          Seconds slot = kSlot, const std::vector<NearEdge>& near = {}) {
  const auto recs = rain_records(series, start, slot);
  return build_kg(recs, slot, near);
}

inline Seconds at(int slot_index, Seconds start = kT0, Seconds slot = kSlot) {
  return start + slot_index * slot;
}

inline std::string fixture(const std::string& name) {
  return std::string(TKGQA_FIXTURE_DIR) + "/" + name;
}

}  // namespace tkgqa::testing

#endif  // TKGQA_TESTS_TEST_UTIL_HPP_
