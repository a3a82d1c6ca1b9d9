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

#ifndef TKGQA_TIME_HPP_
#define TKGQA_TIME_HPP_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tkgqa {

/// UTC epoch seconds.
using Seconds = std::int64_t;

inline constexpr Seconds kMinute = 60;
inline constexpr Seconds kHour = 3600;
inline constexpr Seconds kDay = 86400;

/// A time point (start == end) or interval. Slot intervals are half-open,
/// [start, end), so adjacent slots neither overlap nor leave a gap.
struct TimeRef {
  Seconds start = 0;
  Seconds end = 0;

  static constexpr TimeRef point(Seconds t) { return {t, t}; }
  static constexpr TimeRef span(Seconds start, Seconds length) {
    return {start, start + length};
  }

  constexpr bool is_point() const { return start == end; }
  constexpr bool valid() const { return start <= end; }
  constexpr Seconds length() const { return end - start; }

  friend constexpr auto operator<=>(const TimeRef&, const TimeRef&) = default;
};

/// Half-open intersection. A point p meets [s, e) iff s <= p < e; two
/// points intersect iff equal.
constexpr bool intersects(const TimeRef& a, const TimeRef& b) {
  if (a.is_point() && b.is_point()) return a.start == b.start;
  if (a.is_point()) return b.start <= a.start && a.start < b.end;
  if (b.is_point()) return a.start <= b.start && b.start < a.end;
  return a.start < b.end && b.start < a.end;
}

constexpr bool slot_aligned(Seconds t, Seconds slot) {
  return slot > 0 && t % slot == 0;
}

constexpr Seconds floor_to_slot(Seconds t, Seconds slot) {
  Seconds r = t % slot;
  if (r < 0) r += slot;
  return t - r;
}

/// Midpoint in seconds as a double (exact for even lengths).
constexpr double midpoint(const TimeRef& t) {
  return 0.5 * static_cast<double>(t.start) + 0.5 * static_cast<double>(t.end);
}

/// Civil-time conversions (proleptic Gregorian, UTC).
Seconds from_civil(int year, unsigned month, unsigned day, int hour = 0,
                   int minute = 0, int second = 0);

/// Parses "2024-03-11T04:00[:00][Z|+hh:mm]", "2024-03-11 04:00[:00]",
/// "11-Mar-2024 04:00[:00]" and "11/03/2024 04:00". A timestamp without an
/// explicit offset is local time and `utc_offset` is subtracted from it.
std::optional<Seconds> parse_timestamp(std::string_view text,
                                       Seconds utc_offset = 0);

/// "2024-03-11T04:30:00Z".
std::string format_timestamp(Seconds t);

/// Parses "+10:00", "-05:30", "UTC", "Z" into an offset in seconds.
std::optional<Seconds> parse_utc_offset(std::string_view text);

/// Parses "4h", "30m", "90s", "2d", "1h30m" or a bare number of seconds.
std::optional<Seconds> parse_duration(std::string_view text);

std::string format_duration(Seconds d);

std::string to_string(const TimeRef& t);

}  // namespace tkgqa

#endif  // TKGQA_TIME_HPP_
