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

#include "tkgqa/time.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <string>

namespace tkgqa {

namespace {

// Howard Hinnant's days_from_civil / civil_from_days.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Civil {
  std::int64_t year;
  unsigned month;
  unsigned day;
};

Civil civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {y + (m <= 2), m, d};
}

unsigned days_in_month(std::int64_t y, unsigned m) {
  static constexpr std::array<unsigned, 12> kDays = {31, 28, 31, 30, 31, 30,
                                                     31, 31, 30, 31, 30, 31};
  if (m == 2) {
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    return leap ? 29 : 28;
  }
  return kDays[m - 1];
}

// Minimal cursor over the input.
class Scanner {
 public:
  explicit Scanner(std::string_view s) : s_(s) {}

  bool done() const { return pos_ >= s_.size(); }
  char peek() const { return done() ? '\0' : s_[pos_]; }
  bool eat(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  std::optional<int> digits(std::size_t min_n, std::size_t max_n) {
    std::size_t n = 0;
    int v = 0;
    while (n < max_n && !done() && std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + (peek() - '0');
      ++pos_;
      ++n;
    }
    if (n < min_n) return std::nullopt;
    return v;
  }
  std::string_view word() {
    std::size_t b = pos_;
    while (!done() && std::isalpha(static_cast<unsigned char>(peek()))) ++pos_;
    return s_.substr(b, pos_ - b);
  }
  std::string_view rest() const { return s_.substr(pos_); }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

std::optional<unsigned> month_from_name(std::string_view w) {
  static constexpr std::array<std::string_view, 12> kNames = {
      "jan", "feb", "mar", "apr", "may", "jun",
      "jul", "aug", "sep", "oct", "nov", "dec"};
  if (w.size() < 3) return std::nullopt;
  std::string lower;
  for (std::size_t i = 0; i < 3; ++i)
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(w[i]))));
  for (std::size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == lower) return static_cast<unsigned>(i + 1);
  return std::nullopt;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

}  // namespace

Seconds from_civil(int year, unsigned month, unsigned day, int hour, int minute,
                   int second) {
  return days_from_civil(year, month, day) * kDay + hour * kHour +
         minute * kMinute + second;
}

std::optional<Seconds> parse_utc_offset(std::string_view text) {
  text = trim(text);
  if (text == "Z" || text == "UTC" || text == "utc" || text == "GMT")
    return Seconds{0};
  if (text.size() >= 3 && (text.substr(0, 3) == "UTC" || text.substr(0, 3) == "GMT"))
    text.remove_prefix(3);
  if (text.empty()) return std::nullopt;
  const char sign = text.front();
  if (sign != '+' && sign != '-') return std::nullopt;
  Scanner sc(text.substr(1));
  auto hh = sc.digits(1, 2);
  if (!hh || *hh > 14) return std::nullopt;
  int mm = 0;
  if (sc.eat(':') || !sc.done()) {
    auto m = sc.digits(2, 2);
    if (!m || *m > 59) return std::nullopt;
    mm = *m;
  }
  if (!sc.done()) return std::nullopt;
  const Seconds off = *hh * kHour + mm * kMinute;
  return sign == '-' ? -off : off;
}

std::optional<Seconds> parse_timestamp(std::string_view text, Seconds utc_offset) {
  text = trim(text);
  Scanner sc(text);
  int year = 0;
  unsigned month = 0;
  unsigned day = 0;

  auto first = sc.digits(1, 4);
  if (!first) return std::nullopt;
  if (sc.eat('-')) {
    if (std::isalpha(static_cast<unsigned char>(sc.peek()))) {
      // 11-Mar-2024
      auto m = month_from_name(sc.word());
      if (!m || !sc.eat('-')) return std::nullopt;
      auto y = sc.digits(4, 4);
      if (!y) return std::nullopt;
      day = static_cast<unsigned>(*first);
      month = *m;
      year = *y;
    } else {
      // 2024-03-11
      auto m = sc.digits(1, 2);
      if (!m || !sc.eat('-')) return std::nullopt;
      auto d = sc.digits(1, 2);
      if (!d) return std::nullopt;
      year = *first;
      month = static_cast<unsigned>(*m);
      day = static_cast<unsigned>(*d);
    }
  } else if (sc.eat('/')) {
    // 11/03/2024 (day first)
    auto m = sc.digits(1, 2);
    if (!m || !sc.eat('/')) return std::nullopt;
    auto y = sc.digits(4, 4);
    if (!y) return std::nullopt;
    day = static_cast<unsigned>(*first);
    month = static_cast<unsigned>(*m);
    year = *y;
  } else {
    return std::nullopt;
  }
  if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month))
    return std::nullopt;

  int hour = 0;
  int minute = 0;
  int second = 0;
  if (sc.eat('T') || sc.eat(' ')) {
    while (sc.eat(' ')) {
    }
    auto h = sc.digits(1, 2);
    if (!h || !sc.eat(':')) return std::nullopt;
    auto m = sc.digits(2, 2);
    if (!m) return std::nullopt;
    hour = *h;
    minute = *m;
    if (sc.eat(':')) {
      auto s = sc.digits(2, 2);
      if (!s) return std::nullopt;
      second = *s;
      if (sc.eat('.')) sc.digits(1, 9);
    }
    if (hour > 23 || minute > 59 || second > 59) return std::nullopt;
  }
  Seconds offset = utc_offset;
  std::string_view rest = trim(sc.rest());
  if (!rest.empty()) {
    auto explicit_offset = parse_utc_offset(rest);
    if (!explicit_offset) return std::nullopt;
    offset = *explicit_offset;
  }
  return from_civil(year, month, day, hour, minute, second) - offset;
}

std::string format_timestamp(Seconds t) {
  const Seconds days = (t >= 0 ? t : t - (kDay - 1)) / kDay;
  const Seconds sod = t - days * kDay;
  const Civil c = civil_from_days(days);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                static_cast<long long>(c.year), c.month, c.day,
                static_cast<long long>(sod / kHour),
                static_cast<long long>((sod % kHour) / kMinute),
                static_cast<long long>(sod % kMinute));
  return buf;
}

std::optional<Seconds> parse_duration(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  Seconds total = 0;
  bool any = false;
  while (!text.empty()) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || v < 0) return std::nullopt;
    text.remove_prefix(static_cast<std::size_t>(ptr - text.data()));
    Seconds unit = 1;
    if (!text.empty()) {
      switch (text.front()) {
        case 'd': unit = kDay; break;
        case 'h': unit = kHour; break;
        case 'm': unit = kMinute; break;
        case 's': unit = 1; break;
        default: return std::nullopt;
      }
      text.remove_prefix(1);
    } else if (any) {
      return std::nullopt;
    }
    total += v * unit;
    any = true;
  }
  return total;
}

std::string format_duration(Seconds d) {
  if (d != 0 && d % kHour == 0) return std::to_string(d / kHour) + "h";
  if (d != 0 && d % kMinute == 0) return std::to_string(d / kMinute) + "m";
  return std::to_string(d) + "s";
}

std::string to_string(const TimeRef& t) {
  if (t.is_point()) return format_timestamp(t.start);
  return "[" + format_timestamp(t.start) + ", " + format_timestamp(t.end) + ")";
}

}  // namespace tkgqa
