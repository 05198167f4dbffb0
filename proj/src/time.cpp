/*
 * Copyright 2026 The Chronoforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "chronoforge/time.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cstdio>

#include "chronoforge/error.hpp"

namespace chronoforge {
namespace {

struct UnitDef {
  std::string_view name;
  std::int64_t seconds;
};

constexpr std::array<UnitDef, 6> kUnits{{{"seconds", 1},
                                         {"minutes", 60},
                                         {"hours", 3600},
                                         {"days", 86400},
                                         {"weeks", 7 * 86400},
                                         {"years", 365 * 86400}}};

bool parse_digits(std::string_view s, int& out) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

std::chrono::sys_days to_days(Timestamp t) {
  using namespace std::chrono;
  auto secs = sys_seconds{seconds{t.seconds}};
  return floor<days>(secs);
}

}  // namespace

std::optional<Duration> Duration::try_parse(std::string_view text) {
  auto space = text.find(' ');
  if (space == std::string_view::npos || space == 0) return std::nullopt;
  auto number = text.substr(0, space);
  auto unit = text.substr(space + 1);
  std::int64_t n = 0;
  for (char c : number)
    if (c < '0' || c > '9') return std::nullopt;
  auto [p, ec] = std::from_chars(number.data(), number.data() + number.size(), n);
  if (ec != std::errc{} || p != number.data() + number.size()) return std::nullopt;
  for (const auto& u : kUnits) {
    if (u.name == unit) return Duration(n * u.seconds, std::string(text));
  }
  return std::nullopt;
}

Duration Duration::parse(std::string_view text) {
  if (auto d = try_parse(text)) return *d;
  throw ConfigError("invalid duration '" + std::string(text) +
                    "' (expected '<integer> <seconds|minutes|hours|days|weeks|years>')");
}

Duration Duration::from_seconds(std::int64_t seconds) {
  if (seconds >= 0) {
    for (auto it = kUnits.rbegin(); it != kUnits.rend(); ++it) {
      if (seconds % it->seconds == 0)
        return Duration(seconds, std::to_string(seconds / it->seconds) + " " +
                                     std::string(it->name));
    }
  }
  return Duration(seconds, std::to_string(seconds) + " seconds");
}

std::optional<Timestamp> try_parse_timestamp(std::string_view text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (text.size() == 10 && (text[4] == '-' || text[4] == '/') && text[7] == text[4]) {
    if (!parse_digits(text.substr(0, 4), y) || !parse_digits(text.substr(5, 2), mo) ||
        !parse_digits(text.substr(8, 2), d))
      return std::nullopt;
  } else if (text.size() == 20 && text[4] == '-' && text[7] == '-' && text[10] == 'T' &&
             text[13] == ':' && text[16] == ':' && text[19] == 'Z') {
    if (!parse_digits(text.substr(0, 4), y) || !parse_digits(text.substr(5, 2), mo) ||
        !parse_digits(text.substr(8, 2), d) || !parse_digits(text.substr(11, 2), h) ||
        !parse_digits(text.substr(14, 2), mi) || !parse_digits(text.substr(17, 2), s))
      return std::nullopt;
  } else {
    return std::nullopt;
  }
  using namespace std::chrono;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) return std::nullopt;
  auto days_since = sys_days{ymd}.time_since_epoch().count();
  return Timestamp{static_cast<std::int64_t>(days_since) * 86400 + h * 3600 + mi * 60 + s};
}

Timestamp parse_timestamp(std::string_view text) {
  if (auto t = try_parse_timestamp(text)) return *t;
  throw ConfigError("invalid timestamp '" + std::string(text) + "'");
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  auto day_point = to_days(t);
  year_month_day ymd{day_point};
  std::int64_t rem = t.seconds - static_cast<std::int64_t>(day_point.time_since_epoch().count()) * 86400;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                static_cast<int>(rem % 60));
  return buf;
}

int day_of_month(Timestamp t) {
  return static_cast<int>(static_cast<unsigned>(std::chrono::year_month_day{to_days(t)}.day()));
}

int month_of_year(Timestamp t) {
  return static_cast<int>(static_cast<unsigned>(std::chrono::year_month_day{to_days(t)}.month()));
}

int weekday_monday0(Timestamp t) {
  return static_cast<int>((std::chrono::weekday{to_days(t)}.c_encoding() + 6) % 7);
}

}  // namespace chronoforge
