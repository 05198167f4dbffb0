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

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace chronoforge {

// Absolute instant, UTC, second resolution.
struct Timestamp {
  std::int64_t seconds = 0;  // since 1970-01-01T00:00:00Z

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

// Signed second count that remembers the text it was parsed from.
class Duration {
 public:
  Duration() = default;

  // Grammar: "<non-negative integer> <unit>", unit in
  // {seconds, minutes, hours, days, weeks, years}; a year is 365 days.
  static Duration parse(std::string_view text);
  static std::optional<Duration> try_parse(std::string_view text);
  static Duration from_seconds(std::int64_t seconds);

  std::int64_t seconds() const noexcept { return seconds_; }
  const std::string& text() const noexcept { return text_; }

  friend bool operator==(const Duration& a, const Duration& b) { return a.seconds_ == b.seconds_; }
  friend auto operator<=>(const Duration& a, const Duration& b) { return a.seconds_ <=> b.seconds_; }

 private:
  Duration(std::int64_t seconds, std::string text) : seconds_(seconds), text_(std::move(text)) {}

  std::int64_t seconds_ = 0;
  std::string text_ = "0 seconds";
};

inline Timestamp operator+(Timestamp t, const Duration& d) { return {t.seconds + d.seconds()}; }
inline Timestamp operator-(Timestamp t, const Duration& d) { return {t.seconds - d.seconds()}; }

// Accepts YYYY-MM-DDTHH:MM:SSZ, YYYY-MM-DD and YYYY/MM/DD (dates are midnight UTC).
std::optional<Timestamp> try_parse_timestamp(std::string_view text);
Timestamp parse_timestamp(std::string_view text);

// Canonical YYYY-MM-DDTHH:MM:SSZ.
std::string format_timestamp(Timestamp t);

// Calendar fields, proleptic Gregorian, UTC.
int day_of_month(Timestamp t);
int month_of_year(Timestamp t);
int weekday_monday0(Timestamp t);

}  // namespace chronoforge
