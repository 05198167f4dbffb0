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

#include "chronoforge/json_format.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace chronoforge {

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

double round_significant(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return std::strtod(buf, nullptr);
}

double round_significant_outward(double v, bool rounding_down) {
  double r = round_significant(v);
  if (!std::isfinite(v) || v == 0.0) return r;
  const double digit = std::pow(10.0, std::floor(std::log10(std::fabs(v))) - 5);
  for (int i = 0; i < 4; ++i) {
    if (rounding_down ? r <= v : r >= v) return r;
    r = round_significant(rounding_down ? r - digit : r + digit);
  }
  return v;
}

std::string format_report_number(double v) {
  if (!std::isfinite(v)) return "null";
  if (v == std::trunc(v) && std::fabs(v) < 1e15) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  std::string s = buf;
  if (s.find_first_of("eE") != std::string::npos) return s;
  auto dot = s.find('.');
  if (dot == std::string::npos) return s + ".00";
  while (s.back() == '0' && s.size() - dot - 1 > 2) s.pop_back();
  while (s.size() - dot - 1 < 2) s += '0';
  return s;
}

std::string dump_canonical(const Json& j) { return j.dump(2) + "\n"; }

namespace {

void write_report(const OrderedJson& j, int indent, std::string& out) {
  auto pad = [&](int n) { out.append(static_cast<std::size_t>(n), ' '); };
  switch (j.type()) {
    case OrderedJson::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        pad(indent + 2);
        out += OrderedJson(it.key()).dump();
        out += ": ";
        write_report(it.value(), indent + 2, out);
      }
      out += "\n";
      pad(indent);
      out += "}";
      return;
    }
    case OrderedJson::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        pad(indent + 2);
        write_report(j[i], indent + 2, out);
      }
      out += "\n";
      pad(indent);
      out += "]";
      return;
    }
    case OrderedJson::value_t::number_float:
      out += format_report_number(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_report(const OrderedJson& j) {
  std::string out;
  write_report(j, 0, out);
  out += "\n";
  return out;
}

}  // namespace chronoforge
