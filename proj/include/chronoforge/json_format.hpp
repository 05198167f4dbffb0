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

#include <string>

#include <nlohmann/json.hpp>

namespace chronoforge {

using Json = nlohmann::json;                // keys kept sorted
using OrderedJson = nlohmann::ordered_json;  // keys kept in insertion order

// Shortest text that parses back to the identical double.
std::string format_double(double v);

// Rounds to six significant decimal digits.
double round_significant(double v);
// Six-significant-digit rounding that never moves v inwards: the result is
// <= v when rounding_down, >= v otherwise.
double round_significant_outward(double v, bool rounding_down);

// Report-style number: integral values as "N.0", others with at most six
// significant digits and at least two decimals ("9.50", "0.201").
std::string format_report_number(double v);

// Canonical document text: 2-space indent, LF, trailing newline. Sorted
// emission comes from Json's key order; OrderedJson preserves insertion order.
std::string dump_canonical(const Json& j);
// Same layout, with floating-point values rendered by format_report_number.
std::string dump_report(const OrderedJson& j);

}  // namespace chronoforge
