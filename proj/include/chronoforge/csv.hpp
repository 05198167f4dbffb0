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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace chronoforge::csv {

// Comma-delimited, first row is the header, RFC 4180 quoting. CRLF accepted.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Table parse(std::string_view text);
Table read_file(const std::filesystem::path& path);

std::string quote_field(std::string_view field);
std::string write(const Table& table);
void write_file(const std::filesystem::path& path, const Table& table);

}  // namespace chronoforge::csv
