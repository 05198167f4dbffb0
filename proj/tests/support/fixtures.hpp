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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chronoforge/entityset.hpp"
#include "chronoforge/features.hpp"
#include "chronoforge/model_search.hpp"
#include "chronoforge/pipeline.hpp"
#include "chronoforge/rng.hpp"

namespace chronoforge::testing {

std::filesystem::path data_dir();
std::filesystem::path retail_tiny_dir();
MetadataDocument retail_tiny_metadata();
EntitySet retail_tiny();

// Random relational fixture: 2..max_entities entities e0..eN where each ei
// (i > 0) has one or two parents among e0..e(i-1); at most max_rows rows in
// total. Variables: id, <parent>_id, optional t (time index), x (numeric),
// b (boolean), c (categorical), optional d (datetime). Nulls sprinkled in.
struct RandomFixture {
  MetadataDocument metadata;
  EntitySet es;
};
RandomFixture random_fixture(std::uint64_t seed, int max_entities = 6, std::size_t max_rows = 300);

// Hard-deletes the rows selected by `drop`, then every row whose foreign key
// points at a deleted row, until nothing changes.
EntitySet delete_rows(const EntitySet& es, const std::function<bool(const Entity&, std::size_t)>& drop);
// Deletes rows whose own time index is >= cutoff (with cascade).
EntitySet truncate_at(const EntitySet& es, Timestamp cutoff);

// Fresh scratch directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

// Two numeric features; class 1 lives in [1,2]^2, class 0 in [-2,-1]^2.
struct SeparableData {
  SplitData train;
  SplitData tune;
  SplitData test;
};
SeparableData separable_data(std::uint64_t seed, std::size_t n_train = 40, std::size_t n_tune = 20,
                             std::size_t n_test = 20);

// labels, features and train for the retail_tiny run config into a fresh
// scratch directory.
RunConfig retail_tiny_config();
std::filesystem::path train_retail_tiny(const std::string& name, unsigned jobs = 1);

// Runs the chronoforge executable with `args` (shell syntax); captures stderr.
struct CliResult {
  int code = -1;
  std::string err;
};
CliResult run_cli(const std::string& args);
std::string read_text(const std::filesystem::path& path);

SearchParams search_params(const std::vector<std::string>& spec_files, std::size_t budget,
                           AutomlMethod automl = AutomlMethod::Random, std::uint64_t seed = 0);

}  // namespace chronoforge::testing
