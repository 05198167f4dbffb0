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
#include <optional>
#include <string>
#include <vector>

#include "chronoforge/features.hpp"
#include "chronoforge/json_format.hpp"
#include "chronoforge/model_search.hpp"
#include "chronoforge/prediction_engineering.hpp"

namespace chronoforge {

// One declarative run description. Relative paths resolve against the
// directory holding the config file.
struct RunConfig {
  std::filesystem::path data_dir;
  std::filesystem::path metadata_path;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::filesystem::path> new_data_dir;

  std::string target_entity;
  std::string labeling_function;
  Json labeling_parameters = Json::object();
  std::string prediction_window;
  std::string lead = "0 days";
  std::string min_training_data = "0 days";

  DfsParams dfs;
  std::optional<std::size_t> n_features;

  std::vector<std::pair<std::string, std::filesystem::path>> methods;  // (method, hyperparameter_options)
  Json budget;
  AutomlMethod automl = AutomlMethod::Random;
  std::optional<std::uint64_t> automl_seed;
  int k_repeats = 3;
  double threshold_grid_step = 0.001;
  std::string cost_function = "f1_cost";
  Json cost_parameters = Json::object();

  DataSplits splits;

  std::optional<Timestamp> current_time;
  std::vector<std::string> deployment_instances;
  std::optional<std::vector<Timestamp>> validation_timestamps;

  std::uint64_t seed = 0;

  static RunConfig from_json(const Json& j, const std::filesystem::path& base_dir);
  static RunConfig load(const std::filesystem::path& path);
};

struct RunOptions {
  std::optional<std::filesystem::path> output_dir;  // overrides the config
  std::optional<std::uint64_t> seed;
  std::optional<Timestamp> current_time;
  unsigned jobs = 1;
};

// Output directory: --output, then the config, then $CHRONOFORGE_OUTPUT.
std::filesystem::path resolve_output_dir(const RunConfig& cfg, const RunOptions& opt);

LabelSearchParams label_params_for(const RunConfig& cfg, const DataSplit& split, std::uint64_t seed);

// Each command reads what the previous one left in the output directory and
// throws ConfigError naming the missing artifact when it is absent.
void run_labels(const RunConfig& cfg, const RunOptions& opt);
void run_features(const RunConfig& cfg, const RunOptions& opt);
void run_train(const RunConfig& cfg, const RunOptions& opt);
bool run_test(const RunConfig& cfg, const RunOptions& opt);      // false: harness failed
void run_validate(const RunConfig& cfg, const RunOptions& opt);
void run_predict(const RunConfig& cfg, const RunOptions& opt);

}  // namespace chronoforge
