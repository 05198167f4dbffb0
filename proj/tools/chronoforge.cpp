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

// chronoforge: labels | features | train | test | validate | predict
//
// Exit status: 0 success, 1 data or validation failure, 2 configuration error.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "chronoforge/error.hpp"
#include "chronoforge/pipeline.hpp"

namespace {

constexpr int kDataError = 1;
constexpr int kConfigError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-aware predictive modeling pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  std::string current_time;
  std::uint64_t seed = 0;
  unsigned jobs = 1;

  const std::pair<const char*, const char*> commands[] = {
      {"labels", "search label times for every data split"},
      {"features", "synthesize features and compute per-split feature matrices"},
      {"train", "search models, write model, leaderboard and provenance"},
      {"test", "integration test: add new data, featurize, predict"},
      {"validate", "score the deployed model against labels computed on current data"},
      {"predict", "write predictions at the current time"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "run configuration (JSON)")->required();
    sub->add_option("-o,--output", output_dir, "output directory (default: config, then $CHRONOFORGE_OUTPUT)");
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_option("-j,--jobs", jobs, "worker threads; outputs do not depend on it")->check(CLI::Range(1u, 256u));
    if (std::string(name) == "test" || std::string(name) == "predict")
      sub->add_option("--current-time", current_time, "cutoff for deployment features");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const CLI::App* sub = app.get_subcommands().front();
  try {
    const chronoforge::RunConfig cfg = chronoforge::RunConfig::load(config_path);
    chronoforge::RunOptions opt;
    opt.jobs = jobs;
    if (!output_dir.empty()) opt.output_dir = output_dir;
    if (sub->count("--seed") > 0) opt.seed = seed;
    if (!current_time.empty()) opt.current_time = chronoforge::parse_timestamp(current_time);

    if (command == "labels") chronoforge::run_labels(cfg, opt);
    else if (command == "features") chronoforge::run_features(cfg, opt);
    else if (command == "train") chronoforge::run_train(cfg, opt);
    else if (command == "test") return chronoforge::run_test(cfg, opt) ? 0 : kDataError;
    else if (command == "validate") chronoforge::run_validate(cfg, opt);
    else if (command == "predict") chronoforge::run_predict(cfg, opt);
  } catch (const chronoforge::ConfigError& e) {
    std::cerr << "chronoforge " << command << ": configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "chronoforge " << command << ": error: " << e.what() << "\n";
    return kDataError;
  }
  return 0;
}
