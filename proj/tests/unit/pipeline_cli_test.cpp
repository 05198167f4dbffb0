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

#include <cstdlib>
#include <fstream>

#include <gtest/gtest.h>

#include "chronoforge/deployment.hpp"
#include "chronoforge/pipeline.hpp"
#include "chronoforge/provenance.hpp"
#include "fixtures.hpp"

namespace chronoforge {
namespace {

namespace fs = std::filesystem;
using testing::read_text;
using testing::run_cli;

std::string config_arg() { return "-c '" + (testing::retail_tiny_dir() / "run_config.json").string() + "'"; }

std::string without_elapsed(const std::string& provenance) {
  OrderedJson j = OrderedJson::parse(provenance);
  j["modeling"].erase("elapsed_seconds");
  return j.dump();
}

TEST(RunConfig, RelativePathsResolveAgainstConfig) {
  const RunConfig cfg = testing::retail_tiny_config();
  EXPECT_EQ(fs::weakly_canonical(cfg.data_dir), fs::weakly_canonical(testing::retail_tiny_dir()));
  EXPECT_EQ(fs::weakly_canonical(*cfg.new_data_dir), fs::weakly_canonical(testing::data_dir() / "retail_tiny_new"));
  EXPECT_EQ(cfg.methods.size(), 2u);
  EXPECT_EQ(cfg.prediction_window, "7 days");
  EXPECT_EQ(cfg.splits.splits.size(), 3u);
}

TEST(RunConfig, RejectsMissingSections) {
  Json j = Json::parse(read_text(testing::retail_tiny_dir() / "run_config.json"));
  j.erase("data_splits");
  EXPECT_THROW(RunConfig::from_json(j, testing::retail_tiny_dir()), ConfigError);
}

TEST(RunConfig, OutputDirectoryPrecedence) {
  RunConfig cfg = testing::retail_tiny_config();
  RunOptions opt;
  ::unsetenv("CHRONOFORGE_OUTPUT");
  EXPECT_THROW(resolve_output_dir(cfg, opt), ConfigError);
  ::setenv("CHRONOFORGE_OUTPUT", "/tmp/from_env", 1);
  EXPECT_EQ(resolve_output_dir(cfg, opt), fs::path("/tmp/from_env"));
  cfg.output_dir = "/tmp/from_config";
  EXPECT_EQ(resolve_output_dir(cfg, opt), fs::path("/tmp/from_config"));
  opt.output_dir = "/tmp/from_flag";
  EXPECT_EQ(resolve_output_dir(cfg, opt), fs::path("/tmp/from_flag"));
  ::unsetenv("CHRONOFORGE_OUTPUT");
}

TEST(Cli, FullRunSucceedsAndProvenanceIsClosed) {
  const fs::path out = testing::scratch_dir("cli_full");
  const std::string common = config_arg() + " -o '" + out.string() + "'";
  for (const char* cmd : {"labels", "features", "train", "test", "validate", "predict"}) {
    const auto r = run_cli(std::string(cmd) + " " + common);
    ASSERT_EQ(r.code, 0) << cmd << ": " << r.err;
  }
  const ProvenanceDocument doc = validate_provenance(read_text(out / "model_provenance.json"));
  const OrderedJson& j = doc.json();
  std::vector<std::string> paths{j["metadata"], j["prediction_engineering"]["labeling_function"],
                                 j["modeling"]["automl_method"], j["modeling"]["cost_function"],
                                 j["deployment"]["deployment_executable"], doc.feature_list_path(), doc.model_path()};
  for (const auto& m : j["modeling"]["methods"]) paths.push_back(m["hyperparameter_options"]);
  for (const auto& [role, setup] : j["training_setup"].items()) paths.push_back(setup["validation_method"]);
  for (const auto& p : paths) {
    EXPECT_TRUE(fs::path(p).is_relative()) << p;
    EXPECT_TRUE(fs::exists(out / p)) << p;
  }
  for (const char* f : {"integration_report.json", "integration_predictions.csv", "validation_report.json",
                        "predictions.csv", "drift_report.jsonl", "leaderboard.csv", "test_scores.csv"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  EXPECT_NO_THROW(DeploymentBundle::load(out));
}

TEST(Cli, TrainBeforeFeaturesIsConfigError) {
  const fs::path out = testing::scratch_dir("cli_order");
  ASSERT_EQ(run_cli("labels " + config_arg() + " -o '" + out.string() + "'").code, 0);
  const auto r = run_cli("train " + config_arg() + " -o '" + out.string() + "'");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("feature_list.json"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("features"), std::string::npos) << r.err;
}

TEST(Cli, RepeatedRunsAreIdentical) {
  const fs::path a = testing::scratch_dir("cli_repeat_a");
  const fs::path b = testing::scratch_dir("cli_repeat_b");
  for (const auto& out : {a, b})
    for (const char* cmd : {"labels", "features", "train"})
      ASSERT_EQ(run_cli(std::string(cmd) + " " + config_arg() + " -o '" + out.string() + "'").code, 0);
  for (const char* f : {"label_times_train.csv", "feature_matrix_test.csv", "leaderboard.csv", "model.json"})
    EXPECT_EQ(read_text(a / f), read_text(b / f)) << f;
  EXPECT_EQ(without_elapsed(read_text(a / "model_provenance.json")),
            without_elapsed(read_text(b / "model_provenance.json")));
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli("").code, 2);
  EXPECT_EQ(run_cli("labels").code, 2);
  EXPECT_EQ(run_cli("labels -c /nonexistent/run.json -o /tmp/x").code, 2);
  EXPECT_EQ(run_cli("labels " + config_arg() + " --jobs 0 -o /tmp/x").code, 2);
}

TEST(Cli, MissingOutputDirectoryIsConfigError) {
  ::unsetenv("CHRONOFORGE_OUTPUT");
  const auto r = run_cli("labels " + config_arg());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("CHRONOFORGE_OUTPUT"), std::string::npos) << r.err;
}

TEST(Cli, EnvironmentOutputDirectory) {
  const fs::path out = testing::scratch_dir("cli_env");
  ::setenv("CHRONOFORGE_OUTPUT", out.c_str(), 1);
  const auto r = run_cli("labels " + config_arg());
  ::unsetenv("CHRONOFORGE_OUTPUT");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(out / "label_times_train.csv"));
}

}  // namespace
}  // namespace chronoforge
