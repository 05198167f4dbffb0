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

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "chronoforge/csv.hpp"
#include "chronoforge/deployment.hpp"
#include "fixtures.hpp"

namespace chronoforge {
namespace {

namespace fs = std::filesystem;

const fs::path& trained() {
  static const fs::path dir = testing::train_retail_tiny("deployment_bundle");
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<CutoffRow> test_cutoffs() {
  std::vector<CutoffRow> rows;
  for (const auto& lt : read_label_times_csv(trained() / "label_times_test.csv")) rows.push_back({lt.instance_id, lt.cutoff_time});
  return rows;
}

EntitySet retail_tiny_plus() {
  return add_new_data(testing::retail_tiny(), testing::data_dir() / "retail_tiny_new", testing::retail_tiny_metadata());
}

TEST(DeploymentBundle, LoadsAndVerifies) {
  const DeploymentBundle b = DeploymentBundle::load(trained());
  EXPECT_EQ(b.threshold, b.model.threshold);
  EXPECT_EQ(b.model.features, b.feature_list.names());
  EXPECT_NO_THROW(b.verify());
}

TEST(DeploymentBundle, ThresholdMismatchRejected) {
  const fs::path dir = testing::scratch_dir("tampered_threshold");
  fs::copy(trained(), dir, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
  OrderedJson j = OrderedJson::parse(slurp(dir / "model_provenance.json"));
  j["deployment"]["deployment_parameters"]["threshold"] = 0.777;
  std::ofstream(dir / "model_provenance.json") << dump_report(j);
  EXPECT_THROW(DeploymentBundle::load(dir), SchemaError);
}

TEST(DeploymentBundle, ForeignFeatureListRejected) {
  const fs::path dir = testing::scratch_dir("tampered_features");
  fs::copy(trained(), dir, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
  FeatureList fl = parse_feature_list(slurp(dir / "feature_list.json"));
  fl.features.pop_back();
  std::ofstream(dir / "feature_list.json") << serialize_feature_list(fl);
  EXPECT_THROW(DeploymentBundle::load(dir), SchemaError);
}

TEST(GeneratePredictions, ReplaysTestScoresBitwise) {
  const DeploymentBundle b = DeploymentBundle::load(trained());
  const FeatureMatrix m = calculate_feature_matrix(testing::retail_tiny(), test_cutoffs(), b.feature_list);
  const auto preds = generate_predictions(b, m);
  const csv::Table recorded = csv::read_file(trained() / "test_scores.csv");
  ASSERT_EQ(recorded.rows.size(), preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    EXPECT_EQ(preds[i].instance_id, recorded.rows[i][0]);
    EXPECT_EQ(format_timestamp(preds[i].cutoff_time), recorded.rows[i][1]);
    EXPECT_EQ(format_double(preds[i].score), recorded.rows[i][2]);
  }
}

TEST(GeneratePredictions, EmptyMatrix) {
  const DeploymentBundle b = DeploymentBundle::load(trained());
  const FeatureMatrix m = calculate_feature_matrix(testing::retail_tiny(), std::vector<CutoffRow>{}, b.feature_list);
  EXPECT_TRUE(generate_predictions(b, m).empty());
}

TEST(GeneratePredictions, ThresholdIsInclusive) {
  DeploymentBundle b = DeploymentBundle::load(trained());
  const FeatureMatrix m = calculate_feature_matrix(testing::retail_tiny(), test_cutoffs(), b.feature_list);
  const auto preds = generate_predictions(b, m);
  b.threshold = preds.front().score;
  for (const auto& p : generate_predictions(b, m)) EXPECT_EQ(p.decision, p.score >= b.threshold);
  EXPECT_TRUE(generate_predictions(b, m).front().decision);
}

TEST(GeneratePredictions, ColumnOrderChecked) {
  const DeploymentBundle b = DeploymentBundle::load(trained());
  FeatureMatrix m = calculate_feature_matrix(testing::retail_tiny(), test_cutoffs(), b.feature_list);
  std::swap(m.columns.front(), m.columns.back());
  EXPECT_THROW(generate_predictions(b, m), SchemaError);
}

TEST(IntegrationTest, NewOrderGivesThreePredictions) {
  const DeploymentBundle b = DeploymentBundle::load(trained());
  const IntegrationResult r = integration_test(b, testing::retail_tiny(), testing::data_dir() / "retail_tiny_new",
                                               testing::retail_tiny_metadata(), parse_timestamp("2014-03-10"));
  EXPECT_TRUE(r.passed) << r.error;
  EXPECT_EQ(r.entityset_version, 2u);
  EXPECT_EQ(r.predictions.size(), 3u);
}

TEST(IntegrationTest, SchemaViolationStopsAtAddNewData) {
  const DeploymentBundle b = DeploymentBundle::load(trained());
  const fs::path bad = testing::scratch_dir("bad_new_data");
  std::ofstream(bad / "orders.csv") << "Order Id,Customer Id,Timestamp\no9,c1,not-a-date\n";
  const IntegrationResult r =
      integration_test(b, testing::retail_tiny(), bad, testing::retail_tiny_metadata(), parse_timestamp("2014-03-10"));
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.failed_step, "add_new_data");
  EXPECT_TRUE(r.predictions.empty());
}

TEST(IntegrationTest, BeforeAllDataScoresTheImputedBaseline) {
  const DeploymentBundle b = DeploymentBundle::load(trained());
  const IntegrationResult r = integration_test(b, testing::retail_tiny(), testing::data_dir() / "retail_tiny_new",
                                               testing::retail_tiny_metadata(), parse_timestamp("2013-01-01"));
  ASSERT_TRUE(r.passed) << r.error;
  FeatureMatrix nulls;
  nulls.columns = b.feature_list.names();
  for (const auto& c : b.model.preprocessor.columns()) nulls.types.push_back(c.type);
  nulls.rows.push_back(std::vector<Value>(nulls.columns.size()));
  const double baseline = b.model.score(nulls).front();
  for (const auto& p : r.predictions) EXPECT_EQ(p.score, baseline);
}

TEST(ValidateInProduction, ReplayMatchesRecordedResults) {
  const DeploymentBundle b = DeploymentBundle::load(trained());
  const RunConfig cfg = testing::retail_tiny_config();
  const EntitySet es = retail_tiny_plus();
  const auto f = make_labeling_function(es, cfg.target_entity, cfg.labeling_function, cfg.labeling_parameters);
  const auto lp = label_params_for(cfg, cfg.splits.at("test"), cfg.seed);
  const ValidationReport r = validate_in_production(b, es, f, lp, test_cutoffs(), make_cost_function("f1_cost"));
  EXPECT_EQ(r.unlabelable, 0u);
  ASSERT_FALSE(b.model.results.empty());
  const SeedResult& s0 = b.model.results.front();
  EXPECT_EQ(r.metrics.precision, s0.metrics.precision);
  EXPECT_EQ(r.metrics.recall, s0.metrics.recall);
  EXPECT_EQ(r.metrics.fpr, s0.metrics.fpr);
  EXPECT_EQ(r.metrics.auc, s0.metrics.auc);
  EXPECT_EQ(r.cost, s0.cost);
}

TEST(ValidateInProduction, WindowsPastTheDataAreUnlabelable) {
  const DeploymentBundle b = DeploymentBundle::load(trained());
  const RunConfig cfg = testing::retail_tiny_config();
  const EntitySet es = retail_tiny_plus();
  const auto f = make_labeling_function(es, cfg.target_entity, cfg.labeling_function, cfg.labeling_parameters);
  const auto lp = label_params_for(cfg, cfg.splits.at("test"), cfg.seed);
  std::vector<CutoffRow> rows{{"c1", parse_timestamp("2014-06-01")}, {"c2", parse_timestamp("2014-06-01")}};
  const ValidationReport r = validate_in_production(b, es, f, lp, rows, make_cost_function("f1_cost"));
  EXPECT_EQ(r.requested, 2u);
  EXPECT_EQ(r.unlabelable, 2u);
  EXPECT_FALSE(r.metrics.precision || r.metrics.recall || r.metrics.fpr || r.metrics.auc);
  EXPECT_FALSE(r.cost);
}

}  // namespace
}  // namespace chronoforge
