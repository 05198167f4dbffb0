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

#include <set>

#include <gtest/gtest.h>

#include "chronoforge/error.hpp"
#include "chronoforge/method_spec.hpp"
#include "fixtures.hpp"

namespace chronoforge {
namespace {

MethodSpec dt() { return load_method_spec(testing::data_dir() / "specs/decision_tree.json"); }

const char* kConditional = R"({
  "name": "svm",
  "class": "sklearn.svm.SVC",
  "parameters": {
    "kernel": {"type": "string", "range": ["linear", "rbf"]},
    "gamma": {"type": "float", "range": [0.01, 1.0]},
    "c": {"type": "float", "range": [0.1, 10.0]}
  },
  "root_parameters": ["kernel", "c"],
  "conditions": {"kernel": {"rbf": ["gamma"]}}
})";

TEST(MethodSpec, LoadsDecisionTreeSpec) {
  const MethodSpec s = dt();
  EXPECT_EQ(s.name, "dt");
  EXPECT_EQ(s.method_key, "decision_tree");
  EXPECT_EQ(s.parameters.size(), 5u);
  const ParameterSpec* depth = s.find("max_depth");
  ASSERT_NE(depth, nullptr);
  EXPECT_EQ(depth->type, ParameterSpec::Type::Int);
  EXPECT_EQ(depth->lo, 2);
  EXPECT_EQ(depth->hi, 10);
}

TEST(MethodSpec, MlpSpecParsesWithoutLearner) {
  const MethodSpec s = load_method_spec(testing::data_dir() / "specs/mlp.json");
  EXPECT_EQ(s.method_key, s.method_class);
}

TEST(MethodSpec, RangeViolationNamesParameter) {
  try {
    check_hyperparameters(dt(), {{"max_depth", 0}});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("max_depth=0"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("[2, 10]"), std::string::npos) << e.what();
  }
  EXPECT_THROW(check_hyperparameters(dt(), {{"criterion", "log_loss"}}), ConfigError);
  EXPECT_THROW(check_hyperparameters(dt(), {{"max_depth", 2.5}}), ConfigError);
  EXPECT_THROW(check_hyperparameters(dt(), {{"colour", "red"}}), ConfigError);
  EXPECT_NO_THROW(check_hyperparameters(dt(), {{"max_depth", 10}, {"criterion", "gini"}}));
}

TEST(MethodSpec, StructuralErrorsCarryPointers) {
  Json j = Json::parse(kConditional);
  j["parameters"]["gamma"]["range"] = {1.0};
  try {
    method_spec_from_json(j);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.pointer(), "/parameters/gamma/range");
  }
  j = Json::parse(kConditional);
  j["root_parameters"].push_back("nope");
  EXPECT_THROW(method_spec_from_json(j), SchemaError);
  EXPECT_THROW(parse_method_spec("{"), Error);
}

TEST(MethodSpec, ConditionalActivation) {
  const MethodSpec s = parse_method_spec(kConditional);
  EXPECT_EQ(s.active_parameters({{"kernel", "linear"}, {"c", 1.0}}), (std::vector<std::string>{"kernel", "c"}));
  EXPECT_EQ(s.active_parameters({{"kernel", "rbf"}, {"c", 1.0}}), (std::vector<std::string>{"kernel", "c", "gamma"}));
}

TEST(SampleRandom, StaysInRangeProperty) {
  const MethodSpec s = parse_method_spec(kConditional);
  Rng rng(1);
  bool saw_gamma = false, saw_no_gamma = false;
  for (int i = 0; i < 500; ++i) {
    const Json h = sample_random(s, rng);
    EXPECT_NO_THROW(check_hyperparameters(s, h)) << h.dump();
    const bool rbf = h.at("kernel") == "rbf";
    EXPECT_EQ(h.contains("gamma"), rbf);
    (rbf ? saw_gamma : saw_no_gamma) = true;
  }
  EXPECT_TRUE(saw_gamma && saw_no_gamma);
  Rng a(5), b(5);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(sample_random(dt(), a), sample_random(dt(), b));
}

TEST(SampleRandom, IntsCoverInclusiveBounds) {
  Rng rng(2);
  std::set<int> leaf;
  for (int i = 0; i < 300; ++i) leaf.insert(sample_random(dt(), rng).at("min_samples_leaf").get<int>());
  EXPECT_EQ(leaf, (std::set<int>{1, 2, 3}));
}

TEST(GridConfigurations, CartesianOverDiscretisedRanges) {
  const auto grid = grid_configurations(dt(), 5);
  // criterion 2 x max_features 5 x max_depth 5 x min_samples_split 3 x min_samples_leaf 3
  EXPECT_EQ(grid.size(), 2u * 5 * 5 * 3 * 3);
  std::set<std::string> unique;
  for (const auto& h : grid) {
    EXPECT_NO_THROW(check_hyperparameters(dt(), h));
    unique.insert(h.dump());
  }
  EXPECT_EQ(unique.size(), grid.size());
}

TEST(GridConfigurations, ConditionalParametersOnlyWhenActive) {
  const auto grid = grid_configurations(parse_method_spec(kConditional), 5);
  EXPECT_EQ(grid.size(), 5u + 5u * 5u);  // linear x c, rbf x c x gamma
}

}  // namespace
}  // namespace chronoforge
