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

#include <cmath>

#include <gtest/gtest.h>

#include "chronoforge/metrics.hpp"
#include "chronoforge/rng.hpp"
#include "fixtures.hpp"

namespace chronoforge {
namespace {

const CostContext kNoContext{};

TEST(Metrics, ThreeRowExample) {
  const std::vector<double> s{0.9, 0.4, 0.2};
  const std::vector<int> y{1, 1, 0};
  const Metrics m = compute_metrics(s, y, 0.3);
  EXPECT_EQ(m.precision, 1.0);
  EXPECT_EQ(m.recall, 1.0);
  EXPECT_EQ(m.fpr, 0.0);
  EXPECT_EQ(m.auc, 1.0);
  const Metrics all = compute_metrics(s, y, 0.0);
  EXPECT_EQ(all.recall, 1.0);
  EXPECT_EQ(all.fpr, 1.0);
}

TEST(Metrics, TiedScoresGiveHalfAuc) {
  const std::vector<double> s{0.5, 0.5, 0.5, 0.5};
  const std::vector<int> y{1, 0, 1, 0};
  EXPECT_EQ(roc_auc(s, y), 0.5);
}

TEST(Metrics, SingleClassHasNoAuc) {
  const std::vector<double> s{0.1, 0.7};
  const std::vector<int> y{1, 1};
  EXPECT_FALSE(roc_auc(s, y));
  const Metrics m = compute_metrics(s, y, 0.5);
  EXPECT_FALSE(m.fpr);
  EXPECT_EQ(m.recall, 0.5);
}

TEST(Metrics, AucInvariantUnderMonotoneTransformProperty) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.between(2, 40));
    std::vector<double> s(n), t(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.below(10)) / 10.0;
      t[i] = std::exp(3 * s[i]) - 7;
      y[i] = static_cast<int>(rng.below(2));
    }
    EXPECT_EQ(roc_auc(s, y), roc_auc(t, y));
  }
}

TEST(Decide, InclusiveThreshold) {
  const std::vector<double> s{0.212, 0.2119999, 0.3};
  EXPECT_EQ(decide(s, 0.212), (std::vector<int>{1, 0, 1}));
}

TEST(F1, EmptyPositiveClassIsPerfect) {
  EXPECT_EQ(f1_score({0, 0, 5, 0}), 1.0);
  EXPECT_EQ(f1_score({1, 1, 0, 1}), 0.5);
}

TEST(CostFunctions, ZeroErrorsZeroCost) {
  const std::vector<int> y{1, 0, 1, 0};
  EXPECT_EQ(make_cost_function("f1_cost")(kNoContext, y, y), 0.0);
  EXPECT_EQ(make_cost_function("weighted_cost", {{"fp_weight", 3}, {"fn_weight", 2}})(kNoContext, y, y), 0.0);
}

TEST(CostFunctions, WeightedArithmetic) {
  std::vector<int> d(10, 0), y(10, 0);
  d[0] = 1;  // one false positive
  y[1] = 1;  // one false negative
  EXPECT_DOUBLE_EQ(make_cost_function("weighted_cost", {{"fp_weight", 1}, {"fn_weight", 1}})(kNoContext, d, y), 0.2);
}

EntitySet amounts(const std::vector<double>& values) {
  MetadataDocument md;
  md.entityset_name = "fraud";
  EntitySpec e;
  e.name = "transactions";
  e.index = "id";
  e.variables = {{"id", SemanticType::Index, Json::object()}, {"amount", SemanticType::Numeric, Json::object()}};
  md.entities.push_back(e);
  RowBatch b{"transactions", {"id", "amount"}, {}};
  for (std::size_t i = 0; i < values.size(); ++i) b.rows.push_back({"t" + std::to_string(i), format_double(values[i])});
  return build_entityset(md, {b});
}

TEST(CostFunctions, ValueWeightedSumsMissedAmounts) {
  const EntitySet es = amounts({10, 10000, 9000});
  CostContext ctx{&es, "transactions", {"t0", "t1", "t2"}, std::vector<Timestamp>(3)};
  const auto g = make_cost_function("value_weighted_cost", {{"column", "amount"}});
  const std::vector<int> y{1, 1, 1};
  const double two_small_misses = g(ctx, std::vector<int>{0, 0, 1}, y);
  const double one_big_miss = g(ctx, std::vector<int>{1, 1, 0}, y);
  EXPECT_EQ(two_small_misses, 10010.0);
  EXPECT_EQ(one_big_miss, 9000.0);
  EXPECT_GT(two_small_misses, one_big_miss);
  CostContext bad = ctx;
  EXPECT_THROW(make_cost_function("value_weighted_cost", {{"column", "nope"}})(bad, y, y), ConfigError);
  EXPECT_THROW(make_cost_function("accuracy"), ConfigError);
}

TEST(ThresholdGrid, ExactStepsNoDrift) {
  const auto g = threshold_grid(0.001);
  ASSERT_EQ(g.size(), 1001u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_EQ(g[201], 0.201);
}

TEST(TuneThreshold, WorkedExample) {
  const std::vector<double> s{0.9, 0.4, 0.2};
  const std::vector<int> y{1, 1, 0};
  const ThresholdChoice c = tune_threshold(s, y, make_cost_function("f1_cost"), kNoContext, 0.001);
  EXPECT_EQ(c.threshold, 0.201);
  EXPECT_EQ(c.cost, 0.0);
}

TEST(TuneThreshold, GridMinimumProperty) {
  Rng rng(23);
  const auto g = make_cost_function("weighted_cost", {{"fp_weight", 1}, {"fn_weight", 4}});
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.between(1, 30));
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = rng.unit();
      y[i] = static_cast<int>(rng.below(2));
    }
    const ThresholdChoice c = tune_threshold(s, y, g, kNoContext, 0.01);
    for (double t : threshold_grid(0.01)) {
      const double cost = g(kNoContext, decide(s, t), y);
      EXPECT_LE(c.cost, cost);
      if (t < c.threshold) {
        EXPECT_GT(cost, c.cost);
      }
    }
  }
}

}  // namespace
}  // namespace chronoforge
