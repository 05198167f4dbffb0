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

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chronoforge/entityset.hpp"
#include "chronoforge/json_format.hpp"

namespace chronoforge {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
};

// Positive iff score >= threshold.
std::vector<int> decide(std::span<const double> scores, double threshold);
Confusion confusion(std::span<const int> decisions, std::span<const int> labels);

// 1 when there are no positives and none were predicted.
double f1_score(const Confusion& c);

// Trapezoidal ROC area; tied scores move TPR and FPR together. Null when
// the labels hold a single class.
std::optional<double> roc_auc(std::span<const double> scores, std::span<const int> labels);

struct Metrics {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> fpr;
  std::optional<double> auc;
};

Metrics compute_metrics(std::span<const double> scores, std::span<const int> labels, double threshold);

// What a cost function may consult besides decisions and labels: the
// EntitySet and the instance/cutoff of every row.
struct CostContext {
  const EntitySet* es = nullptr;
  std::string target_entity;
  std::vector<std::string> instance_ids;
  std::vector<Timestamp> cutoffs;
};

struct CostFunction {
  std::string name;
  Json parameters = Json::object();
  // Lower is better.
  std::function<double(const CostContext&, std::span<const int> decisions, std::span<const int> labels)> fn;

  double operator()(const CostContext& ctx, std::span<const int> decisions, std::span<const int> labels) const {
    return fn(ctx, decisions, labels);
  }
};

// Built-ins: f1_cost; weighted_cost {fp_weight, fn_weight};
// value_weighted_cost {column} (a numeric column of the target entity).
CostFunction make_cost_function(const std::string& name, const Json& parameters = Json::object());
std::vector<std::string> cost_function_names();

// Grid {0, step, 2 step, ..., 1}, computed as i / n to avoid drift.
std::vector<double> threshold_grid(double step);

struct ThresholdChoice {
  double threshold = 0.0;
  double cost = 0.0;
};

// Lowest-cost grid threshold; ties go to the lowest threshold.
ThresholdChoice tune_threshold(std::span<const double> scores, std::span<const int> labels, const CostFunction& g,
                               const CostContext& ctx, double step = 0.001);

}  // namespace chronoforge
