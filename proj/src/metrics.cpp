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

#include "chronoforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chronoforge/error.hpp"

namespace chronoforge {

std::vector<int> decide(std::span<const double> scores, double threshold) {
  std::vector<int> d(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) d[i] = scores[i] >= threshold ? 1 : 0;
  return d;
}

Confusion confusion(std::span<const int> decisions, std::span<const int> labels) {
  if (decisions.size() != labels.size()) throw ConfigError("decisions and labels differ in length");
  Confusion c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) {
      if (decisions[i]) ++c.tp;
      else ++c.fn;
    } else {
      if (decisions[i]) ++c.fp;
      else ++c.tn;
    }
  }
  return c;
}

double f1_score(const Confusion& c) {
  const std::size_t denom = 2 * c.tp + c.fp + c.fn;
  if (denom == 0) return 1.0;
  return 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

std::optional<double> roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ConfigError("scores and labels differ in length");
  const std::size_t pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) return std::nullopt;
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double area = 0.0;
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::size_t dtp = 0, dfp = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]]) ++dtp;
      else ++dfp;
      ++j;
    }
    // Trapezoid in count units; normalized at the end.
    area += static_cast<double>(dfp) * (static_cast<double>(tp) + static_cast<double>(dtp) / 2.0);
    tp += dtp;
    fp += dfp;
    i = j;
  }
  return area / (static_cast<double>(pos) * static_cast<double>(neg));
}

Metrics compute_metrics(std::span<const double> scores, std::span<const int> labels, double threshold) {
  const auto d = decide(scores, threshold);
  const Confusion c = confusion(d, labels);
  auto ratio = [](std::size_t a, std::size_t b) -> std::optional<double> {
    if (b == 0) return std::nullopt;
    return static_cast<double>(a) / static_cast<double>(b);
  };
  Metrics m;
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  m.fpr = ratio(c.fp, c.fp + c.tn);
  m.auc = roc_auc(scores, labels);
  return m;
}

namespace {

double param_or(const Json& p, const char* key, double fallback) {
  if (!p.contains(key)) return fallback;
  if (!p.at(key).is_number()) throw ConfigError(std::string("cost parameter '") + key + "' must be a number");
  return p.at(key).get<double>();
}

}  // namespace

CostFunction make_cost_function(const std::string& name, const Json& parameters) {
  const Json p = parameters.is_null() ? Json::object() : parameters;
  if (!p.is_object()) throw ConfigError("cost function parameters must be a JSON object");
  CostFunction g{name, p, nullptr};
  if (name == "f1_cost") {
    g.fn = [](const CostContext&, std::span<const int> d, std::span<const int> y) {
      return 1.0 - f1_score(confusion(d, y));
    };
  } else if (name == "weighted_cost") {
    const double wfp = param_or(p, "fp_weight", 1.0);
    const double wfn = param_or(p, "fn_weight", 1.0);
    if (wfp < 0 || wfn < 0) throw ConfigError("weighted_cost weights must be non-negative");
    g.fn = [wfp, wfn](const CostContext&, std::span<const int> d, std::span<const int> y) {
      const Confusion c = confusion(d, y);
      if (c.total() == 0) return 0.0;
      return (wfp * static_cast<double>(c.fp) + wfn * static_cast<double>(c.fn)) / static_cast<double>(c.total());
    };
  } else if (name == "value_weighted_cost") {
    if (!p.contains("column") || !p.at("column").is_string())
      throw ConfigError("value_weighted_cost needs a 'column' parameter");
    const std::string column = p.at("column").get<std::string>();
    g.fn = [column](const CostContext& ctx, std::span<const int> d, std::span<const int> y) {
      if (ctx.es == nullptr) throw ConfigError("value_weighted_cost needs the EntitySet");
      const Entity& e = ctx.es->entity(ctx.target_entity);
      auto col = e.column_of(column);
      if (!col) throw ConfigError("amount column '" + column + "' not found on entity '" + ctx.target_entity + "'");
      const auto& values = e.column(*col);
      double total = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (!y[i] || d[i]) continue;
        auto row = e.find_row(ctx.instance_ids.at(i));
        if (!row) throw DataError("UnknownInstance", e.name(), e.index(), 0, ctx.instance_ids.at(i));
        if (const double* v = std::get_if<double>(&values[*row])) total += *v;
      }
      return total;
    };
  } else {
    throw ConfigError("unknown cost function '" + name + "'");
  }
  return g;
}

std::vector<std::string> cost_function_names() { return {"f1_cost", "value_weighted_cost", "weighted_cost"}; }

std::vector<double> threshold_grid(double step) {
  if (!(step > 0.0) || step > 1.0) throw ConfigError("threshold_grid_step must be in (0, 1]");
  const long long n = std::llround(1.0 / step);
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n) + 1);
  for (long long i = 0; i <= n; ++i) grid.push_back(static_cast<double>(i) / static_cast<double>(n));
  return grid;
}

ThresholdChoice tune_threshold(std::span<const double> scores, std::span<const int> labels, const CostFunction& g,
                               const CostContext& ctx, double step) {
  ThresholdChoice best;
  bool first = true;
  for (double theta : threshold_grid(step)) {
    const auto d = decide(scores, theta);
    const double cost = g(ctx, d, labels);
    if (!std::isfinite(cost)) throw Error("cost function '" + g.name + "' returned a non-finite value");
    if (first || cost < best.cost) {
      best = {theta, cost};
      first = false;
    }
  }
  return best;
}

}  // namespace chronoforge
