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

#include "chronoforge/model_search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "chronoforge/csv.hpp"
#include "chronoforge/rng.hpp"

namespace chronoforge {

// ---------------------------------------------------------------- config types

Budget Budget::parse(const Json& j) {
  Budget b;
  if (j.is_number_integer() || j.is_number_unsigned()) {
    if (j.get<long long>() <= 0) throw ConfigError("budget must be positive");
    b.count = j.get<std::size_t>();
    b.text = std::to_string(*b.count);
    return b;
  }
  if (!j.is_string()) throw ConfigError("budget must be a configuration count or a duration such as \"2 hours\"");
  b.text = j.get<std::string>();
  if (!b.text.empty() && std::all_of(b.text.begin(), b.text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    b.count = std::stoull(b.text);
    if (*b.count == 0) throw ConfigError("budget must be positive");
    return b;
  }
  b.duration = Duration::parse(b.text);
  if (b.duration->seconds() <= 0) throw ConfigError("budget must be positive");
  return b;
}

Json Budget::to_json() const {
  if (count) return *count;
  return text;
}

void SearchParams::validate() const {
  if (methods.empty()) throw ConfigError("modeling.methods is empty");
  if (!budget.count && !budget.duration) throw ConfigError("budget is not set");
  if (k_repeats < 1) throw ConfigError("k_repeats must be at least 1");
  threshold_grid(threshold_grid_step);
}

const DataSplit& DataSplits::at(const std::string& id) const {
  for (const auto& s : splits)
    if (s.id == id) return s;
  throw ConfigError("data split '" + id + "' is not configured");
}

void DataSplits::validate() const {
  static const char* order[] = {"train", "threshold-tuning", "test"};
  if (splits.size() != 3) throw ConfigError("data_splits must hold exactly train, threshold-tuning and test");
  for (int i = 0; i < 3; ++i) {
    const DataSplit& s = at(order[i]);
    if (!(s.start < s.end)) throw ConfigError("data split '" + s.id + "' has start_time >= end_time");
    if (i > 0 && at(order[i - 1]).end > s.start)
      throw ConfigError("data split '" + s.id + "' overlaps or precedes '" + order[i - 1] + "'");
  }
}

DataSplits DataSplits::from_json(const Json& j) {
  if (!j.is_array()) throw ConfigError("data_splits must be an array");
  DataSplits out;
  for (const auto& e : j) {
    try {
      DataSplit s;
      s.id = e.at("id").get<std::string>();
      s.start_text = e.at("start_time").get<std::string>();
      s.end_text = e.at("end_time").get<std::string>();
      s.start = parse_timestamp(s.start_text);
      s.end = parse_timestamp(s.end_text);
      if (e.contains("label_search_parameters")) s.label_search_parameters = e.at("label_search_parameters");
      out.splits.push_back(std::move(s));
    } catch (const Json::exception& ex) {
      throw ConfigError(std::string("invalid data split: ") + ex.what());
    }
  }
  out.validate();
  return out;
}

SplitData SplitData::from(FeatureMatrix m, const EntitySet* es, const std::string& target_entity) {
  SplitData d;
  if (!m.labels) throw ConfigError("feature matrix has no label column");
  d.labels = binary_labels(*m.labels);
  d.context.es = es;
  d.context.target_entity = target_entity;
  d.context.instance_ids = m.instance_ids;
  d.context.cutoffs = m.cutoffs;
  d.matrix = std::move(m);
  return d;
}

// ---------------------------------------------------------------- artifact

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> number_or_null(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

void require_columns(const std::vector<std::string>& expected, const FeatureMatrix& m) {
  for (std::size_t i = 0; i < std::max(expected.size(), m.columns.size()); ++i) {
    if (i < expected.size() && i < m.columns.size() && expected[i] == m.columns[i]) continue;
    const std::string& name = i < m.columns.size() ? m.columns[i] : expected[i];
    throw SchemaError("/columns/" + std::to_string(i),
                      "feature matrix column '" + name + "' does not match the model's feature list");
  }
}

}  // namespace

OrderedJson seed_result_json(const SeedResult& r) {
  OrderedJson j;
  j["random_seed"] = r.random_seed;
  j["threshold"] = r.threshold;
  auto put = [&](const char* key, const std::optional<double>& v) {
    j[key] = v ? OrderedJson(*v) : OrderedJson(nullptr);
  };
  put("precision", r.metrics.precision);
  put("recall", r.metrics.recall);
  put("fpr", r.metrics.fpr);
  put("auc", r.metrics.auc);
  return j;
}

std::vector<double> ModelArtifact::score(const FeatureMatrix& m) const {
  require_columns(features, m);
  if (m.row_count() == 0) return {};
  return predict_scores(*learner, preprocessor.transform(m));
}

Json ModelArtifact::to_json() const {
  Json j;
  j["method"] = method;
  j["method_key"] = method_key;
  j["hyperparameters"] = hyperparameters;
  j["features"] = features;
  j["feature_list_hash"] = feature_list_hash;
  j["preprocessor"] = preprocessor.to_json();
  j["learner"] = learner->to_json();
  j["threshold"] = threshold;
  j["results"] = Json::array();
  j["test_costs"] = Json::array();
  for (const auto& r : results) {
    Json rj;
    rj["random_seed"] = r.random_seed;
    rj["threshold"] = r.threshold;
    rj["precision"] = optional_number(r.metrics.precision);
    rj["recall"] = optional_number(r.metrics.recall);
    rj["fpr"] = optional_number(r.metrics.fpr);
    rj["auc"] = optional_number(r.metrics.auc);
    j["results"].push_back(rj);
    j["test_costs"].push_back(r.cost);
  }
  return j;
}

ModelArtifact ModelArtifact::from_json(const Json& j) {
  ModelArtifact a;
  try {
    a.method = j.at("method").get<std::string>();
    a.method_key = j.at("method_key").get<std::string>();
    a.hyperparameters = j.at("hyperparameters");
    a.features = j.at("features").get<std::vector<std::string>>();
    a.feature_list_hash = j.value("feature_list_hash", "");
    a.preprocessor = Preprocessor::from_json(j.at("preprocessor"));
    a.learner = learner_from_json(j.at("learner"));
    a.threshold = j.at("threshold").get<double>();
    const Json& results = j.at("results");
    const Json costs = j.value("test_costs", Json::array());
    for (std::size_t i = 0; i < results.size(); ++i) {
      SeedResult r;
      r.random_seed = results[i].at("random_seed").get<int>();
      r.threshold = results[i].at("threshold").get<double>();
      r.metrics.precision = number_or_null(results[i].at("precision"));
      r.metrics.recall = number_or_null(results[i].at("recall"));
      r.metrics.fpr = number_or_null(results[i].at("fpr"));
      r.metrics.auc = number_or_null(results[i].at("auc"));
      if (i < costs.size()) r.cost = costs[i].get<double>();
      a.results.push_back(r);
    }
  } catch (const Json::exception& e) {
    throw SchemaError("", std::string("malformed model artifact: ") + e.what());
  }
  if (!(a.threshold >= 0.0 && a.threshold <= 1.0)) throw SchemaError("/threshold", "threshold outside [0, 1]");
  return a;
}

// ---------------------------------------------------------------- search

std::vector<std::pair<std::size_t, Json>> sample_configurations(const SearchParams& params, std::size_t limit) {
  std::vector<std::pair<std::size_t, Json>> out;
  if (params.automl == AutomlMethod::Random) {
    Rng rng(params.seed);
    for (std::size_t i = 0; i < limit; ++i) {
      const std::size_t m = i % params.methods.size();
      out.emplace_back(m, sample_random(params.methods[m].spec, rng));
    }
    return out;
  }
  for (std::size_t m = 0; m < params.methods.size(); ++m)
    for (auto& h : grid_configurations(params.methods[m].spec)) out.emplace_back(m, std::move(h));
  if (out.size() <= limit) return out;
  std::vector<std::size_t> idx(out.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Rng rng(params.seed);
  rng.shuffle(idx);
  idx.resize(limit);
  std::sort(idx.begin(), idx.end());
  std::vector<std::pair<std::size_t, Json>> subset;
  for (std::size_t i : idx) subset.push_back(std::move(out[i]));
  return subset;
}

namespace {

// Random search under a time budget draws from this many candidates at most.
constexpr std::size_t kDurationCandidateCap = 10000;

bool better(const LeaderboardEntry& a, const LeaderboardEntry& b) {
  if (a.failed != b.failed) return !a.failed;
  if (a.failed) return a.config < b.config;
  if (a.mean_cost != b.mean_cost) return a.mean_cost < b.mean_cost;
  if (a.std_cost != b.std_cost) return a.std_cost < b.std_cost;
  if (a.method_index != b.method_index) return a.method_index < b.method_index;
  const std::string ha = a.hyperparameters.dump(), hb = b.hyperparameters.dump();
  if (ha != hb) return ha < hb;
  return a.config < b.config;
}

}  // namespace

SearchResult search_model(const CostFunction& g, const SplitData& train, const SplitData& tune,
                          const SplitData& test, const SearchParams& params) {
  params.validate();
  const auto started = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };

  if (std::find(train.labels.begin(), train.labels.end(), 0) == train.labels.end() ||
      std::find(train.labels.begin(), train.labels.end(), 1) == train.labels.end())
    throw DegenerateLabelsError("training split labels hold a single class; widen the train split or change the "
                                "labeling function");

  const Preprocessor prep = Preprocessor::fit(train.matrix);
  const Matrix xtrain = prep.transform(train.matrix);
  const Matrix xtune = prep.transform(tune.matrix);
  const Matrix xtest = prep.transform(test.matrix);

  const std::size_t limit = params.budget.count ? *params.budget.count : kDurationCandidateCap;
  const auto configs = sample_configurations(params, limit);

  std::vector<LeaderboardEntry> entries(configs.size());
  std::vector<char> ran(configs.size(), 0);

  auto evaluate = [&](std::size_t i) {
    LeaderboardEntry e;
    e.config = i;
    e.method_index = configs[i].first;
    const MethodEntry& m = params.methods[e.method_index];
    e.method = m.method;
    e.method_key = m.spec.method_key;
    e.hyperparameters = configs[i].second;
    try {
      if (!is_registered_method(e.method_key))
        throw UnknownMethodError("no learner registered for method '" + m.spec.method_class + "'");
      check_hyperparameters(m.spec, e.hyperparameters);
      for (int s = 0; s < params.k_repeats; ++s) {
        auto learner = fit_learner(e.method_key, e.hyperparameters, xtrain, train.labels, static_cast<std::uint64_t>(s));
        const auto tune_scores = predict_scores(*learner, xtune);
        const ThresholdChoice choice =
            tune_threshold(tune_scores, tune.labels, g, tune.context, params.threshold_grid_step);
        const auto test_scores = predict_scores(*learner, xtest);
        SeedResult r;
        r.random_seed = s;
        r.threshold = choice.threshold;
        r.cost = g(test.context, decide(test_scores, choice.threshold), test.labels);
        r.metrics = compute_metrics(test_scores, test.labels, choice.threshold);
        e.seeds.push_back(r);
      }
      double mean = 0.0;
      for (const auto& r : e.seeds) mean += r.cost;
      mean /= static_cast<double>(e.seeds.size());
      double var = 0.0;
      for (const auto& r : e.seeds) var += (r.cost - mean) * (r.cost - mean);
      e.mean_cost = mean;
      e.std_cost = std::sqrt(var / static_cast<double>(e.seeds.size()));
    } catch (const std::exception& ex) {
      e.failed = true;
      e.error = ex.what();
      e.seeds.clear();
    }
    return e;
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(params.jobs, static_cast<unsigned>(configs.size())));
  auto worker = [&](unsigned w) {
    for (std::size_t i = w; i < configs.size(); i += jobs) {
      if (params.budget.duration && elapsed() >= static_cast<double>(params.budget.duration->seconds())) return;
      entries[i] = evaluate(i);
      ran[i] = 1;
    }
  };
  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < jobs; ++w) threads.emplace_back(worker, w);
    for (auto& t : threads) t.join();
  }

  SearchResult result;
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (ran[i]) result.leaderboard.push_back(std::move(entries[i]));
  std::sort(result.leaderboard.begin(), result.leaderboard.end(), better);
  if (result.leaderboard.empty() || result.leaderboard.front().failed)
    throw SearchExhaustedError("model search finished no configuration within the budget", result.leaderboard);

  const LeaderboardEntry& best = result.leaderboard.front();
  ModelArtifact& a = result.model;
  a.method = best.method;
  a.method_key = best.method_key;
  a.hyperparameters = best.hyperparameters;
  a.learner = fit_learner(best.method_key, best.hyperparameters, xtrain, train.labels, 0);
  a.preprocessor = prep;
  a.features = train.matrix.columns;
  a.threshold = best.seeds.front().threshold;
  a.results = best.seeds;
  result.test_scores = predict_scores(*a.learner, xtest);
  result.elapsed_seconds = elapsed();
  return result;
}

std::string leaderboard_csv(const std::vector<LeaderboardEntry>& board) {
  csv::Table t;
  t.header = {"rank", "config", "method", "method_key", "hyperparameters", "status", "mean_cost", "std_cost",
              "thresholds", "error"};
  std::size_t rank = 0;
  for (const auto& e : board) {
    std::string thresholds;
    for (const auto& s : e.seeds) thresholds += (thresholds.empty() ? "" : ";") + format_double(s.threshold);
    t.rows.push_back({e.failed ? "" : std::to_string(++rank), std::to_string(e.config), e.method, e.method_key,
                      e.hyperparameters.dump(), e.failed ? "failed" : "ok",
                      e.failed ? "" : format_double(e.mean_cost), e.failed ? "" : format_double(e.std_cost),
                      thresholds, e.error});
  }
  return csv::write(t);
}

}  // namespace chronoforge
