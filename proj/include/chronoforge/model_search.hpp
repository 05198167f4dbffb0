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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chronoforge/error.hpp"
#include "chronoforge/feature_matrix.hpp"
#include "chronoforge/learners.hpp"
#include "chronoforge/method_spec.hpp"
#include "chronoforge/metrics.hpp"
#include "chronoforge/preprocess.hpp"
#include "chronoforge/time.hpp"

namespace chronoforge {

// Number of configurations, or a wall-clock allowance checked between
// configurations. `text` keeps the configured form ("5", "2 hours").
struct Budget {
  std::optional<std::size_t> count;
  std::optional<Duration> duration;
  std::string text;

  static Budget parse(const Json& j);
  Json to_json() const;
};

enum class AutomlMethod { Random, Grid };

struct MethodEntry {
  std::string method;                 // as configured
  std::filesystem::path spec_path;    // hyperparameter_options
  MethodSpec spec;
};

struct SearchParams {
  std::vector<MethodEntry> methods;
  Budget budget;
  AutomlMethod automl = AutomlMethod::Random;
  std::uint64_t seed = 0;
  int k_repeats = 3;
  double threshold_grid_step = 0.001;
  unsigned jobs = 1;

  void validate() const;
};

struct DataSplit {
  std::string id;
  Timestamp start;
  Timestamp end;
  std::string start_text;
  std::string end_text;
  Json label_search_parameters = Json::object();
};

// train < threshold-tuning < test, non-overlapping.
struct DataSplits {
  std::vector<DataSplit> splits;

  const DataSplit& at(const std::string& id) const;
  void validate() const;
  static DataSplits from_json(const Json& j);
};

// One split's matrix plus 0/1 labels and the cost-function context.
struct SplitData {
  FeatureMatrix matrix;
  std::vector<int> labels;
  CostContext context;

  static SplitData from(FeatureMatrix m, const EntitySet* es, const std::string& target_entity);
};

struct SeedResult {
  int random_seed = 0;
  double threshold = 0.0;
  double cost = 0.0;
  Metrics metrics;
};

struct LeaderboardEntry {
  std::size_t config = 0;        // sampling order
  std::size_t method_index = 0;  // position in SearchParams::methods
  std::string method;
  std::string method_key;
  Json hyperparameters = Json::object();
  bool failed = false;
  std::string error;
  std::vector<SeedResult> seeds;
  double mean_cost = 0.0;
  double std_cost = 0.0;
};

class ModelArtifact {
 public:
  std::string method;
  std::string method_key;
  Json hyperparameters = Json::object();
  std::shared_ptr<const Learner> learner;
  Preprocessor preprocessor;
  std::vector<std::string> features;
  std::string feature_list_hash;  // of the feature list the model was trained on
  double threshold = 0.0;
  std::vector<SeedResult> results;

  std::vector<double> score(const FeatureMatrix& m) const;

  Json to_json() const;
  static ModelArtifact from_json(const Json& j);
};

struct SearchResult {
  ModelArtifact model;
  std::vector<LeaderboardEntry> leaderboard;  // best first, failures last
  std::vector<double> test_scores;            // winner, seed 0
  double elapsed_seconds = 0.0;
};

// No configuration finished inside the budget; carries what was recorded.
class SearchExhaustedError : public Error {
 public:
  SearchExhaustedError(const std::string& what, std::vector<LeaderboardEntry> partial)
      : Error(what), partial_(std::move(partial)) {}
  const std::vector<LeaderboardEntry>& partial_leaderboard() const noexcept { return partial_; }

 private:
  std::vector<LeaderboardEntry> partial_;
};

// Configurations in sampling order as (method index, hyperparameters). For
// count budgets this is the whole list; duration budgets use it as a prefix.
std::vector<std::pair<std::size_t, Json>> sample_configurations(const SearchParams& params, std::size_t limit);

SearchResult search_model(const CostFunction& g, const SplitData& train, const SplitData& tune,
                          const SplitData& test, const SearchParams& params);

std::string leaderboard_csv(const std::vector<LeaderboardEntry>& board);

// Exactly {random_seed, threshold, precision, recall, fpr, auc}, in that order.
OrderedJson seed_result_json(const SeedResult& r);

}  // namespace chronoforge
