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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chronoforge/entityset.hpp"
#include "chronoforge/feature_definition.hpp"
#include "chronoforge/feature_matrix.hpp"
#include "chronoforge/json_format.hpp"
#include "chronoforge/prediction_engineering.hpp"

namespace chronoforge {

struct DfsParams {
  std::string target_entity;
  std::optional<Duration> training_window;  // nullopt: all history
  std::vector<std::string> aggregation_primitives;
  std::vector<std::string> transform_primitives;
  std::map<std::string, std::vector<std::string>> ignore_variables;
  int max_depth = 2;

  Json to_json() const;
  static DfsParams from_json(const Json& j);
};

struct FeatureList {
  std::string target_entity;
  std::vector<FeatureDefinition> features;
  DfsParams params;

  std::vector<std::string> names() const;
};

// Enumerates every feature reachable within max_depth, sorted by canonical
// name. Depth counts transforms plus one per relationship hop of each
// aggregation, so MEAN(orders_products.Price) from customers has depth 2.
FeatureList create_features(const EntitySet& es, const DfsParams& params);

// Semantic type of the values a feature produces.
SemanticType feature_output_type(const EntitySet& es, const FeatureDefinition& f);

// Checks that every entity, variable and path a feature needs exists in es
// with compatible types. Throws DataError("SchemaDrift", ...) otherwise.
void check_feature(const EntitySet& es, const std::string& target_entity, const FeatureDefinition& f);

// (entity, variable) pairs read by a feature, including join keys.
std::vector<std::pair<std::string, std::string>> fields_used(const EntitySet& es, const FeatureDefinition& f);

struct CutoffRow {
  std::string instance_id;
  Timestamp cutoff;
};

// Each cell is evaluated on data strictly before the row's cutoff (and not
// before cutoff - training_window). A row is available when its effective
// time has passed and all of its parent rows are available. Rows whose own
// target instance is not yet available come back entirely null. `jobs`
// threads do not change the result.
FeatureMatrix calculate_feature_matrix(const EntitySet& es, const std::vector<CutoffRow>& rows,
                                       const FeatureList& features, unsigned jobs = 1);
FeatureMatrix calculate_feature_matrix(const EntitySet& es, const LabelTimes& label_times,
                                       const FeatureList& features, unsigned jobs = 1);
FeatureMatrix calculate_feature_matrix(const EntitySet& es, const std::vector<LabelTime>& label_times,
                                       const FeatureList& features, unsigned jobs = 1);

// Keeps the n features with the highest random-forest impurity importance
// (fixed seed, imputed matrix); ties go to the lexicographically smaller
// name. The result preserves the input order.
FeatureList select_features(const FeatureList& features, const FeatureMatrix& matrix, std::span<const int> labels,
                            std::size_t n_features, std::uint64_t seed = 0);

std::string serialize_feature_list(const FeatureList& fl);
FeatureList parse_feature_list(std::string_view text);
std::string feature_list_hash(const FeatureList& fl);

}  // namespace chronoforge
