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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chronoforge/entityset.hpp"
#include "chronoforge/prediction_engineering.hpp"

namespace chronoforge {

// One row per (instance, cutoff), one column per feature, label optional.
// Cells are null, double, bool or a categorical string.
struct FeatureMatrix {
  std::vector<std::string> columns;
  std::vector<SemanticType> types;  // Numeric, Boolean or Categorical
  std::vector<std::vector<Value>> rows;
  std::vector<std::string> instance_ids;
  std::vector<Timestamp> cutoffs;
  std::optional<std::vector<Label>> labels;

  std::size_t row_count() const noexcept { return rows.size(); }
  std::size_t column_count() const noexcept { return columns.size(); }
  std::optional<std::size_t> column_of(std::string_view name) const;
  FeatureMatrix select_columns(const std::vector<std::string>& names) const;
};

// Boolean labels as 0/1; throws ConfigError for categorical labels.
std::vector<int> binary_labels(const std::vector<Label>& labels);

// Header is the feature names, plus "label" last when labels are present.
void write_feature_matrix_csv(const FeatureMatrix& m, const std::filesystem::path& path);
// Column types come from `types` (same order as the header); instance ids,
// cutoffs and labels from the aligned label-times rows.
FeatureMatrix read_feature_matrix_csv(const std::filesystem::path& path, const std::vector<SemanticType>& types,
                                      const std::vector<LabelTime>& label_times);

}  // namespace chronoforge
