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

#include <string>
#include <vector>

#include "chronoforge/feature_matrix.hpp"
#include "chronoforge/json_format.hpp"
#include "chronoforge/learners.hpp"

namespace chronoforge {

struct ColumnPreparation {
  std::string name;
  SemanticType type = SemanticType::Numeric;
  double fill = 0.0;                     // median, mode, or mode code
  std::vector<std::string> vocabulary;  // categorical only, sorted

  friend bool operator==(const ColumnPreparation&, const ColumnPreparation&) = default;
};

// Imputation and encoding learned from the training split only. Numeric
// nulls take the training median, booleans the training mode (as 0/1),
// categoricals are label-encoded against the sorted training vocabulary with
// unseen values mapped to vocabulary.size() (UNKNOWN).
class Preprocessor {
 public:
  static Preprocessor fit(const FeatureMatrix& train);

  Matrix transform(const FeatureMatrix& m) const;
  const std::vector<ColumnPreparation>& columns() const noexcept { return columns_; }

  Json to_json() const;
  static Preprocessor from_json(const Json& j);

  friend bool operator==(const Preprocessor&, const Preprocessor&) = default;

 private:
  std::vector<ColumnPreparation> columns_;
};

}  // namespace chronoforge
