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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chronoforge/entityset.hpp"
#include "chronoforge/feature_matrix.hpp"
#include "chronoforge/features.hpp"
#include "chronoforge/json_format.hpp"
#include "chronoforge/model_search.hpp"
#include "chronoforge/prediction_engineering.hpp"

namespace chronoforge {

using FieldMap = std::map<std::string, std::vector<std::string>>;  // entity -> variables

struct FeatureRange {
  double min = 0.0;
  double max = 0.0;
};

// Everything a finished run knows, gathered for model_provenance.json. Path
// fields are written exactly as given.
struct ProvenanceInputs {
  std::string metadata_path;

  std::string labeling_function;  // path of the labeling-function description
  std::string target_entity;
  std::string prediction_window;
  std::string min_training_data;
  std::string lead;

  DfsParams dfs;
  std::optional<std::size_t> n_features;  // feature selection, when run

  std::vector<std::pair<std::string, std::string>> methods;  // (method, hyperparameter_options)
  Json budget;
  std::string automl_method;
  std::string cost_function;
  std::optional<double> elapsed_seconds;

  std::vector<DataSplit> splits;
  std::map<std::string, std::string> validation_methods;  // split id -> path

  std::vector<SeedResult> test_results;

  std::string deployment_executable;
  std::string feature_list_path;
  std::string model_path;
  double threshold = 0.0;

  FieldMap data_fields_used;
  const FeatureMatrix* training_matrix = nullptr;
};

class ProvenanceDocument {
 public:
  ProvenanceDocument() = default;
  explicit ProvenanceDocument(OrderedJson j) : json_(std::move(j)) {}

  const OrderedJson& json() const noexcept { return json_; }

  double threshold() const;
  std::string feature_list_path() const;
  std::string model_path() const;
  std::string metadata_path() const;
  FieldMap data_fields_used() const;
  std::map<std::string, FeatureRange> expected_ranges() const;

 private:
  OrderedJson json_;
};

// Numeric features only; bounds rounded outwards to six significant digits
// so every training value stays inside its own range once emitted.
std::map<std::string, FeatureRange> expected_feature_ranges(const FeatureMatrix& training);

// Feature inputs, join keys along their paths and the labeling function's fields.
FieldMap collect_data_fields(const EntitySet& es, const FeatureList& features, const LabelingFunction& f);

ProvenanceDocument assemble_provenance(const ProvenanceInputs& in);

struct SchemaIssue {
  std::string pointer;
  std::string message;
};

std::vector<SchemaIssue> provenance_issues(const OrderedJson& j);
// Parses and checks; throws ParseError or the first SchemaError.
ProvenanceDocument validate_provenance(std::string_view text);
std::string emit_provenance(const ProvenanceDocument& doc);

struct DriftEntry {
  enum class Kind { OutOfRange, MissingField };
  Kind kind = Kind::OutOfRange;
  std::size_t row = 0;  // 0-based matrix row (OutOfRange)
  std::string instance_id;
  std::string feature;
  double value = 0.0;
  FeatureRange range;
  std::string entity;  // MissingField
  std::string variable;

  OrderedJson to_json() const;
};

// Advisory only.
struct DriftReport {
  std::vector<DriftEntry> entries;

  bool empty() const noexcept { return entries.empty(); }
  std::size_t count(DriftEntry::Kind k) const;
  std::string jsonl() const;
};

DriftReport check_drift(const ProvenanceDocument& doc, const FeatureMatrix& matrix, const EntitySet& es);

}  // namespace chronoforge
