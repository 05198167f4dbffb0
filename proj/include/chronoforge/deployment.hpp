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
#include "chronoforge/features.hpp"
#include "chronoforge/metadata.hpp"
#include "chronoforge/metrics.hpp"
#include "chronoforge/model_search.hpp"
#include "chronoforge/prediction_engineering.hpp"
#include "chronoforge/provenance.hpp"

namespace chronoforge {

struct DeploymentBundle {
  ModelArtifact model;
  FeatureList feature_list;
  MetadataDocument metadata;
  ProvenanceDocument provenance;
  double threshold = 0.0;

  // Reads model_provenance.json in `dir` and the files it points to
  // (relative paths resolve against `dir`), then verify().
  static DeploymentBundle load(const std::filesystem::path& dir);
  // Threshold agrees with the provenance document and the feature list is the
  // one the model was trained on. Throws SchemaError.
  void verify() const;
};

struct Prediction {
  std::string instance_id;
  Timestamp cutoff_time;
  double score = 0.0;
  bool decision = false;
};

// Columns must equal the feature list, names and order.
std::vector<Prediction> generate_predictions(const DeploymentBundle& bundle, const FeatureMatrix& matrix);

std::string predictions_csv(const std::vector<Prediction>& predictions);

struct IntegrationResult {
  bool passed = false;
  std::string failed_step;  // add_new_data, calculate_feature_matrix or generate_predictions
  std::string error;
  std::uint64_t entityset_version = 0;
  Timestamp current_time;
  std::vector<Prediction> predictions;

  OrderedJson report() const;
};

// add_new_data, then features for every requested instance (all instances of
// the target entity when empty) at one shared cutoff, then predictions.
IntegrationResult integration_test(const DeploymentBundle& bundle, const EntitySet& es_t,
                                   const std::filesystem::path& new_data_path, const MetadataDocument& metadata,
                                   Timestamp current_time, const std::vector<std::string>& instances = {},
                                   unsigned jobs = 1);

struct ValidationReport {
  std::size_t requested = 0;
  std::size_t unlabelable = 0;
  std::vector<Prediction> predictions;  // labelable rows only
  std::vector<int> labels;
  Metrics metrics;
  std::optional<double> cost;
  std::string cost_function;
  std::vector<SeedResult> training_results;

  OrderedJson to_json() const;
};

// Each (instance, timestamp) is a cutoff: features at the timestamp, the
// true label over [timestamp + lead, + prediction_window). Rows whose window
// ends after the latest data, or that f leaves unlabeled, are counted as
// unlabelable and left out of the metrics.
ValidationReport validate_in_production(const DeploymentBundle& bundle, const EntitySet& es_tplus,
                                        const LabelingFunction& f, const LabelSearchParams& label_params,
                                        const std::vector<CutoffRow>& timestamps, const CostFunction& g,
                                        unsigned jobs = 1);

}  // namespace chronoforge
