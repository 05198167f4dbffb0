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

#include "chronoforge/deployment.hpp"

#include <fstream>
#include <sstream>

#include "chronoforge/csv.hpp"
#include "chronoforge/error.hpp"

namespace chronoforge {

namespace {

std::string read_text(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(std::string("missing artifact ") + what + ": '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path resolve(const std::filesystem::path& dir, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : dir / path;
}

}  // namespace

DeploymentBundle DeploymentBundle::load(const std::filesystem::path& dir) {
  DeploymentBundle b;
  b.provenance = validate_provenance(read_text(dir / "model_provenance.json", "model_provenance.json"));
  const Json model_json = Json::parse(read_text(resolve(dir, b.provenance.model_path()), "model"));
  b.model = ModelArtifact::from_json(model_json);
  b.feature_list = parse_feature_list(read_text(resolve(dir, b.provenance.feature_list_path()), "feature list"));
  b.metadata = parse_metadata(read_text(resolve(dir, b.provenance.metadata_path()), "metadata"));
  b.threshold = b.model.threshold;
  b.verify();
  return b;
}

void DeploymentBundle::verify() const {
  if (round_significant(threshold) != round_significant(provenance.threshold()))
    throw SchemaError("/deployment/deployment_parameters/threshold",
                      "model threshold " + format_double(threshold) + " disagrees with provenance");
  if (!model.feature_list_hash.empty() && model.feature_list_hash != feature_list_hash(feature_list))
    throw SchemaError("/deployment/deployment_parameters/feature_list_path",
                      "feature list hash differs from the one recorded at training");
  if (model.features != feature_list.names())
    throw SchemaError("/deployment/deployment_parameters/feature_list_path",
                      "feature list does not match the model's features");
}

std::vector<Prediction> generate_predictions(const DeploymentBundle& bundle, const FeatureMatrix& matrix) {
  const auto names = bundle.feature_list.names();
  for (std::size_t i = 0; i < std::max(names.size(), matrix.columns.size()); ++i)
    if (i >= names.size() || i >= matrix.columns.size() || names[i] != matrix.columns[i])
      throw SchemaError("/columns/" + std::to_string(i),
                        "column '" + (i < matrix.columns.size() ? matrix.columns[i] : names[i]) +
                            "' does not match the deployed feature list");
  const auto scores = bundle.model.score(matrix);
  std::vector<Prediction> out;
  for (std::size_t r = 0; r < scores.size(); ++r)
    out.push_back({matrix.instance_ids[r], matrix.cutoffs[r], scores[r], scores[r] >= bundle.threshold});
  return out;
}

std::string predictions_csv(const std::vector<Prediction>& predictions) {
  csv::Table t;
  t.header = {"instance_id", "cutoff_time", "score", "decision"};
  for (const auto& p : predictions)
    t.rows.push_back(
        {p.instance_id, format_timestamp(p.cutoff_time), format_double(p.score), p.decision ? "true" : "false"});
  return csv::write(t);
}

OrderedJson IntegrationResult::report() const {
  OrderedJson j;
  j["passed"] = passed;
  if (!passed) {
    j["failed_step"] = failed_step;
    j["error"] = error;
  }
  j["entityset_version"] = entityset_version;
  j["current_time"] = format_timestamp(current_time);
  j["predictions"] = predictions.size();
  return j;
}

IntegrationResult integration_test(const DeploymentBundle& bundle, const EntitySet& es_t,
                                   const std::filesystem::path& new_data_path, const MetadataDocument& metadata,
                                   Timestamp current_time, const std::vector<std::string>& instances, unsigned jobs) {
  IntegrationResult r;
  r.current_time = current_time;
  r.entityset_version = es_t.version();
  std::optional<EntitySet> es_tplus;
  FeatureMatrix matrix;
  const char* step = "add_new_data";
  try {
    es_tplus.emplace(add_new_data(es_t, new_data_path, metadata));
    r.entityset_version = es_tplus->version();

    step = "calculate_feature_matrix";
    std::vector<CutoffRow> rows;
    if (instances.empty()) {
      const Entity& target = es_tplus->entity(bundle.feature_list.target_entity);
      for (std::size_t i = 0; i < target.row_count(); ++i) rows.push_back({target.index_value(i), current_time});
    } else {
      for (const auto& id : instances) rows.push_back({id, current_time});
    }
    matrix = calculate_feature_matrix(*es_tplus, rows, bundle.feature_list, jobs);

    step = "generate_predictions";
    r.predictions = generate_predictions(bundle, matrix);
    r.passed = true;
  } catch (const Error& e) {
    r.passed = false;
    r.failed_step = step;
    r.error = e.what();
    r.predictions.clear();
  }
  return r;
}

OrderedJson ValidationReport::to_json() const {
  auto num = [](const std::optional<double>& v) { return v ? OrderedJson(*v) : OrderedJson(nullptr); };
  OrderedJson j;
  j["requested"] = requested;
  j["unlabelable"] = unlabelable;
  j["evaluated"] = predictions.size();
  j["cost_function"] = cost_function;
  j["cost"] = num(cost);
  j["metrics"]["precision"] = num(metrics.precision);
  j["metrics"]["recall"] = num(metrics.recall);
  j["metrics"]["fpr"] = num(metrics.fpr);
  j["metrics"]["auc"] = num(metrics.auc);
  j["training_test_results"] = OrderedJson::array();
  for (const auto& r : training_results) j["training_test_results"].push_back(seed_result_json(r));
  return j;
}

ValidationReport validate_in_production(const DeploymentBundle& bundle, const EntitySet& es_tplus,
                                        const LabelingFunction& f, const LabelSearchParams& label_params,
                                        const std::vector<CutoffRow>& timestamps, const CostFunction& g,
                                        unsigned jobs) {
  ValidationReport report;
  report.requested = timestamps.size();
  report.cost_function = g.name;
  report.training_results = bundle.model.results;
  const auto latest = es_tplus.latest_time();

  std::vector<CutoffRow> usable;
  for (const auto& row : timestamps) {
    const Timestamp window_start = row.cutoff + label_params.lead;
    const Timestamp window_end = window_start + label_params.prediction_window;
    std::optional<LabelTime> lt;
    if (latest && window_end <= *latest) lt = apply_labeling_function(es_tplus, f, row.instance_id, window_start, label_params);
    const bool* label = lt ? std::get_if<bool>(&lt->label) : nullptr;
    if (label == nullptr) {
      ++report.unlabelable;
      continue;
    }
    usable.push_back(row);
    report.labels.push_back(*label ? 1 : 0);
  }
  if (usable.empty()) return report;

  const FeatureMatrix matrix = calculate_feature_matrix(es_tplus, usable, bundle.feature_list, jobs);
  report.predictions = generate_predictions(bundle, matrix);
  std::vector<double> scores;
  std::vector<int> decisions;
  for (const auto& p : report.predictions) {
    scores.push_back(p.score);
    decisions.push_back(p.decision ? 1 : 0);
  }
  report.metrics = compute_metrics(scores, report.labels, bundle.threshold);
  CostContext ctx;
  ctx.es = &es_tplus;
  ctx.target_entity = bundle.feature_list.target_entity;
  for (const auto& r : usable) {
    ctx.instance_ids.push_back(r.instance_id);
    ctx.cutoffs.push_back(r.cutoff);
  }
  report.cost = g(ctx, decisions, report.labels);
  return report;
}

}  // namespace chronoforge
