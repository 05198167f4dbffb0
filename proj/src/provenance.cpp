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

#include "chronoforge/provenance.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "chronoforge/error.hpp"

namespace chronoforge {

// ---------------------------------------------------------------- accessors

namespace {

const OrderedJson& at_pointer(const OrderedJson& j, const char* pointer) {
  try {
    return j.at(OrderedJson::json_pointer(pointer));
  } catch (const OrderedJson::exception&) {
    throw SchemaError(pointer, "missing from provenance document");
  }
}

}  // namespace

double ProvenanceDocument::threshold() const {
  return at_pointer(json_, "/deployment/deployment_parameters/threshold").get<double>();
}
std::string ProvenanceDocument::feature_list_path() const {
  return at_pointer(json_, "/deployment/deployment_parameters/feature_list_path").get<std::string>();
}
std::string ProvenanceDocument::model_path() const {
  return at_pointer(json_, "/deployment/deployment_parameters/model_path").get<std::string>();
}
std::string ProvenanceDocument::metadata_path() const { return at_pointer(json_, "/metadata").get<std::string>(); }

FieldMap ProvenanceDocument::data_fields_used() const {
  FieldMap out;
  const auto& j = at_pointer(json_, "/deployment/integration_and_validation/data_fields_used");
  for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = it.value().get<std::vector<std::string>>();
  return out;
}

std::map<std::string, FeatureRange> ProvenanceDocument::expected_ranges() const {
  std::map<std::string, FeatureRange> out;
  const auto& j = at_pointer(json_, "/deployment/integration_and_validation/expected_feature_value_ranges");
  for (auto it = j.begin(); it != j.end(); ++it)
    out[it.key()] = {it.value().at("min").get<double>(), it.value().at("max").get<double>()};
  return out;
}

// ---------------------------------------------------------------- assembly

std::map<std::string, FeatureRange> expected_feature_ranges(const FeatureMatrix& training) {
  std::map<std::string, FeatureRange> out;
  for (std::size_t c = 0; c < training.column_count(); ++c) {
    if (training.types[c] != SemanticType::Numeric) continue;
    std::optional<FeatureRange> r;
    for (const auto& row : training.rows) {
      const double* v = std::get_if<double>(&row[c]);
      if (v == nullptr) continue;
      if (!r) r = FeatureRange{*v, *v};
      r->min = std::min(r->min, *v);
      r->max = std::max(r->max, *v);
    }
    if (r) out[training.columns[c]] = {round_significant_outward(r->min, true), round_significant_outward(r->max, false)};
  }
  return out;
}

FieldMap collect_data_fields(const EntitySet& es, const FeatureList& features, const LabelingFunction& f) {
  std::set<std::pair<std::string, std::string>> all(f.fields_used.begin(), f.fields_used.end());
  for (const auto& fd : features.features)
    for (auto& p : fields_used(es, fd)) all.insert(std::move(p));
  FieldMap out;
  for (const auto& [entity, var] : all) out[entity].push_back(var);
  return out;
}

ProvenanceDocument assemble_provenance(const ProvenanceInputs& in) {
  auto require = [](bool ok, const char* block) {
    if (!ok) throw ConfigError(std::string("provenance block '") + block + "' cannot be assembled: artifact missing");
  };
  require(!in.metadata_path.empty(), "metadata");
  require(!in.labeling_function.empty(), "prediction_engineering");
  require(!in.methods.empty(), "modeling");
  require(in.splits.size() == 3, "data_splits");
  require(!in.test_results.empty(), "results");
  require(!in.model_path.empty() && !in.feature_list_path.empty(), "deployment");
  require(in.training_matrix != nullptr, "deployment");

  OrderedJson d;
  d["metadata"] = in.metadata_path;

  OrderedJson pe;
  pe["labeling_function"] = in.labeling_function;
  pe["target_entity"] = in.target_entity;
  pe["prediction_window"] = in.prediction_window;
  pe["min_training_data"] = in.min_training_data;
  pe["lead"] = in.lead;
  d["prediction_engineering"] = pe;

  OrderedJson fe;
  fe["method"] = "Deep Feature Synthesis";
  fe["target_entity"] = in.dfs.target_entity;
  fe["training_window"] = in.dfs.training_window ? in.dfs.training_window->text() : std::string("unlimited");
  fe["aggregate_primitives"] = in.dfs.aggregation_primitives;
  fe["transform_primitives"] = in.dfs.transform_primitives;
  fe["ignore_variables"] = OrderedJson::object();
  for (const auto& [entity, vars] : in.dfs.ignore_variables) fe["ignore_variables"][entity] = vars;
  fe["max_depth"] = in.dfs.max_depth;
  if (in.n_features) fe["feature_selection"] = {{"method", "Random Forest"}, {"n_features", *in.n_features}};
  d["feature_engineering"] = OrderedJson::array({fe});

  OrderedJson mo;
  mo["methods"] = OrderedJson::array();
  for (const auto& [method, options] : in.methods)
    mo["methods"].push_back({{"method", method}, {"hyperparameter_options", options}});
  mo["budget"] = OrderedJson::parse(in.budget.dump());
  mo["automl_method"] = in.automl_method;
  mo["cost_function"] = in.cost_function;
  if (in.elapsed_seconds) mo["elapsed_seconds"] = std::round(*in.elapsed_seconds * 1000.0) / 1000.0;
  d["modeling"] = mo;

  d["data_splits"] = OrderedJson::array();
  for (const auto& s : in.splits) {
    OrderedJson sj;
    sj["id"] = s.id;
    sj["start_time"] = s.start_text;
    sj["end_time"] = s.end_text;
    sj["label_search_parameters"] = OrderedJson::parse(s.label_search_parameters.dump());
    d["data_splits"].push_back(sj);
  }

  OrderedJson ts;
  const std::pair<const char*, const char*> setup[] = {
      {"training", "train"}, {"tuning", "threshold-tuning"}, {"testing", "test"}};
  for (const auto& [role, id] : setup) {
    auto it = in.validation_methods.find(id);
    ts[role] = {{"data_split_id", id}, {"validation_method", it == in.validation_methods.end() ? "" : it->second}};
  }
  d["training_setup"] = ts;

  d["results"]["test"] = OrderedJson::array();
  for (const auto& r : in.test_results) d["results"]["test"].push_back(seed_result_json(r));

  OrderedJson dep;
  dep["deployment_executable"] = in.deployment_executable;
  dep["deployment_parameters"] = {
      {"feature_list_path", in.feature_list_path}, {"model_path", in.model_path}, {"threshold", in.threshold}};
  OrderedJson iv;
  iv["data_fields_used"] = OrderedJson::object();
  for (const auto& [entity, vars] : in.data_fields_used) iv["data_fields_used"][entity] = vars;
  iv["expected_feature_value_ranges"] = OrderedJson::object();
  for (const auto& [name, r] : expected_feature_ranges(*in.training_matrix))
    iv["expected_feature_value_ranges"][name] = {{"min", r.min}, {"max", r.max}};
  dep["integration_and_validation"] = iv;
  d["deployment"] = dep;

  ProvenanceDocument doc(std::move(d));
  auto issues = provenance_issues(doc.json());
  if (!issues.empty()) throw SchemaError(issues.front().pointer, issues.front().message);
  return doc;
}

// ---------------------------------------------------------------- validation

namespace {

class Checker {
 public:
  std::vector<SchemaIssue> issues;

  const OrderedJson* field(const OrderedJson& parent, const std::string& pointer, const std::string& key) {
    if (!parent.is_object() || !parent.contains(key)) {
      fail(pointer + "/" + key, "required field is missing");
      return nullptr;
    }
    return &parent.at(key);
  }

  const OrderedJson* object(const OrderedJson& parent, const std::string& pointer, const std::string& key) {
    const OrderedJson* j = field(parent, pointer, key);
    if (j != nullptr && !j->is_object()) {
      fail(pointer + "/" + key, "expected object");
      return nullptr;
    }
    return j;
  }

  const OrderedJson* array(const OrderedJson& parent, const std::string& pointer, const std::string& key) {
    const OrderedJson* j = field(parent, pointer, key);
    if (j != nullptr && !j->is_array()) {
      fail(pointer + "/" + key, "expected array");
      return nullptr;
    }
    return j;
  }

  void string(const OrderedJson& parent, const std::string& pointer, const std::string& key) {
    const OrderedJson* j = field(parent, pointer, key);
    if (j != nullptr && !j->is_string()) fail(pointer + "/" + key, "expected string");
  }

  void duration(const OrderedJson& parent, const std::string& pointer, const std::string& key) {
    const OrderedJson* j = field(parent, pointer, key);
    if (j == nullptr) return;
    if (!j->is_string() || !Duration::try_parse(j->get<std::string>())) fail(pointer + "/" + key, "expected a duration");
  }

  void timestamp(const OrderedJson& parent, const std::string& pointer, const std::string& key) {
    const OrderedJson* j = field(parent, pointer, key);
    if (j == nullptr) return;
    if (!j->is_string() || !try_parse_timestamp(j->get<std::string>())) fail(pointer + "/" + key, "expected a timestamp");
  }

  void unit_number(const OrderedJson& parent, const std::string& pointer, const std::string& key, bool nullable) {
    const OrderedJson* j = field(parent, pointer, key);
    if (j == nullptr) return;
    if (nullable && j->is_null()) return;
    if (!j->is_number() || !(j->get<double>() >= 0.0 && j->get<double>() <= 1.0))
      fail(pointer + "/" + key, "expected a number in [0, 1]");
  }

  void fail(std::string pointer, std::string message) { issues.push_back({std::move(pointer), std::move(message)}); }
};

}  // namespace

std::vector<SchemaIssue> provenance_issues(const OrderedJson& d) {
  Checker c;
  if (!d.is_object()) {
    c.fail("", "expected object");
    return c.issues;
  }
  c.string(d, "", "metadata");

  if (const auto* pe = c.object(d, "", "prediction_engineering")) {
    const std::string p = "/prediction_engineering";
    c.string(*pe, p, "labeling_function");
    c.duration(*pe, p, "prediction_window");
    c.duration(*pe, p, "min_training_data");
    c.duration(*pe, p, "lead");
  }

  if (const auto* fe = c.array(d, "", "feature_engineering")) {
    for (std::size_t i = 0; i < fe->size(); ++i) {
      const std::string p = "/feature_engineering/" + std::to_string(i);
      const OrderedJson& e = (*fe)[i];
      if (!e.is_object()) {
        c.fail(p, "expected object");
        continue;
      }
      c.string(e, p, "method");
      if (e.contains("training_window") && !(e.at("training_window").is_string() &&
                                             (e.at("training_window") == "unlimited" ||
                                              Duration::try_parse(e.at("training_window").get<std::string>()))))
        c.fail(p + "/training_window", "expected a duration or \"unlimited\"");
      for (const char* key : {"aggregate_primitives", "transform_primitives"})
        if (const auto* a = c.array(e, p, key))
          for (std::size_t k = 0; k < a->size(); ++k)
            if (!(*a)[k].is_string()) c.fail(p + "/" + key + "/" + std::to_string(k), "expected string");
      if (e.contains("ignore_variables") && !e.at("ignore_variables").is_object())
        c.fail(p + "/ignore_variables", "expected object");
      if (e.contains("feature_selection")) {
        const auto& fs = e.at("feature_selection");
        if (!fs.is_object()) {
          c.fail(p + "/feature_selection", "expected object");
        } else {
          c.string(fs, p + "/feature_selection", "method");
          const auto* n = c.field(fs, p + "/feature_selection", "n_features");
          if (n != nullptr && !(n->is_number_integer() && n->get<long long>() > 0))
            c.fail(p + "/feature_selection/n_features", "expected a positive integer");
        }
      }
    }
  }

  if (const auto* mo = c.object(d, "", "modeling")) {
    const std::string p = "/modeling";
    if (const auto* ms = c.array(*mo, p, "methods"))
      for (std::size_t i = 0; i < ms->size(); ++i) {
        const std::string mp = p + "/methods/" + std::to_string(i);
        c.string((*ms)[i], mp, "method");
        c.string((*ms)[i], mp, "hyperparameter_options");
      }
    if (const auto* b = c.field(*mo, p, "budget"))
      if (!(b->is_string() || (b->is_number_integer() && b->get<long long>() > 0)))
        c.fail(p + "/budget", "expected a duration or a positive count");
    c.string(*mo, p, "automl_method");
    c.string(*mo, p, "cost_function");
  }

  if (const auto* ds = c.array(d, "", "data_splits"))
    for (std::size_t i = 0; i < ds->size(); ++i) {
      const std::string p = "/data_splits/" + std::to_string(i);
      c.string((*ds)[i], p, "id");
      c.timestamp((*ds)[i], p, "start_time");
      c.timestamp((*ds)[i], p, "end_time");
      if ((*ds)[i].contains("label_search_parameters") && !(*ds)[i].at("label_search_parameters").is_object())
        c.fail(p + "/label_search_parameters", "expected object");
    }

  if (const auto* ts = c.object(d, "", "training_setup"))
    for (const char* role : {"training", "tuning", "testing"})
      if (const auto* r = c.object(*ts, "/training_setup", role)) {
        c.string(*r, std::string("/training_setup/") + role, "data_split_id");
        c.string(*r, std::string("/training_setup/") + role, "validation_method");
      }

  if (const auto* res = c.object(d, "", "results"))
    for (auto it = res->begin(); it != res->end(); ++it) {
      const std::string p = "/results/" + it.key();
      if (!it.value().is_array()) {
        c.fail(p, "expected array");
        continue;
      }
      for (std::size_t i = 0; i < it.value().size(); ++i) {
        const std::string rp = p + "/" + std::to_string(i);
        const OrderedJson& r = it.value()[i];
        if (!r.is_object()) {
          c.fail(rp, "expected object");
          continue;
        }
        if (const auto* seed = c.field(r, rp, "random_seed"))
          if (!seed->is_number_integer()) c.fail(rp + "/random_seed", "expected integer");
        c.unit_number(r, rp, "threshold", false);
        for (const char* key : {"precision", "recall", "fpr", "auc"}) c.unit_number(r, rp, key, true);
        for (auto f = r.begin(); f != r.end(); ++f) {
          static const std::set<std::string> allowed = {"random_seed", "threshold", "precision",
                                                        "recall",      "fpr",       "auc"};
          if (!allowed.count(f.key())) c.fail(rp + "/" + f.key(), "unexpected field in results record");
        }
      }
    }

  if (const auto* dep = c.object(d, "", "deployment")) {
    const std::string p = "/deployment";
    c.string(*dep, p, "deployment_executable");
    if (const auto* dp = c.object(*dep, p, "deployment_parameters")) {
      c.string(*dp, p + "/deployment_parameters", "feature_list_path");
      c.string(*dp, p + "/deployment_parameters", "model_path");
      c.unit_number(*dp, p + "/deployment_parameters", "threshold", false);
    }
    if (const auto* iv = c.object(*dep, p, "integration_and_validation")) {
      const std::string ip = p + "/integration_and_validation";
      if (const auto* du = c.object(*iv, ip, "data_fields_used"))
        for (auto it = du->begin(); it != du->end(); ++it) {
          bool ok = it.value().is_array() &&
                    std::all_of(it.value().begin(), it.value().end(), [](const auto& v) { return v.is_string(); });
          if (!ok) c.fail(ip + "/data_fields_used/" + it.key(), "expected array of variable names");
        }
      if (const auto* er = c.object(*iv, ip, "expected_feature_value_ranges"))
        for (auto it = er->begin(); it != er->end(); ++it) {
          const std::string rp = ip + "/expected_feature_value_ranges/" + it.key();
          const auto* lo = c.field(it.value(), rp, "min");
          const auto* hi = c.field(it.value(), rp, "max");
          if (lo == nullptr || hi == nullptr) continue;
          if (!lo->is_number()) c.fail(rp + "/min", "expected number");
          else if (!hi->is_number()) c.fail(rp + "/max", "expected number");
          else if (lo->get<double>() > hi->get<double>()) c.fail(rp, "min exceeds max");
        }
    }
  }
  return c.issues;
}

ProvenanceDocument validate_provenance(std::string_view text) {
  OrderedJson j;
  try {
    j = OrderedJson::parse(text);
  } catch (const OrderedJson::parse_error& e) {
    throw ParseError(std::string("provenance JSON syntax error: ") + e.what(), e.byte);
  }
  auto issues = provenance_issues(j);
  if (!issues.empty()) throw SchemaError(issues.front().pointer, issues.front().message);
  return ProvenanceDocument(std::move(j));
}

std::string emit_provenance(const ProvenanceDocument& doc) { return dump_report(doc.json()); }

// ---------------------------------------------------------------- drift

OrderedJson DriftEntry::to_json() const {
  OrderedJson j;
  if (kind == Kind::OutOfRange) {
    j["kind"] = "OutOfRange";
    j["row"] = row;
    j["instance_id"] = instance_id;
    j["feature"] = feature;
    j["value"] = value;
    j["min"] = range.min;
    j["max"] = range.max;
  } else {
    j["kind"] = "MissingField";
    j["entity"] = entity;
    j["variable"] = variable;
  }
  return j;
}

std::size_t DriftReport::count(DriftEntry::Kind k) const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [k](const DriftEntry& e) { return e.kind == k; }));
}

std::string DriftReport::jsonl() const {
  std::string out;
  for (const auto& e : entries) out += e.to_json().dump() + "\n";
  return out;
}

DriftReport check_drift(const ProvenanceDocument& doc, const FeatureMatrix& matrix, const EntitySet& es) {
  DriftReport report;
  const auto ranges = doc.expected_ranges();
  for (std::size_t r = 0; r < matrix.row_count(); ++r)
    for (std::size_t c = 0; c < matrix.column_count(); ++c) {
      auto it = ranges.find(matrix.columns[c]);
      if (it == ranges.end()) continue;
      auto v = std::get_if<double>(&matrix.rows[r][c]);
      if (v == nullptr || (*v >= it->second.min && *v <= it->second.max)) continue;
      DriftEntry e;
      e.kind = DriftEntry::Kind::OutOfRange;
      e.row = r;
      e.instance_id = r < matrix.instance_ids.size() ? matrix.instance_ids[r] : "";
      e.feature = matrix.columns[c];
      e.value = *v;
      e.range = it->second;
      report.entries.push_back(std::move(e));
    }
  for (const auto& [entity, vars] : doc.data_fields_used()) {
    const Entity* e = es.find_entity(entity);
    for (const auto& v : vars) {
      if (e != nullptr && e->column_of(v)) continue;
      DriftEntry m;
      m.kind = DriftEntry::Kind::MissingField;
      m.entity = entity;
      m.variable = v;
      report.entries.push_back(std::move(m));
    }
  }
  return report;
}

}  // namespace chronoforge
