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

#include "chronoforge/pipeline.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "chronoforge/csv.hpp"
#include "chronoforge/deployment.hpp"
#include "chronoforge/entityset.hpp"
#include "chronoforge/error.hpp"
#include "chronoforge/metadata.hpp"
#include "chronoforge/metrics.hpp"
#include "chronoforge/provenance.hpp"

namespace chronoforge {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- config

namespace {

fs::path resolve_path(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("missing artifact '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

fs::path require_artifact(const fs::path& path, const char* producer) {
  if (!fs::exists(path))
    throw ConfigError("missing artifact '" + path.string() + "' (run `" + producer + "` first)");
  return path;
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

RunConfig RunConfig::from_json(const Json& j, const fs::path& base) {
  RunConfig c;
  try {
    const Json& paths = j.at("paths");
    c.data_dir = resolve_path(base, paths.at("data_dir").get<std::string>());
    c.metadata_path = resolve_path(base, paths.at("metadata").get<std::string>());
    if (paths.contains("output_dir")) c.output_dir = resolve_path(base, paths.at("output_dir").get<std::string>());
    if (paths.contains("new_data_dir")) c.new_data_dir = resolve_path(base, paths.at("new_data_dir").get<std::string>());

    c.seed = get_or<std::uint64_t>(j, "seed", 0);

    const Json& pe = j.at("prediction_engineering");
    c.target_entity = pe.at("target_entity").get<std::string>();
    const Json& lf = pe.at("labeling_function");
    if (lf.is_string()) {
      c.labeling_function = lf.get<std::string>();
    } else {
      c.labeling_function = lf.at("name").get<std::string>();
      c.labeling_parameters = lf.value("parameters", Json::object());
    }
    c.prediction_window = pe.at("prediction_window").get<std::string>();
    c.lead = get_or<std::string>(pe, "lead", "0 days");
    c.min_training_data = get_or<std::string>(pe, "min_training_data", "0 days");
    for (const auto* text : {&c.prediction_window, &c.lead, &c.min_training_data}) Duration::parse(*text);

    Json fe = j.at("feature_engineering");
    if (fe.is_array()) {
      if (fe.size() != 1) throw ConfigError("feature_engineering must hold exactly one block");
      fe = fe[0];
    }
    if (!fe.contains("target_entity")) fe["target_entity"] = c.target_entity;
    c.dfs = DfsParams::from_json(fe);
    if (fe.contains("feature_selection") && !fe.at("feature_selection").is_null())
      c.n_features = fe.at("feature_selection").at("n_features").get<std::size_t>();

    const Json& mo = j.at("modeling");
    for (const auto& m : mo.at("methods"))
      c.methods.emplace_back(m.at("method").get<std::string>(),
                             resolve_path(base, m.at("hyperparameter_options").get<std::string>()));
    c.budget = mo.at("budget");
    Budget::parse(c.budget);
    if (mo.contains("automl_method")) {
      const Json& am = mo.at("automl_method");
      const std::string name = am.is_string() ? am.get<std::string>() : am.at("method").get<std::string>();
      if (name == "random") c.automl = AutomlMethod::Random;
      else if (name == "grid") c.automl = AutomlMethod::Grid;
      else throw ConfigError("automl_method must be \"random\" or \"grid\"");
      if (am.is_object() && am.contains("seed")) c.automl_seed = am.at("seed").get<std::uint64_t>();
    }
    c.k_repeats = get_or<int>(mo, "k_repeats", 3);
    c.threshold_grid_step = get_or<double>(mo, "threshold_grid_step", 0.001);
    if (mo.contains("cost_function")) {
      const Json& cf = mo.at("cost_function");
      if (cf.is_string()) {
        c.cost_function = cf.get<std::string>();
      } else {
        c.cost_function = cf.at("name").get<std::string>();
        c.cost_parameters = cf.value("parameters", Json::object());
      }
    }
    make_cost_function(c.cost_function, c.cost_parameters);

    c.splits = DataSplits::from_json(j.at("data_splits"));

    if (j.contains("deployment")) {
      const Json& d = j.at("deployment");
      if (d.contains("current_time")) c.current_time = parse_timestamp(d.at("current_time").get<std::string>());
      c.deployment_instances = get_or<std::vector<std::string>>(d, "instances", {});
    }
    if (j.contains("validation") && j.at("validation").contains("timestamps")) {
      std::vector<Timestamp> ts;
      for (const auto& t : j.at("validation").at("timestamps")) ts.push_back(parse_timestamp(t.get<std::string>()));
      c.validation_timestamps = std::move(ts);
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("invalid run config: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  Json j;
  try {
    j = Json::parse(read_text(path));
  } catch (const Json::parse_error& e) {
    throw ConfigError("run config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return from_json(j, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

fs::path resolve_output_dir(const RunConfig& cfg, const RunOptions& opt) {
  if (opt.output_dir) return *opt.output_dir;
  if (cfg.output_dir) return *cfg.output_dir;
  if (const char* env = std::getenv("CHRONOFORGE_OUTPUT"); env != nullptr && *env != '\0') return env;
  throw ConfigError("no output directory: pass --output, set paths.output_dir or CHRONOFORGE_OUTPUT");
}

LabelSearchParams label_params_for(const RunConfig& cfg, const DataSplit& split, std::uint64_t seed) {
  LabelSearchParams p;
  p.target_entity = cfg.target_entity;
  p.prediction_window = Duration::parse(cfg.prediction_window);
  p.lead = Duration::parse(cfg.lead);
  p.min_training_data = Duration::parse(cfg.min_training_data);
  const Json& l = split.label_search_parameters;
  try {
    const std::string strategy = get_or<std::string>(l, "strategy", "fixed");
    if (strategy == "fixed") p.strategy = SearchStrategy::Fixed;
    else if (strategy == "random") p.strategy = SearchStrategy::Random;
    else throw ConfigError("label search strategy must be \"fixed\" or \"random\"");
    if (l.contains("examples_per_instance")) {
      const Json& e = l.at("examples_per_instance");
      if (!(e.is_string() && e == "unlimited")) p.examples_per_instance = e.get<std::size_t>();
    }
    p.offset = Duration::parse(get_or<std::string>(l, "offset", cfg.prediction_window));
    p.gap = Duration::parse(get_or<std::string>(l, "gap", "0 days"));
    p.seed = get_or<std::uint64_t>(l, "seed", seed);
  } catch (const Json::exception& e) {
    throw ConfigError("invalid label_search_parameters for split '" + split.id + "': " + e.what());
  }
  p.validate();
  return p;
}

// ---------------------------------------------------------------- shared steps

namespace {

const char* kSplitIds[] = {"train", "threshold-tuning", "test"};

struct Loaded {
  MetadataDocument metadata;
  EntitySet es;
};

Loaded load_data(const RunConfig& cfg) {
  MetadataDocument md = load_metadata_file(cfg.metadata_path.string());
  EntitySet es = load_entityset(cfg.data_dir, md);
  return {std::move(md), std::move(es)};
}

std::uint64_t run_seed(const RunConfig& cfg, const RunOptions& opt) { return opt.seed ? *opt.seed : cfg.seed; }

fs::path label_times_path(const fs::path& out, const std::string& split) {
  return out / ("label_times_" + split + ".csv");
}
fs::path matrix_path(const fs::path& out, const std::string& split) {
  return out / ("feature_matrix_" + split + ".csv");
}

FeatureList read_feature_list(const fs::path& out) {
  return parse_feature_list(read_text(require_artifact(out / "feature_list.json", "features")));
}

FeatureMatrix read_matrix(const fs::path& out, const std::string& split, const EntitySet& es, const FeatureList& fl) {
  const auto lt = read_label_times_csv(require_artifact(label_times_path(out, split), "labels"));
  std::vector<SemanticType> types;
  for (const auto& f : fl.features) types.push_back(feature_output_type(es, f));
  return read_feature_matrix_csv(require_artifact(matrix_path(out, split), "features"), types, lt);
}

std::string automl_name(AutomlMethod m) { return m == AutomlMethod::Random ? "random" : "grid"; }

}  // namespace

// ---------------------------------------------------------------- commands

void run_labels(const RunConfig& cfg, const RunOptions& opt) {
  const fs::path out = resolve_output_dir(cfg, opt);
  const auto [md, es] = load_data(cfg);
  const LabelingFunction f = make_labeling_function(es, cfg.target_entity, cfg.labeling_function, cfg.labeling_parameters);
  fs::create_directories(out);
  for (const char* id : kSplitIds) {
    const DataSplit& split = cfg.splits.at(id);
    const LabelSearchParams params = label_params_for(cfg, split, run_seed(cfg, opt));
    const LabelTimes lt = search_training_examples(es, f, params, {split.start, split.end}, opt.jobs);
    write_label_times_csv(lt, label_times_path(out, id));
  }
  write_text(out / "metadata.json", emit_metadata(md));
  Json lf;
  lf["name"] = cfg.labeling_function;
  lf["parameters"] = cfg.labeling_parameters;
  lf["target_entity"] = cfg.target_entity;
  write_text(out / "labeling_function.json", dump_canonical(lf));
}

void run_features(const RunConfig& cfg, const RunOptions& opt) {
  const fs::path out = resolve_output_dir(cfg, opt);
  std::map<std::string, std::vector<LabelTime>> label_times;
  for (const char* id : kSplitIds)
    label_times[id] = read_label_times_csv(require_artifact(label_times_path(out, id), "labels"));
  const auto [md, es] = load_data(cfg);

  FeatureList fl = create_features(es, cfg.dfs);
  if (fl.features.empty()) throw ConfigError("feature synthesis produced no features; add primitives");
  if (cfg.n_features && *cfg.n_features < fl.features.size()) {
    const FeatureMatrix train = calculate_feature_matrix(es, label_times["train"], fl, opt.jobs);
    fl = select_features(fl, train, binary_labels(*train.labels), *cfg.n_features, run_seed(cfg, opt));
  }
  write_text(out / "feature_list.json", serialize_feature_list(fl));
  for (const char* id : kSplitIds)
    write_feature_matrix_csv(calculate_feature_matrix(es, label_times[id], fl, opt.jobs), matrix_path(out, id));
}

void run_train(const RunConfig& cfg, const RunOptions& opt) {
  const fs::path out = resolve_output_dir(cfg, opt);
  const FeatureList fl = read_feature_list(out);
  const auto [md, es] = load_data(cfg);
  SplitData train = SplitData::from(read_matrix(out, "train", es, fl), &es, cfg.target_entity);
  SplitData tune = SplitData::from(read_matrix(out, "threshold-tuning", es, fl), &es, cfg.target_entity);
  SplitData test = SplitData::from(read_matrix(out, "test", es, fl), &es, cfg.target_entity);

  SearchParams sp;
  for (const auto& [method, path] : cfg.methods) {
    MethodSpec spec = load_method_spec(path);
    if (resolve_method_key(method) != spec.method_key && method != spec.name)
      throw ConfigError("method '" + method + "' does not match spec '" + path.string() + "' (" + spec.method_class + ")");
    sp.methods.push_back({method, path, std::move(spec)});
  }
  sp.budget = Budget::parse(cfg.budget);
  sp.automl = cfg.automl;
  sp.seed = cfg.automl_seed ? *cfg.automl_seed : run_seed(cfg, opt);
  sp.k_repeats = cfg.k_repeats;
  sp.threshold_grid_step = cfg.threshold_grid_step;
  sp.jobs = opt.jobs;
  const CostFunction g = make_cost_function(cfg.cost_function, cfg.cost_parameters);

  SearchResult result;
  try {
    result = search_model(g, train, tune, test, sp);
  } catch (const SearchExhaustedError& e) {
    write_text(out / "leaderboard.csv", leaderboard_csv(e.partial_leaderboard()));
    throw;
  }
  result.model.feature_list_hash = feature_list_hash(fl);

  write_text(out / "model.json", dump_canonical(result.model.to_json()));
  write_text(out / "leaderboard.csv", leaderboard_csv(result.leaderboard));
  csv::Table scores;
  scores.header = {"instance_id", "cutoff_time", "score"};
  for (std::size_t i = 0; i < result.test_scores.size(); ++i)
    scores.rows.push_back({test.matrix.instance_ids[i], format_timestamp(test.matrix.cutoffs[i]),
                           format_double(result.test_scores[i])});
  write_text(out / "test_scores.csv", csv::write(scores));

  ProvenanceInputs in;
  in.metadata_path = "metadata.json";
  require_artifact(out / "metadata.json", "labels");
  in.labeling_function = "labeling_function.json";
  require_artifact(out / "labeling_function.json", "labels");
  in.target_entity = cfg.target_entity;
  in.prediction_window = cfg.prediction_window;
  in.min_training_data = cfg.min_training_data;
  in.lead = cfg.lead;
  in.dfs = fl.params;
  in.n_features = cfg.n_features;
  for (const auto& m : sp.methods) {
    const std::string rel = "method_specs/" + m.spec_path.filename().string();
    write_text(out / rel, read_text(m.spec_path));
    in.methods.emplace_back(m.method, rel);
  }
  in.budget = cfg.budget;
  Json automl;
  automl["method"] = automl_name(sp.automl);
  automl["seed"] = sp.seed;
  automl["k_repeats"] = sp.k_repeats;
  automl["threshold_grid_step"] = sp.threshold_grid_step;
  write_text(out / "automl_specs.json", dump_canonical(automl));
  in.automl_method = "automl_specs.json";
  Json cost;
  cost["name"] = g.name;
  cost["parameters"] = g.parameters;
  write_text(out / "cost_function.json", dump_canonical(cost));
  in.cost_function = "cost_function.json";
  in.elapsed_seconds = result.elapsed_seconds;
  in.splits = cfg.splits.splits;
  for (const auto& s : cfg.splits.splits) {
    Json v;
    v["data_split_id"] = s.id;
    v["start_time"] = s.start_text;
    v["end_time"] = s.end_text;
    v["label_search_parameters"] = s.label_search_parameters;
    v["evaluation"] = "fixed chronological split";
    const std::string rel = "validation_spec_" + s.id + ".json";
    write_text(out / rel, dump_canonical(v));
    in.validation_methods[s.id] = rel;
  }
  in.test_results = result.model.results;
  in.deployment_executable = "deploy.sh";
  write_text(out / "deploy.sh",
             "#!/bin/sh\n# Scores current data with the bundle in this directory.\n"
             "exec chronoforge predict --output \"$(dirname \"$0\")\" \"$@\"\n");
  fs::permissions(out / "deploy.sh", fs::perms::owner_exec | fs::perms::group_exec | fs::perms::others_exec,
                  fs::perm_options::add);
  in.feature_list_path = "feature_list.json";
  in.model_path = "model.json";
  in.threshold = result.model.threshold;
  const LabelingFunction f = make_labeling_function(es, cfg.target_entity, cfg.labeling_function, cfg.labeling_parameters);
  in.data_fields_used = collect_data_fields(es, fl, f);
  in.training_matrix = &train.matrix;
  write_text(out / "model_provenance.json", emit_provenance(assemble_provenance(in)));
}

bool run_test(const RunConfig& cfg, const RunOptions& opt) {
  const fs::path out = resolve_output_dir(cfg, opt);
  require_artifact(out / "model_provenance.json", "train");
  const DeploymentBundle bundle = DeploymentBundle::load(out);
  if (!cfg.new_data_dir) throw ConfigError("paths.new_data_dir is required for `test`");
  const auto current = opt.current_time ? opt.current_time : cfg.current_time;
  if (!current) throw ConfigError("deployment.current_time is required for `test`");
  const auto [md, es] = load_data(cfg);
  const IntegrationResult r =
      integration_test(bundle, es, *cfg.new_data_dir, md, *current, cfg.deployment_instances, opt.jobs);
  write_text(out / "integration_report.json", dump_report(r.report()));
  write_text(out / "integration_predictions.csv", predictions_csv(r.predictions));
  if (!r.passed) std::cerr << "integration test failed at " << r.failed_step << ": " << r.error << "\n";
  return r.passed;
}

void run_validate(const RunConfig& cfg, const RunOptions& opt) {
  const fs::path out = resolve_output_dir(cfg, opt);
  require_artifact(out / "model_provenance.json", "train");
  const DeploymentBundle bundle = DeploymentBundle::load(out);
  const auto [md, es_t] = load_data(cfg);
  const EntitySet es = cfg.new_data_dir ? add_new_data(es_t, *cfg.new_data_dir, md) : es_t;

  std::vector<CutoffRow> rows;
  bool replay = false;
  if (cfg.validation_timestamps) {
    const Entity& target = es.entity(cfg.target_entity);
    for (Timestamp t : *cfg.validation_timestamps)
      for (std::size_t i = 0; i < target.row_count(); ++i) rows.push_back({target.index_value(i), t});
  } else {
    replay = true;
    for (const auto& lt : read_label_times_csv(require_artifact(label_times_path(out, "test"), "labels")))
      rows.push_back({lt.instance_id, lt.cutoff_time});
  }
  const LabelingFunction f = make_labeling_function(es, cfg.target_entity, cfg.labeling_function, cfg.labeling_parameters);
  const LabelSearchParams lp = label_params_for(cfg, cfg.splits.at("test"), run_seed(cfg, opt));
  const CostFunction g = make_cost_function(cfg.cost_function, cfg.cost_parameters);
  const ValidationReport report = validate_in_production(bundle, es, f, lp, rows, g, opt.jobs);
  OrderedJson j = report.to_json();
  j["replayed_test_split"] = replay;
  j["entityset_version"] = es.version();
  write_text(out / "validation_report.json", dump_report(j));
}

void run_predict(const RunConfig& cfg, const RunOptions& opt) {
  const fs::path out = resolve_output_dir(cfg, opt);
  require_artifact(out / "model_provenance.json", "train");
  const DeploymentBundle bundle = DeploymentBundle::load(out);
  const auto current = opt.current_time ? opt.current_time : cfg.current_time;
  if (!current) throw ConfigError("deployment.current_time (or --current-time) is required for `predict`");
  const auto [md, es_t] = load_data(cfg);
  const EntitySet es = cfg.new_data_dir ? add_new_data(es_t, *cfg.new_data_dir, md) : es_t;
  std::vector<CutoffRow> rows;
  if (cfg.deployment_instances.empty()) {
    const Entity& target = es.entity(bundle.feature_list.target_entity);
    for (std::size_t i = 0; i < target.row_count(); ++i) rows.push_back({target.index_value(i), *current});
  } else {
    for (const auto& id : cfg.deployment_instances) rows.push_back({id, *current});
  }
  const FeatureMatrix m = calculate_feature_matrix(es, rows, bundle.feature_list, opt.jobs);
  write_text(out / "predictions.csv", predictions_csv(generate_predictions(bundle, m)));
  write_text(out / "drift_report.jsonl", check_drift(bundle.provenance, m, es).jsonl());
}

}  // namespace chronoforge
