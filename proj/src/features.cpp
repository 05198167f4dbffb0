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

#include "chronoforge/features.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <set>
#include <thread>
#include <unordered_map>

#include "chronoforge/learners.hpp"
#include "chronoforge/preprocess.hpp"
#include "chronoforge/rng.hpp"

namespace chronoforge {

// ---------------------------------------------------------------- params

Json DfsParams::to_json() const {
  Json j;
  j["target_entity"] = target_entity;
  j["training_window"] = training_window ? Json(training_window->text()) : Json(nullptr);
  j["aggregate_primitives"] = aggregation_primitives;
  j["transform_primitives"] = transform_primitives;
  j["ignore_variables"] = Json::object();
  for (const auto& [entity, vars] : ignore_variables) j["ignore_variables"][entity] = vars;
  j["max_depth"] = max_depth;
  return j;
}

DfsParams DfsParams::from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("DFS parameters must be a JSON object");
  DfsParams p;
  try {
    p.target_entity = j.at("target_entity").get<std::string>();
    if (j.contains("training_window") && !j.at("training_window").is_null()) {
      const std::string w = j.at("training_window").get<std::string>();
      if (w != "unlimited") p.training_window = Duration::parse(w);
    }
    for (const char* key : {"aggregate_primitives", "aggregation_primitives"})
      if (j.contains(key)) p.aggregation_primitives = j.at(key).get<std::vector<std::string>>();
    if (j.contains("transform_primitives"))
      p.transform_primitives = j.at("transform_primitives").get<std::vector<std::string>>();
    if (j.contains("ignore_variables"))
      for (auto it = j.at("ignore_variables").begin(); it != j.at("ignore_variables").end(); ++it)
        p.ignore_variables[it.key()] = it.value().get<std::vector<std::string>>();
    if (j.contains("max_depth")) p.max_depth = j.at("max_depth").get<int>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("invalid DFS parameters: ") + e.what());
  }
  return p;
}

std::vector<std::string> FeatureList::names() const {
  std::vector<std::string> out;
  for (const auto& f : features) out.push_back(f.name());
  return out;
}

// ---------------------------------------------------------------- structure helpers

namespace {

bool is_key_type(SemanticType t) { return t == SemanticType::Index || t == SemanticType::Id; }

const std::string& base_entity(const FeatureDefinition& f) { return f.entity; }

bool entity_has_time(const EntitySet& es, const std::string& entity) {
  if (es.entity(entity).time_index()) return true;
  for (std::size_t ri : es.parent_relationships(entity))
    if (entity_has_time(es, es.relationships()[ri].parent_entity)) return true;
  return false;
}

struct Descendant {
  std::string entity;
  int hops;
};

std::vector<Descendant> descendants(const EntitySet& es, const std::string& from) {
  std::vector<Descendant> out;
  std::set<std::string> seen{from};
  std::vector<std::string> frontier{from};
  for (int hops = 1; !frontier.empty(); ++hops) {
    std::vector<std::string> next;
    for (const auto& node : frontier)
      for (std::size_t ri : es.child_relationships(node)) {
        const std::string& child = es.relationships()[ri].child_entity;
        if (!seen.insert(child).second) continue;
        out.push_back({child, hops});
        next.push_back(child);
      }
    frontier = std::move(next);
  }
  return out;
}

class FeatureEnumerator {
 public:
  FeatureEnumerator(const EntitySet& es, const DfsParams& p) : es_(es), p_(p) {
    for (const auto& name : p.aggregation_primitives) {
      const Primitive& prim = primitive(name);
      if (prim.kind != PrimitiveKind::Aggregation) throw ConfigError("'" + name + "' is not an aggregation primitive");
      aggs_.push_back(&prim);
    }
    for (const auto& name : p.transform_primitives) {
      const Primitive& prim = primitive(name);
      if (prim.kind != PrimitiveKind::Transform) throw ConfigError("'" + name + "' is not a transform primitive");
      transforms_.push_back(&prim);
    }
  }

  std::vector<FeatureDefinition> run() {
    std::vector<FeatureDefinition> all;
    if (p_.max_depth >= 1)
      for (auto& [f, d] : transforms_on(p_.target_entity)) all.push_back(std::move(f));
    for (auto& [f, d] : aggregations_at(p_.target_entity, p_.max_depth)) all.push_back(std::move(f));
    std::map<std::string, FeatureDefinition> unique;
    for (auto& f : all) unique.emplace(f.name(), std::move(f));
    std::vector<FeatureDefinition> out;
    for (auto& [name, f] : unique) out.push_back(std::move(f));
    return out;
  }

 private:
  using Scored = std::vector<std::pair<FeatureDefinition, int>>;

  bool ignored(const std::string& entity, const std::string& var) const {
    auto it = p_.ignore_variables.find(entity);
    return it != p_.ignore_variables.end() && std::find(it->second.begin(), it->second.end(), var) != it->second.end();
  }

  Scored transforms_on(const std::string& entity) const {
    Scored out;
    for (const Primitive* t : transforms_)
      for (const auto& v : es_.entity(entity).variables()) {
        if (ignored(entity, v.name) || is_key_type(v.semantic_type) || !t->accepts(v.semantic_type)) continue;
        out.emplace_back(FeatureDefinition::transform(t->name, FeatureDefinition::variable_ref(entity, v.name)), 1);
      }
    return out;
  }

  Scored aggregations_at(const std::string& entity, int budget) const {
    Scored out;
    if (budget < 1) return out;
    for (const auto& d : descendants(es_, entity)) {
      if (d.hops > budget) continue;
      Scored inputs;
      for (const auto& v : es_.entity(d.entity).variables()) {
        if (ignored(d.entity, v.name) || is_key_type(v.semantic_type) || v.semantic_type == SemanticType::TimeIndex)
          continue;
        inputs.emplace_back(FeatureDefinition::variable_ref(d.entity, v.name), 0);
      }
      for (auto& t : transforms_on(d.entity)) inputs.push_back(std::move(t));
      for (auto& a : aggregations_at(d.entity, budget - d.hops)) inputs.push_back(std::move(a));
      const bool timed = entity_has_time(es_, d.entity);
      for (const Primitive* a : aggs_)
        for (const auto& [input, depth] : inputs) {
          if (d.hops + depth > budget) continue;
          if (!a->accepts(feature_output_type(es_, input))) continue;
          if (a->needs_time && !timed) continue;
          out.emplace_back(FeatureDefinition::aggregation(a->name, entity, input), d.hops + depth);
        }
    }
    return out;
  }

  const EntitySet& es_;
  const DfsParams& p_;
  std::vector<const Primitive*> aggs_;
  std::vector<const Primitive*> transforms_;
};

}  // namespace

SemanticType feature_output_type(const EntitySet& es, const FeatureDefinition& f) {
  if (f.kind == FeatureDefinition::Kind::Variable) {
    const Entity& e = es.entity(f.entity);
    auto c = e.column_of(f.variable);
    if (!c) throw DataError("SchemaDrift", f.entity, f.variable, 0, "variable referenced by a feature is missing");
    return e.variables()[*c].semantic_type;
  }
  return primitive(f.primitive).output_type;
}

FeatureList create_features(const EntitySet& es, const DfsParams& params) {
  es.entity(params.target_entity);
  if (params.max_depth < 1) throw ConfigError("max_depth must be a positive integer");
  for (const auto& [entity, vars] : params.ignore_variables) {
    const Entity* e = es.find_entity(entity);
    if (e == nullptr) throw ConfigError("ignore_variables names unknown entity '" + entity + "'");
    for (const auto& v : vars)
      if (!e->column_of(v)) throw ConfigError("ignore_variables names unknown variable '" + entity + "." + v + "'");
  }
  FeatureList fl;
  fl.target_entity = params.target_entity;
  fl.params = params;
  fl.features = FeatureEnumerator(es, params).run();
  return fl;
}

void check_feature(const EntitySet& es, const std::string& target_entity, const FeatureDefinition& f) {
  std::function<void(const FeatureDefinition&)> check = [&](const FeatureDefinition& node) {
    const Entity* e = es.find_entity(node.entity);
    if (e == nullptr) throw DataError("SchemaDrift", node.entity, "", 0, "entity referenced by a feature is missing");
    switch (node.kind) {
      case FeatureDefinition::Kind::Variable:
        if (!e->column_of(node.variable))
          throw DataError("SchemaDrift", node.entity, node.variable, 0, "variable referenced by a feature is missing");
        return;
      case FeatureDefinition::Kind::Transform: {
        const Primitive& p = primitive(node.primitive);
        if (p.kind != PrimitiveKind::Transform || node.input().kind != FeatureDefinition::Kind::Variable ||
            node.input().entity != node.entity)
          throw ConfigError("malformed transform feature '" + node.name() + "'");
        check(node.input());
        if (!p.accepts(feature_output_type(es, node.input())))
          throw DataError("SchemaDrift", node.entity, node.input().variable, 0,
                          "type no longer accepted by " + node.primitive);
        return;
      }
      case FeatureDefinition::Kind::Aggregation: {
        const Primitive& p = primitive(node.primitive);
        if (p.kind != PrimitiveKind::Aggregation) throw ConfigError("malformed aggregation feature '" + node.name() + "'");
        check(node.input());
        if (!find_descendant_path(es, node.entity, base_entity(node.input())) || node.entity == base_entity(node.input()))
          throw DataError("SchemaDrift", node.input().entity, "", 0,
                          "no relationship path from '" + node.entity + "'");
        if (!p.accepts(feature_output_type(es, node.input())))
          throw DataError("SchemaDrift", node.input().entity, node.input().variable, 0,
                          "type no longer accepted by " + node.primitive);
        return;
      }
    }
  };
  if (f.kind == FeatureDefinition::Kind::Variable || f.entity != target_entity)
    throw ConfigError("feature '" + f.name() + "' is not defined on target entity '" + target_entity + "'");
  check(f);
}

std::vector<std::pair<std::string, std::string>> fields_used(const EntitySet& es, const FeatureDefinition& f) {
  std::vector<std::pair<std::string, std::string>> out;
  std::function<void(const FeatureDefinition&)> walk = [&](const FeatureDefinition& node) {
    if (node.kind == FeatureDefinition::Kind::Variable) {
      out.emplace_back(node.entity, node.variable);
      return;
    }
    if (node.kind == FeatureDefinition::Kind::Aggregation) {
      if (auto path = find_descendant_path(es, node.entity, base_entity(node.input())))
        for (std::size_t ri : *path) {
          const auto& rel = es.relationships()[ri];
          out.emplace_back(rel.parent_entity, rel.parent_variable);
          out.emplace_back(rel.child_entity, rel.child_variable);
        }
    }
    walk(node.input());
  };
  walk(f);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------- evaluation

namespace {

std::optional<double> as_number(const Value& v) {
  if (const double* d = std::get_if<double>(&v)) return *d;
  if (const bool* b = std::get_if<bool>(&v)) return *b ? 1.0 : 0.0;
  return std::nullopt;
}

Value aggregate(const std::string& prim, const std::vector<Value>& values, const std::vector<double>& times) {
  if (prim == "COUNT") return static_cast<double>(values.size());
  if (prim == "NUM_UNIQUE") {
    std::set<std::string> distinct;
    for (const auto& v : values) distinct.insert(render_value(v));
    return static_cast<double>(distinct.size());
  }
  if (values.empty()) return Value{};
  std::vector<double> x;
  x.reserve(values.size());
  for (const auto& v : values) x.push_back(*as_number(v));
  const double n = static_cast<double>(x.size());
  if (prim == "SUM") {
    double s = 0;
    for (double v : x) s += v;
    return s;
  }
  if (prim == "MEAN" || prim == "PERCENT") {
    double s = 0;
    for (double v : x) s += v;
    return s / n;
  }
  if (prim == "MIN") return *std::min_element(x.begin(), x.end());
  if (prim == "MAX") return *std::max_element(x.begin(), x.end());
  if (prim == "STD") {
    double m = 0;
    for (double v : x) m += v;
    m /= n;
    double ss = 0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / n);
  }
  if (prim == "TREND") {
    if (x.size() < 2) return Value{};
    double mt = 0, mv = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      mt += times[i];
      mv += x[i];
    }
    mt /= n;
    mv /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += (times[i] - mt) * (x[i] - mv);
      sxx += (times[i] - mt) * (times[i] - mt);
    }
    if (sxx == 0.0) return Value{};
    return sxy / sxx;
  }
  throw ConfigError("unknown aggregation primitive '" + prim + "'");
}

Value transform_value(const std::string& prim, const Value& v) {
  if (is_null(v)) return Value{};
  const Timestamp* t = std::get_if<Timestamp>(&v);
  if (t == nullptr) throw DataError("transform " + prim + " expects a datetime input");
  if (prim == "WEEKEND") return weekday_monday0(*t) >= 5;
  if (prim == "DAY") return static_cast<double>(day_of_month(*t));
  if (prim == "MONTH") return static_cast<double>(month_of_year(*t));
  if (prim == "WEEKDAY") return static_cast<double>(weekday_monday0(*t));
  throw ConfigError("unknown transform primitive '" + prim + "'");
}

// Evaluates features at one cutoff.
class Evaluator {
 public:
  Evaluator(const EntitySet& es, Timestamp cutoff, std::optional<Timestamp> window_start)
      : es_(es), cutoff_(cutoff), window_start_(window_start) {}

  const std::vector<char>& available(const std::string& entity) {
    auto it = available_.find(entity);
    if (it != available_.end()) return it->second;
    std::vector<char> mask(es_.entity(entity).row_count(), 1);
    const auto& eff = es_.effective_times(entity);
    for (std::size_t r = 0; r < mask.size(); ++r)
      if (eff[r] && !(*eff[r] < cutoff_)) mask[r] = 0;
    for (std::size_t ri : es_.parent_relationships(entity)) {
      const auto& parent_mask = available(es_.relationships()[ri].parent_entity);
      for (std::size_t r = 0; r < mask.size(); ++r) {
        auto p = es_.parent_of(ri, r);
        if (p && !parent_mask[*p]) mask[r] = 0;
      }
    }
    return available_.emplace(entity, std::move(mask)).first->second;
  }

  const std::vector<char>& usable(const std::string& entity) {
    auto it = usable_.find(entity);
    if (it != usable_.end()) return it->second;
    std::vector<char> mask = available(entity);
    if (window_start_) {
      const auto& eff = es_.effective_times(entity);
      for (std::size_t r = 0; r < mask.size(); ++r)
        if (eff[r] && *eff[r] < *window_start_) mask[r] = 0;
    }
    return usable_.emplace(entity, std::move(mask)).first->second;
  }

  Value eval(const FeatureDefinition& f, std::size_t row) {
    switch (f.kind) {
      case FeatureDefinition::Kind::Variable:
        return es_.entity(f.entity).column(f.variable)[row];
      case FeatureDefinition::Kind::Transform:
        if (f.primitive == "PERCENTILE") return percentile(f, row);
        return transform_value(f.primitive, eval(f.input(), row));
      case FeatureDefinition::Kind::Aggregation:
        return aggregation(f, row);
    }
    return Value{};
  }

 private:
  const std::vector<std::size_t>& path(const std::string& from, const std::string& to) {
    auto key = from + '\n' + to;
    auto it = paths_.find(key);
    if (it != paths_.end()) return it->second;
    auto p = find_descendant_path(es_, from, to);
    if (!p) throw DataError("SchemaDrift", to, "", 0, "no relationship path from '" + from + "'");
    return paths_.emplace(key, std::move(*p)).first->second;
  }

  Value aggregation(const FeatureDefinition& f, std::size_t row) {
    const FeatureDefinition& input = f.input();
    const std::string& target = base_entity(input);
    std::vector<std::size_t> current{row};
    for (std::size_t ri : path(f.entity, target)) {
      const auto& mask = usable(es_.relationships()[ri].child_entity);
      std::vector<std::size_t> next;
      for (std::size_t r : current)
        for (std::size_t c : es_.children_of(ri, r))
          if (mask[c]) next.push_back(c);
      current = std::move(next);
    }
    const bool needs_time = primitive(f.primitive).needs_time;
    const auto& eff = es_.effective_times(target);
    std::vector<Value> values;
    std::vector<double> times;
    for (std::size_t r : current) {
      Value v = eval(input, r);
      if (is_null(v)) continue;
      if (needs_time) {
        if (!eff[r]) continue;
        times.push_back(static_cast<double>(eff[r]->seconds));
      }
      values.push_back(std::move(v));
    }
    return aggregate(f.primitive, values, times);
  }

  Value percentile(const FeatureDefinition& f, std::size_t row) {
    const std::string key = f.name();
    auto it = ranks_.find(key);
    if (it == ranks_.end()) {
      const auto& mask = usable(f.entity);
      std::vector<std::pair<double, std::size_t>> values;
      for (std::size_t r = 0; r < mask.size(); ++r) {
        if (!mask[r]) continue;
        if (auto d = as_number(eval(f.input(), r))) values.emplace_back(*d, r);
      }
      std::sort(values.begin(), values.end());
      std::vector<double> ranks(mask.size(), std::nan(""));
      const double n = static_cast<double>(values.size());
      for (std::size_t i = 0; i < values.size();) {
        std::size_t j = i;
        while (j < values.size() && values[j].first == values[i].first) ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) ranks[values[k].second] = avg_rank / n;
        i = j;
      }
      it = ranks_.emplace(key, std::move(ranks)).first;
    }
    double v = it->second[row];
    if (std::isnan(v)) return Value{};
    return v;
  }

  const EntitySet& es_;
  Timestamp cutoff_;
  std::optional<Timestamp> window_start_;
  std::unordered_map<std::string, std::vector<char>> available_;
  std::unordered_map<std::string, std::vector<char>> usable_;
  std::unordered_map<std::string, std::vector<std::size_t>> paths_;
  std::unordered_map<std::string, std::vector<double>> ranks_;
};

}  // namespace

FeatureMatrix calculate_feature_matrix(const EntitySet& es, const std::vector<CutoffRow>& rows,
                                       const FeatureList& features, unsigned jobs) {
  if (features.features.empty()) throw ConfigError("feature list is empty");
  const Entity& target = es.entity(features.target_entity);
  FeatureMatrix m;
  for (const auto& f : features.features) {
    check_feature(es, features.target_entity, f);
    m.columns.push_back(f.name());
    m.types.push_back(feature_output_type(es, f));
  }
  std::vector<std::size_t> instance_rows;
  for (const auto& r : rows) {
    auto row = target.find_row(r.instance_id);
    if (!row) throw DataError("UnknownInstance", target.name(), target.index(), 0, r.instance_id);
    instance_rows.push_back(*row);
    m.instance_ids.push_back(r.instance_id);
    m.cutoffs.push_back(r.cutoff);
  }
  m.rows.assign(rows.size(), {});

  std::map<Timestamp, std::vector<std::size_t>> by_cutoff;
  for (std::size_t i = 0; i < rows.size(); ++i) by_cutoff[rows[i].cutoff].push_back(i);
  std::vector<std::pair<Timestamp, std::vector<std::size_t>>> groups(by_cutoff.begin(), by_cutoff.end());

  const auto& window = features.params.training_window;
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t g = begin; g < groups.size(); g += stride) {
      const Timestamp cutoff = groups[g].first;
      Evaluator ev(es, cutoff, window ? std::optional<Timestamp>(cutoff - *window) : std::nullopt);
      const auto& target_available = ev.available(features.target_entity);
      for (std::size_t i : groups[g].second) {
        std::vector<Value> out(features.features.size());
        if (target_available[instance_rows[i]])
          for (std::size_t j = 0; j < features.features.size(); ++j)
            out[j] = ev.eval(features.features[j], instance_rows[i]);
        m.rows[i] = std::move(out);
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(groups.size(), 1))));
  if (jobs == 1) {
    work(0, 1);
  } else {
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> threads;
    for (unsigned j = 0; j < jobs; ++j)
      threads.emplace_back([&, j] {
        try {
          work(j, jobs);
        } catch (...) {
          errors[j] = std::current_exception();
        }
      });
    for (auto& t : threads) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return m;
}

FeatureMatrix calculate_feature_matrix(const EntitySet& es, const std::vector<LabelTime>& label_times,
                                       const FeatureList& features, unsigned jobs) {
  std::vector<CutoffRow> rows;
  std::vector<Label> labels;
  for (const auto& lt : label_times) {
    rows.push_back({lt.instance_id, lt.cutoff_time});
    labels.push_back(lt.label);
  }
  FeatureMatrix m = calculate_feature_matrix(es, rows, features, jobs);
  m.labels = std::move(labels);
  return m;
}

FeatureMatrix calculate_feature_matrix(const EntitySet& es, const LabelTimes& label_times,
                                       const FeatureList& features, unsigned jobs) {
  return calculate_feature_matrix(es, label_times.rows, features, jobs);
}

// ---------------------------------------------------------------- selection

FeatureList select_features(const FeatureList& features, const FeatureMatrix& matrix, std::span<const int> labels,
                            std::size_t n_features, std::uint64_t seed) {
  if (n_features == 0) throw ConfigError("n_features must be positive");
  if (matrix.column_count() != features.features.size())
    throw ConfigError("feature matrix columns do not match the feature list");
  if (n_features >= matrix.column_count()) return features;
  Preprocessor prep = Preprocessor::fit(matrix);
  Matrix x = prep.transform(matrix);
  const Json rf_params = {{"n_estimators", 50}, {"max_features", 0.5}, {"max_depth", 8}, {"criterion", "gini"}};
  std::unique_ptr<Learner> rf;
  try {
    rf = fit_learner("random_forest", rf_params, x, labels, seed);
  } catch (const DegenerateLabelsError& e) {
    throw DegenerateLabelsError(std::string("feature selection needs two label classes; skip feature_selection "
                                            "for this data (") +
                                e.what() + ")");
  }
  std::vector<double> imp = rf->feature_importances();
  std::vector<std::size_t> order(imp.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (imp[a] != imp[b]) return imp[a] > imp[b];
    return matrix.columns[a] < matrix.columns[b];
  });
  std::vector<char> keep(imp.size(), 0);
  for (std::size_t i = 0; i < n_features; ++i) keep[order[i]] = 1;
  FeatureList out = features;
  out.features.clear();
  for (std::size_t i = 0; i < keep.size(); ++i)
    if (keep[i]) out.features.push_back(features.features[i]);
  return out;
}

// ---------------------------------------------------------------- serialization

std::string serialize_feature_list(const FeatureList& fl) {
  Json j;
  j["target_entity"] = fl.target_entity;
  j["features"] = fl.names();
  j["dfs_params"] = fl.params.to_json();
  return dump_canonical(j);
}

FeatureList parse_feature_list(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("feature list JSON syntax error: ") + e.what(), e.byte);
  }
  if (!j.is_object() || !j.contains("features") || !j.at("features").is_array() || !j.contains("target_entity"))
    throw SchemaError("", "feature list must be an object with target_entity and features");
  FeatureList fl;
  fl.target_entity = j.at("target_entity").get<std::string>();
  if (j.contains("dfs_params")) fl.params = DfsParams::from_json(j.at("dfs_params"));
  else fl.params.target_entity = fl.target_entity;
  const Json& names = j.at("features");
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!names[i].is_string()) throw SchemaError("/features/" + std::to_string(i), "expected string");
    fl.features.push_back(parse_feature_name(names[i].get<std::string>(), fl.target_entity));
  }
  return fl;
}

std::string feature_list_hash(const FeatureList& fl) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(serialize_feature_list(fl))));
  return buf;
}

}  // namespace chronoforge
