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

#include "chronoforge/prediction_engineering.hpp"

#include <algorithm>
#include <exception>
#include <thread>

#include "chronoforge/csv.hpp"
#include "chronoforge/rng.hpp"

namespace chronoforge {

std::string render_label(const Label& label) {
  if (const bool* b = std::get_if<bool>(&label)) return *b ? "true" : "false";
  return std::get<std::string>(label);
}

Label parse_label(std::string_view text) {
  if (text == "true") return true;
  if (text == "false") return false;
  return std::string(text);
}

void LabelSearchParams::validate() const {
  if (target_entity.empty()) throw ConfigError("label search: target_entity is required");
  if (prediction_window.seconds() <= 0) throw ConfigError("label search: prediction_window must be > 0");
  if (offset.seconds() <= 0) throw ConfigError("label search: offset must be > 0");
  if (lead.seconds() < 0) throw ConfigError("label search: lead must be >= 0");
  if (gap.seconds() < 0) throw ConfigError("label search: gap must be >= 0");
  if (min_training_data.seconds() < 0) throw ConfigError("label search: min_training_data must be >= 0");
  if (examples_per_instance && *examples_per_instance == 0)
    throw ConfigError("label search: examples_per_instance must be positive");
}

// ---------------------------------------------------------------- InstanceWindow

InstanceWindow::InstanceWindow(const EntitySet& es, std::string target_entity, std::size_t instance_row,
                               Timestamp start, Timestamp end)
    : es_(&es), target_(std::move(target_entity)), row_(instance_row), start_(start), end_(end) {}

const std::string& InstanceWindow::instance_id() const { return es_->entity(target_).index_value(row_); }

std::vector<std::size_t> InstanceWindow::events(std::string_view entity) const {
  auto path = find_descendant_path(*es_, target_, entity);
  if (!path)
    throw ConfigError("entity '" + std::string(entity) + "' is not reachable from '" + target_ + "'");
  const auto& eff = es_->effective_times(entity);
  std::vector<std::size_t> out;
  for (std::size_t r : descendant_rows(*es_, *path, row_)) {
    const auto& t = eff[r];
    if (t && start_ <= *t && *t < end_) out.push_back(r);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------- built-ins

namespace {

std::string require_string_param(const Json& p, const std::string& fn, const std::string& key) {
  if (!p.is_object() || !p.contains(key) || !p.at(key).is_string())
    throw ConfigError("labeling function '" + fn + "' requires string parameter '" + key + "'");
  return p.at(key).get<std::string>();
}

double require_number_param(const Json& p, const std::string& fn, const std::string& key) {
  if (!p.is_object() || !p.contains(key) || !p.at(key).is_number())
    throw ConfigError("labeling function '" + fn + "' requires numeric parameter '" + key + "'");
  return p.at(key).get<double>();
}

void add_path_fields(const EntitySet& es, const std::vector<std::size_t>& path,
                     std::vector<std::pair<std::string, std::string>>& fields) {
  for (std::size_t ri : path) {
    const auto& rel = es.relationships()[ri];
    fields.emplace_back(rel.parent_entity, rel.parent_variable);
    fields.emplace_back(rel.child_entity, rel.child_variable);
  }
}

}  // namespace

LabelingFunction make_labeling_function(const EntitySet& es, const std::string& target_entity,
                                        const std::string& name, const Json& parameters) {
  es.entity(target_entity);
  LabelingFunction f;
  f.name = name;
  const std::string entity = require_string_param(parameters, name, "entity");
  const Entity& ev = es.entity(entity);
  auto path = find_descendant_path(es, target_entity, entity);
  if (!path)
    throw ConfigError("labeling function '" + name + "': entity '" + entity + "' is not reachable from '" +
                      target_entity + "'");
  add_path_fields(es, *path, f.fields_used);
  // Event times of timeless rows come from their time-indexed ancestors.
  if (const auto& ti = es.entity(target_entity).time_index()) f.fields_used.emplace_back(target_entity, *ti);
  for (std::size_t ri : *path) {
    const std::string& child = es.relationships()[ri].child_entity;
    if (const auto& ti = es.entity(child).time_index()) f.fields_used.emplace_back(child, *ti);
  }

  if (name == "exists_event") {
    f.fn = [entity](const InstanceWindow& w) -> std::optional<Label> { return !w.events(entity).empty(); };
  } else if (name == "count_events_threshold") {
    const double threshold = require_number_param(parameters, name, "threshold");
    f.fn = [entity, threshold](const InstanceWindow& w) -> std::optional<Label> {
      return static_cast<double>(w.events(entity).size()) >= threshold;
    };
  } else if (name == "sum_column_threshold") {
    const std::string column = require_string_param(parameters, name, "column");
    const double threshold = require_number_param(parameters, name, "threshold");
    auto col = ev.column_of(column);
    if (!col) throw ConfigError("labeling function '" + name + "': unknown column '" + entity + "." + column + "'");
    f.fields_used.emplace_back(entity, column);
    f.fn = [entity, column, threshold](const InstanceWindow& w) -> std::optional<Label> {
      const auto& values = w.entityset().entity(entity).column(column);
      double sum = 0;
      for (std::size_t r : w.events(entity))
        if (const double* d = std::get_if<double>(&values[r])) sum += *d;
      return sum >= threshold;
    };
  } else {
    throw ConfigError("unknown labeling function '" + name + "'");
  }
  std::sort(f.fields_used.begin(), f.fields_used.end());
  f.fields_used.erase(std::unique(f.fields_used.begin(), f.fields_used.end()), f.fields_used.end());
  return f;
}

// ---------------------------------------------------------------- search

LabelingError::LabelingError(std::string instance_id, Timestamp window_start, const std::string& what)
    : Error("labeling function failed for instance '" + instance_id + "' window starting " +
            format_timestamp(window_start) + ": " + what),
      instance_id_(std::move(instance_id)),
      window_start_(window_start) {}

std::optional<Timestamp> first_event_time(const EntitySet& es, std::string_view entity, std::size_t row) {
  std::optional<Timestamp> first = es.effective_time(entity, row);
  for (std::size_t ri : es.child_relationships(entity)) {
    const std::string& child = es.relationships()[ri].child_entity;
    for (std::size_t c : es.children_of(ri, row)) {
      auto t = first_event_time(es, child, c);
      if (t && (!first || *t < *first)) first = t;
    }
  }
  return first;
}

namespace {

std::optional<Label> evaluate(const EntitySet& es, const LabelingFunction& f, const std::string& target,
                              std::size_t row, Timestamp start, const LabelSearchParams& params) {
  InstanceWindow window(es, target, row, start, start + params.prediction_window);
  std::optional<Label> label;
  try {
    label = f.fn(window);
  } catch (const std::exception& e) {
    throw LabelingError(window.instance_id(), start, e.what());
  }
  if (label && !f.alphabet.empty()) {
    const std::string* token = std::get_if<std::string>(&*label);
    if (token == nullptr || std::find(f.alphabet.begin(), f.alphabet.end(), *token) == f.alphabet.end())
      throw LabelingError(window.instance_id(), start, "label '" + render_label(*label) + "' is outside the declared alphabet");
  }
  return label;
}

std::vector<LabelTime> search_instance(const EntitySet& es, const LabelingFunction& f,
                                       const LabelSearchParams& params, const std::vector<Timestamp>& grid,
                                       std::size_t row) {
  const Entity& target = es.entity(params.target_entity);
  const std::string& id = target.index_value(row);
  std::vector<Timestamp> order = grid;
  if (params.strategy == SearchStrategy::Random) {
    Rng rng(params.seed, fnv1a(id));
    rng.shuffle(order);
  }
  std::optional<Timestamp> first;
  if (params.min_training_data.seconds() > 0) first = first_event_time(es, params.target_entity, row);

  std::vector<LabelTime> emitted;
  for (Timestamp t : order) {
    if (params.examples_per_instance && emitted.size() >= *params.examples_per_instance) break;
    const Timestamp cutoff = t - params.lead;
    if (params.min_training_data.seconds() > 0) {
      if (!first || cutoff.seconds - first->seconds < params.min_training_data.seconds()) continue;
    }
    bool spaced = std::all_of(emitted.begin(), emitted.end(), [&](const LabelTime& e) {
      std::int64_t d = cutoff.seconds - e.cutoff_time.seconds;
      return (d < 0 ? -d : d) >= params.gap.seconds();
    });
    if (!spaced) continue;
    auto label = evaluate(es, f, params.target_entity, row, t, params);
    if (!label) continue;
    emitted.push_back({id, std::move(*label), cutoff});
  }
  return emitted;
}

}  // namespace

std::optional<LabelTime> apply_labeling_function(const EntitySet& es, const LabelingFunction& f,
                                                 std::string_view instance_id, Timestamp timestamp,
                                                 const LabelSearchParams& params) {
  const Entity& target = es.entity(params.target_entity);
  auto row = target.find_row(instance_id);
  if (!row) throw DataError("UnknownInstance", target.name(), target.index(), 0, std::string(instance_id));
  auto label = evaluate(es, f, params.target_entity, *row, timestamp, params);
  if (!label) return std::nullopt;
  return LabelTime{std::string(instance_id), std::move(*label), timestamp - params.lead};
}

LabelTimes search_training_examples(const EntitySet& es, const LabelingFunction& f,
                                    const LabelSearchParams& params, SearchRange range, unsigned jobs) {
  params.validate();
  if (!(range.start < range.end)) throw ConfigError("label search: range start must precede end");
  const Entity& target = es.entity(params.target_entity);
  bool timed = target.time_index().has_value();
  for (const auto& e : es.entities())
    if (e.time_index() && find_descendant_path(es, target.name(), e.name())) timed = true;
  if (!timed)
    throw ConfigError("label search: target entity '" + target.name() +
                      "' has no time index and no time-indexed descendants");

  std::vector<Timestamp> grid;
  const Timestamp last = range.end - params.prediction_window;
  for (Timestamp t = range.start; t <= last; t = t + params.offset) grid.push_back(t);

  const std::size_t n = target.row_count();
  std::vector<std::vector<LabelTime>> per_instance(n);
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t r = begin; r < n; r += stride) {
      try {
        per_instance[r] = search_instance(es, f, params, grid, r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> threads;
    for (unsigned j = 0; j < jobs; ++j) threads.emplace_back(work, j, jobs);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  LabelTimes out;
  out.target_entity = params.target_entity;
  out.search_params = params;
  for (auto& rows : per_instance)
    for (auto& r : rows) out.rows.push_back(std::move(r));
  std::sort(out.rows.begin(), out.rows.end(), [](const LabelTime& a, const LabelTime& b) {
    if (a.cutoff_time != b.cutoff_time) return a.cutoff_time < b.cutoff_time;
    return a.instance_id < b.instance_id;
  });
  return out;
}

void write_label_times_csv(const LabelTimes& lt, const std::filesystem::path& path) {
  csv::Table t;
  t.header = {"instance_id", "label", "cutoff_time"};
  for (const auto& r : lt.rows) t.rows.push_back({r.instance_id, render_label(r.label), format_timestamp(r.cutoff_time)});
  csv::write_file(path, t);
}

std::vector<LabelTime> read_label_times_csv(const std::filesystem::path& path) {
  csv::Table t = csv::read_file(path);
  if (t.header != std::vector<std::string>{"instance_id", "label", "cutoff_time"})
    throw DataError("label-times file " + path.string() + " must have header instance_id,label,cutoff_time");
  std::vector<LabelTime> rows;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    auto ts = try_parse_timestamp(t.rows[i][2]);
    if (!ts) throw DataError("TypeViolation", path.filename().string(), "cutoff_time", i + 1, t.rows[i][2]);
    rows.push_back({t.rows[i][0], parse_label(t.rows[i][1]), *ts});
  }
  return rows;
}

}  // namespace chronoforge
