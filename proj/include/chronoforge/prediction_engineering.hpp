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
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "chronoforge/entityset.hpp"
#include "chronoforge/json_format.hpp"
#include "chronoforge/time.hpp"

namespace chronoforge {

// Boolean outcome or a categorical token.
using Label = std::variant<bool, std::string>;

std::string render_label(const Label& label);
Label parse_label(std::string_view text);

enum class SearchStrategy { Fixed, Random };

struct LabelSearchParams {
  std::string target_entity;
  Duration prediction_window = Duration::parse("1 days");
  Duration lead;
  Duration gap;
  std::optional<std::size_t> examples_per_instance;  // nullopt: unlimited
  Duration min_training_data;
  SearchStrategy strategy = SearchStrategy::Fixed;
  Duration offset = Duration::parse("1 days");
  std::uint64_t seed = 0;

  // Throws ConfigError.
  void validate() const;
};

// What a labeling function may look at: one instance of the target entity and
// one window [start, end).
class InstanceWindow {
 public:
  InstanceWindow(const EntitySet& es, std::string target_entity, std::size_t instance_row, Timestamp start,
                 Timestamp end);

  const EntitySet& entityset() const noexcept { return *es_; }
  const std::string& target_entity() const noexcept { return target_; }
  const std::string& instance_id() const;
  std::size_t instance_row() const noexcept { return row_; }
  Timestamp start() const noexcept { return start_; }
  Timestamp end() const noexcept { return end_; }

  // Rows of `entity` (the target itself or a descendant) joined to the
  // instance whose effective time lies inside the window, in row order.
  std::vector<std::size_t> events(std::string_view entity) const;

 private:
  const EntitySet* es_;
  std::string target_;
  std::size_t row_;
  Timestamp start_;
  Timestamp end_;
};

struct LabelingFunction {
  std::string name;
  std::function<std::optional<Label>(const InstanceWindow&)> fn;
  // (entity, variable) pairs the function reads.
  std::vector<std::pair<std::string, std::string>> fields_used;
  // Allowed categorical tokens; empty when labels are boolean.
  std::vector<std::string> alphabet;
};

// Built-ins: exists_event {entity}, count_events_threshold {entity, threshold},
// sum_column_threshold {entity, column, threshold}.
LabelingFunction make_labeling_function(const EntitySet& es, const std::string& target_entity,
                                        const std::string& name, const Json& parameters);

struct LabelTime {
  std::string instance_id;
  Label label;
  Timestamp cutoff_time;

  friend bool operator==(const LabelTime&, const LabelTime&) = default;
};

struct LabelTimes {
  std::string target_entity;
  LabelSearchParams search_params;
  std::vector<LabelTime> rows;  // sorted by (cutoff_time, instance_id)
};

// The labeling function threw; carries where.
class LabelingError : public Error {
 public:
  LabelingError(std::string instance_id, Timestamp window_start, const std::string& what);
  const std::string& instance_id() const noexcept { return instance_id_; }
  Timestamp window_start() const noexcept { return window_start_; }

 private:
  std::string instance_id_;
  Timestamp window_start_;
};

struct SearchRange {
  Timestamp start;
  Timestamp end;  // exclusive
};

// Evaluates f over [timestamp, timestamp + prediction_window) for one
// instance. Returns the (label, cutoff = timestamp - lead) pair, or nullopt
// when f yields no label.
std::optional<LabelTime> apply_labeling_function(const EntitySet& es, const LabelingFunction& f,
                                                 std::string_view instance_id, Timestamp timestamp,
                                                 const LabelSearchParams& params);

// Scans every instance of the target entity over the candidate grid
// {start + k * offset} within [start, end - prediction_window]. Instances
// are independent, so the number of worker threads never change the output.
LabelTimes search_training_examples(const EntitySet& es, const LabelingFunction& f,
                                    const LabelSearchParams& params, SearchRange range, unsigned jobs = 1);

// Earliest effective time among the instance's own row and all its descendants.
std::optional<Timestamp> first_event_time(const EntitySet& es, std::string_view entity, std::size_t row);

void write_label_times_csv(const LabelTimes& lt, const std::filesystem::path& path);
std::vector<LabelTime> read_label_times_csv(const std::filesystem::path& path);

}  // namespace chronoforge
