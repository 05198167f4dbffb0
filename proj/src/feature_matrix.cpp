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

#include "chronoforge/feature_matrix.hpp"

#include "chronoforge/csv.hpp"

namespace chronoforge {

std::optional<std::size_t> FeatureMatrix::column_of(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  return std::nullopt;
}

FeatureMatrix FeatureMatrix::select_columns(const std::vector<std::string>& names) const {
  FeatureMatrix out;
  std::vector<std::size_t> idx;
  for (const auto& n : names) {
    auto c = column_of(n);
    if (!c) throw ConfigError("feature matrix has no column '" + n + "'");
    idx.push_back(*c);
    out.columns.push_back(n);
    out.types.push_back(types[*c]);
  }
  for (const auto& row : rows) {
    std::vector<Value> r;
    for (std::size_t c : idx) r.push_back(row[c]);
    out.rows.push_back(std::move(r));
  }
  out.instance_ids = instance_ids;
  out.cutoffs = cutoffs;
  out.labels = labels;
  return out;
}

std::vector<int> binary_labels(const std::vector<Label>& labels) {
  std::vector<int> y;
  y.reserve(labels.size());
  for (const auto& l : labels) {
    const bool* b = std::get_if<bool>(&l);
    if (b == nullptr) throw ConfigError("model search requires boolean labels, got '" + render_label(l) + "'");
    y.push_back(*b ? 1 : 0);
  }
  return y;
}

void write_feature_matrix_csv(const FeatureMatrix& m, const std::filesystem::path& path) {
  csv::Table t;
  t.header = m.columns;
  if (m.labels) t.header.push_back("label");
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    std::vector<std::string> row;
    for (const auto& v : m.rows[r]) row.push_back(render_value(v));
    if (m.labels) row.push_back(render_label((*m.labels)[r]));
    t.rows.push_back(std::move(row));
  }
  csv::write_file(path, t);
}

FeatureMatrix read_feature_matrix_csv(const std::filesystem::path& path, const std::vector<SemanticType>& types,
                                      const std::vector<LabelTime>& label_times) {
  csv::Table t = csv::read_file(path);
  FeatureMatrix m;
  bool has_label = !t.header.empty() && t.header.back() == "label";
  std::size_t n_features = t.header.size() - (has_label ? 1 : 0);
  if (n_features != types.size())
    throw DataError("feature matrix " + path.string() + " has " + std::to_string(n_features) +
                    " feature columns, feature list has " + std::to_string(types.size()));
  if (t.rows.size() != label_times.size())
    throw DataError("feature matrix " + path.string() + " has " + std::to_string(t.rows.size()) +
                    " rows, label times have " + std::to_string(label_times.size()));
  m.columns.assign(t.header.begin(), t.header.begin() + static_cast<std::ptrdiff_t>(n_features));
  m.types = types;
  if (has_label) m.labels.emplace();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    std::vector<Value> row;
    for (std::size_t c = 0; c < n_features; ++c) {
      auto v = parse_value(types[c], t.rows[r][c]);
      if (!v) throw DataError("TypeViolation", path.filename().string(), m.columns[c], r + 1, t.rows[r][c]);
      row.push_back(std::move(*v));
    }
    m.rows.push_back(std::move(row));
    m.instance_ids.push_back(label_times[r].instance_id);
    m.cutoffs.push_back(label_times[r].cutoff_time);
    if (has_label) m.labels->push_back(parse_label(t.rows[r].back()));
  }
  return m;
}

}  // namespace chronoforge
