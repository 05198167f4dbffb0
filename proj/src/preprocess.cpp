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

#include "chronoforge/preprocess.hpp"

#include <algorithm>
#include <map>


namespace chronoforge {

// ---------------------------------------------------------------- Preprocessor

Preprocessor Preprocessor::fit(const FeatureMatrix& train) {
  Preprocessor p;
  for (std::size_t c = 0; c < train.column_count(); ++c) {
    ColumnPreparation prep;
    prep.name = train.columns[c];
    prep.type = train.types[c];
    if (prep.type == SemanticType::Numeric) {
      std::vector<double> values;
      for (const auto& row : train.rows)
        if (const double* d = std::get_if<double>(&row[c])) values.push_back(*d);
      std::sort(values.begin(), values.end());
      if (!values.empty()) {
        std::size_t n = values.size();
        prep.fill = n % 2 ? values[n / 2] : values[n / 2 - 1] + (values[n / 2] - values[n / 2 - 1]) / 2.0;
      }
    } else if (prep.type == SemanticType::Boolean) {
      std::size_t t = 0, f = 0;
      for (const auto& row : train.rows)
        if (const bool* b = std::get_if<bool>(&row[c])) (*b ? t : f)++;
      prep.fill = t > f ? 1.0 : 0.0;
    } else {
      std::map<std::string, std::size_t> counts;
      for (const auto& row : train.rows)
        if (!is_null(row[c])) counts[render_value(row[c])]++;
      for (const auto& [token, n] : counts) prep.vocabulary.push_back(token);
      prep.fill = static_cast<double>(prep.vocabulary.size());
      std::size_t best = 0;
      for (std::size_t i = 0; i < prep.vocabulary.size(); ++i) {
        std::size_t n = counts[prep.vocabulary[i]];
        if (n > best) {
          best = n;
          prep.fill = static_cast<double>(i);
        }
      }
    }
    p.columns_.push_back(std::move(prep));
  }
  return p;
}

Matrix Preprocessor::transform(const FeatureMatrix& m) const {
  if (m.column_count() != columns_.size())
    throw ConfigError("preprocessor expects " + std::to_string(columns_.size()) + " columns, got " +
                      std::to_string(m.column_count()));
  Matrix x(m.row_count(), columns_.size());
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    const auto& prep = columns_[c];
    if (m.columns[c] != prep.name)
      throw ConfigError("column " + std::to_string(c) + " is '" + m.columns[c] + "', expected '" + prep.name + "'");
    for (std::size_t r = 0; r < m.row_count(); ++r) {
      const Value& v = m.rows[r][c];
      double out = prep.fill;
      if (const double* d = std::get_if<double>(&v)) {
        out = *d;
      } else if (const bool* b = std::get_if<bool>(&v)) {
        out = *b ? 1.0 : 0.0;
      } else if (!is_null(v)) {
        const std::string token = render_value(v);
        auto it = std::lower_bound(prep.vocabulary.begin(), prep.vocabulary.end(), token);
        out = (it != prep.vocabulary.end() && *it == token)
                  ? static_cast<double>(it - prep.vocabulary.begin())
                  : static_cast<double>(prep.vocabulary.size());
      }
      x.at(r, c) = out;
    }
  }
  return x;
}

Json Preprocessor::to_json() const {
  Json arr = Json::array();
  for (const auto& c : columns_) {
    Json j = {{"name", c.name}, {"type", std::string(to_string(c.type))}, {"fill", c.fill}};
    if (c.type == SemanticType::Categorical) j["vocabulary"] = c.vocabulary;
    arr.push_back(std::move(j));
  }
  return arr;
}

Preprocessor Preprocessor::from_json(const Json& j) {
  Preprocessor p;
  for (const auto& cj : j) {
    ColumnPreparation c;
    c.name = cj.at("name").get<std::string>();
    auto t = semantic_type_from_string(cj.at("type").get<std::string>());
    if (!t) throw DataError("unknown column type in preprocessing state");
    c.type = *t;
    c.fill = cj.at("fill").get<double>();
    if (cj.contains("vocabulary")) c.vocabulary = cj.at("vocabulary").get<std::vector<std::string>>();
    p.columns_.push_back(std::move(c));
  }
  return p;
}

}  // namespace chronoforge
