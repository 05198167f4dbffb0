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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "chronoforge/error.hpp"
#include "chronoforge/json_format.hpp"

namespace chronoforge {

// Dense row-major design matrix. No missing values: imputation happens first.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

// Training labels contain a single class.
class DegenerateLabelsError : public Error {
 public:
  using Error::Error;
};

// Registered method key is unknown (e.g. an MLP spec with no learner behind it).
class UnknownMethodError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class Learner {
 public:
  virtual ~Learner() = default;
  virtual const std::string& method_key() const = 0;
  // Probability-like score of the positive class, in [0, 1].
  virtual double score(std::span<const double> x) const = 0;
  // Normalised per-feature importance; sums to 1 unless all zero.
  virtual std::vector<double> feature_importances() const = 0;
  virtual Json to_json() const = 0;
};

// Canonical learner keys: decision_tree, random_forest, logistic_regression.
// Also accepts the sklearn class paths and short names as aliases.
std::string resolve_method_key(const std::string& name_or_alias);
bool is_registered_method(const std::string& method_key);

// Hyperparameters are a JSON object of name -> value; absent names take defaults.
std::unique_ptr<Learner> fit_learner(const std::string& method_key, const Json& hyperparameters,
                                     const Matrix& x, std::span<const int> y, std::uint64_t seed);

std::vector<double> predict_scores(const Learner& learner, const Matrix& x);

std::unique_ptr<Learner> learner_from_json(const Json& j);

}  // namespace chronoforge
