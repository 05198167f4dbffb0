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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chronoforge/metadata.hpp"

namespace chronoforge {

enum class PrimitiveKind { Aggregation, Transform };

struct Primitive {
  std::string name;
  PrimitiveKind kind;
  std::vector<SemanticType> input_types;
  SemanticType output_type;
  bool needs_time = false;  // TREND regresses on the rows' times

  bool accepts(SemanticType t) const;
};

// Registry of built-in primitives. Aggregations: COUNT SUM MEAN MIN MAX STD
// NUM_UNIQUE PERCENT TREND. Transforms: WEEKEND DAY MONTH WEEKDAY PERCENTILE.
const std::vector<Primitive>& primitive_registry();
const Primitive* find_primitive(std::string_view name);
const Primitive& primitive(std::string_view name);  // throws ConfigError

// A computable feature as a tree. Every node yields one value per row of
// `entity`:
//   Variable     raw column `variable` of `entity`
//   Transform    primitive over one input on the same entity
//   Aggregation  primitive over one input living on a descendant entity,
//                joined along the relationship path from `entity` down to it
struct FeatureDefinition {
  enum class Kind { Variable, Transform, Aggregation };

  Kind kind = Kind::Variable;
  std::string primitive;
  std::string entity;
  std::string variable;
  std::vector<FeatureDefinition> inputs;  // one element for Transform/Aggregation

  static FeatureDefinition variable_ref(std::string entity, std::string variable);
  static FeatureDefinition transform(std::string primitive, FeatureDefinition input);
  static FeatureDefinition aggregation(std::string primitive, std::string entity, FeatureDefinition input);

  const FeatureDefinition& input() const { return inputs.front(); }
  int primitive_count() const;

  // Canonical name, e.g. MEAN(orders_products.Price),
  // PERCENT(WEEKEND(orders.Timestamp)), MEAN(orders.MEAN(orders_products.Price)).
  std::string name() const;

  friend bool operator==(const FeatureDefinition&, const FeatureDefinition&) = default;
};

// Inverse of FeatureDefinition::name(). The top-level node is placed on
// target_entity. Throws ParseError with the offending byte position.
FeatureDefinition parse_feature_name(std::string_view name, const std::string& target_entity);

}  // namespace chronoforge
