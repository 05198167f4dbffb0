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

#include "chronoforge/feature_definition.hpp"

#include <algorithm>

#include "chronoforge/error.hpp"

namespace chronoforge {

bool Primitive::accepts(SemanticType t) const {
  return std::find(input_types.begin(), input_types.end(), t) != input_types.end();
}

const std::vector<Primitive>& primitive_registry() {
  using S = SemanticType;
  using K = PrimitiveKind;
  static const std::vector<Primitive> registry = {
      {"COUNT", K::Aggregation, {S::Numeric, S::Categorical, S::Boolean}, S::Numeric},
      {"SUM", K::Aggregation, {S::Numeric}, S::Numeric},
      {"MEAN", K::Aggregation, {S::Numeric}, S::Numeric},
      {"MIN", K::Aggregation, {S::Numeric}, S::Numeric},
      {"MAX", K::Aggregation, {S::Numeric}, S::Numeric},
      {"STD", K::Aggregation, {S::Numeric}, S::Numeric},
      {"NUM_UNIQUE", K::Aggregation, {S::Numeric, S::Categorical, S::Boolean}, S::Numeric},
      {"PERCENT", K::Aggregation, {S::Boolean}, S::Numeric},
      {"TREND", K::Aggregation, {S::Numeric}, S::Numeric, true},
      {"WEEKEND", K::Transform, {S::Datetime, S::TimeIndex}, S::Boolean},
      {"DAY", K::Transform, {S::Datetime, S::TimeIndex}, S::Numeric},
      {"MONTH", K::Transform, {S::Datetime, S::TimeIndex}, S::Numeric},
      {"WEEKDAY", K::Transform, {S::Datetime, S::TimeIndex}, S::Numeric},
      {"PERCENTILE", K::Transform, {S::Numeric}, S::Numeric},
  };
  return registry;
}

const Primitive* find_primitive(std::string_view name) {
  for (const auto& p : primitive_registry())
    if (p.name == name) return &p;
  return nullptr;
}

const Primitive& primitive(std::string_view name) {
  if (const Primitive* p = find_primitive(name)) return *p;
  throw ConfigError("unknown primitive '" + std::string(name) + "'");
}

FeatureDefinition FeatureDefinition::variable_ref(std::string entity, std::string variable) {
  FeatureDefinition f;
  f.kind = Kind::Variable;
  f.entity = std::move(entity);
  f.variable = std::move(variable);
  return f;
}

FeatureDefinition FeatureDefinition::transform(std::string primitive, FeatureDefinition input) {
  FeatureDefinition f;
  f.kind = Kind::Transform;
  f.primitive = std::move(primitive);
  f.entity = input.entity;
  f.inputs.push_back(std::move(input));
  return f;
}

FeatureDefinition FeatureDefinition::aggregation(std::string primitive, std::string entity,
                                                 FeatureDefinition input) {
  FeatureDefinition f;
  f.kind = Kind::Aggregation;
  f.primitive = std::move(primitive);
  f.entity = std::move(entity);
  f.inputs.push_back(std::move(input));
  return f;
}

int FeatureDefinition::primitive_count() const {
  if (kind == Kind::Variable) return 0;
  return 1 + input().primitive_count();
}

namespace {

std::string render_argument(const FeatureDefinition& f) {
  if (f.kind == FeatureDefinition::Kind::Aggregation) return f.entity + "." + f.name();
  return f.name();
}

class NameParser {
 public:
  NameParser(std::string_view text, std::string target) : text_(text), target_(std::move(target)) {}

  FeatureDefinition parse() {
    FeatureDefinition f = expression(target_);
    if (pos_ != text_.size()) fail("unexpected trailing characters");
    if (f.kind == FeatureDefinition::Kind::Variable) fail("feature name must apply a primitive");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("malformed feature name '" + std::string(text_) + "': " + what, pos_);
  }

  // Length of a primitive token at pos_ followed by '(' , or 0.
  std::size_t primitive_token_length(std::size_t at) const {
    std::size_t i = at;
    while (i < text_.size() && ((text_[i] >= 'A' && text_[i] <= 'Z') || (text_[i] >= '0' && text_[i] <= '9') ||
                                text_[i] == '_'))
      ++i;
    if (i == at || i >= text_.size() || text_[i] != '(') return 0;
    return i - at;
  }

  // PRIM '(' argument ')'
  FeatureDefinition expression(const std::string& entity) {
    std::size_t len = primitive_token_length(pos_);
    if (len == 0) fail("expected PRIMITIVE(");
    std::string name(text_.substr(pos_, len));
    const Primitive* prim = find_primitive(name);
    if (prim == nullptr) fail("unknown primitive '" + name + "'");
    pos_ += len + 1;
    FeatureDefinition arg = argument();
    if (pos_ >= text_.size() || text_[pos_] != ')') fail("expected ')'");
    ++pos_;
    if (prim->kind == PrimitiveKind::Transform) {
      if (arg.kind != FeatureDefinition::Kind::Variable) fail("transform input must be a variable");
      return FeatureDefinition::transform(name, std::move(arg));
    }
    return FeatureDefinition::aggregation(name, entity, std::move(arg));
  }

  // expression | entity '.' (expression | column)
  FeatureDefinition argument() {
    if (primitive_token_length(pos_) != 0) {
      std::size_t at = pos_;
      FeatureDefinition inner = expression("");
      if (inner.kind == FeatureDefinition::Kind::Aggregation) {
        pos_ = at;
        fail("nested aggregation must be qualified with its entity");
      }
      return inner;
    }
    std::size_t dot = text_.find('.', pos_);
    std::size_t stop = text_.find_first_of("()", pos_);
    if (dot == std::string_view::npos || (stop != std::string_view::npos && stop < dot)) {
      pos_ = std::min(text_.size(), stop == std::string_view::npos ? text_.size() : stop);
      fail("expected entity.column");
    }
    std::string entity(text_.substr(pos_, dot - pos_));
    if (entity.empty()) fail("empty entity name");
    pos_ = dot + 1;
    if (primitive_token_length(pos_) != 0) {
      std::size_t at = pos_;
      FeatureDefinition inner = expression(entity);
      if (inner.kind != FeatureDefinition::Kind::Aggregation) {
        pos_ = at;
        fail("only aggregations are entity-qualified");
      }
      return inner;
    }
    std::size_t close = text_.find_first_of("()", pos_);
    if (close == std::string_view::npos || text_[close] != ')') {
      pos_ = close == std::string_view::npos ? text_.size() : close;
      fail("expected ')' after column name");
    }
    std::string column(text_.substr(pos_, close - pos_));
    if (column.empty()) fail("empty column name");
    pos_ = close;
    return FeatureDefinition::variable_ref(std::move(entity), std::move(column));
  }

  std::string_view text_;
  std::string target_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string FeatureDefinition::name() const {
  switch (kind) {
    case Kind::Variable:
      return entity + "." + variable;
    case Kind::Transform:
    case Kind::Aggregation:
      return primitive + "(" + render_argument(input()) + ")";
  }
  return {};
}

FeatureDefinition parse_feature_name(std::string_view name, const std::string& target_entity) {
  return NameParser(name, target_entity).parse();
}

}  // namespace chronoforge
