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

#include "chronoforge/json_format.hpp"

namespace chronoforge {

enum class SemanticType {
  Index,
  Id,
  TimeIndex,
  Numeric,
  Categorical,
  Boolean,
  Datetime,
  Text,
  Latitude,
  Longitude,
};

std::string_view to_string(SemanticType t);
std::optional<SemanticType> semantic_type_from_string(std::string_view s);

struct VariableSpec {
  std::string name;
  SemanticType semantic_type = SemanticType::Numeric;
  Json extra = Json::object();  // unrecognised keys, kept verbatim

  friend bool operator==(const VariableSpec&, const VariableSpec&) = default;
};

struct EntitySpec {
  std::string name;
  std::string index;
  std::optional<std::string> time_index;
  std::vector<VariableSpec> variables;
  Json extra = Json::object();

  const VariableSpec* find(std::string_view variable) const;

  friend bool operator==(const EntitySpec&, const EntitySpec&) = default;
};

struct RelationshipSpec {
  std::string parent_entity;
  std::string parent_variable;
  std::string child_entity;
  std::string child_variable;

  friend bool operator==(const RelationshipSpec&, const RelationshipSpec&) = default;
};

// Parsed metadata.json: the entities, their variables and semantic types,
// and the parent/child relationships between them.
struct MetadataDocument {
  std::string entityset_name;
  std::vector<EntitySpec> entities;
  std::vector<RelationshipSpec> relationships;
  Json extra = Json::object();

  const EntitySpec* find(std::string_view entity) const;

  friend bool operator==(const MetadataDocument&, const MetadataDocument&) = default;
};

// Valid identifiers are non-empty and contain none of ". ( ) \n".
bool is_valid_identifier(std::string_view name);

// Throws SchemaError (with a JSON pointer) on any structural violation.
void validate_metadata(const MetadataDocument& doc);

MetadataDocument parse_metadata(std::string_view text);
MetadataDocument metadata_from_json(const Json& j);
Json metadata_to_json(const MetadataDocument& doc);
std::string emit_metadata(const MetadataDocument& doc);

MetadataDocument load_metadata_file(const std::string& path);

}  // namespace chronoforge
