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

#include "chronoforge/metadata.hpp"

#include <array>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "chronoforge/error.hpp"

namespace chronoforge {
namespace {

constexpr std::array<std::pair<SemanticType, std::string_view>, 10> kTypeNames{{
    {SemanticType::Index, "index"},
    {SemanticType::Id, "id"},
    {SemanticType::TimeIndex, "time_index"},
    {SemanticType::Numeric, "numeric"},
    {SemanticType::Categorical, "categorical"},
    {SemanticType::Boolean, "boolean"},
    {SemanticType::Datetime, "datetime"},
    {SemanticType::Text, "text"},
    {SemanticType::Latitude, "latitude"},
    {SemanticType::Longitude, "longitude"},
}};

std::string ptr(const std::string& base, const std::string& key) {
  std::string escaped;
  for (char c : key) {
    if (c == '~')
      escaped += "~0";
    else if (c == '/')
      escaped += "~1";
    else
      escaped += c;
  }
  return base + "/" + escaped;
}

std::string ptr(const std::string& base, std::size_t i) { return base + "/" + std::to_string(i); }

const Json& require(const Json& obj, const std::string& base, const std::string& key) {
  if (!obj.contains(key)) throw SchemaError(ptr(base, key), "required key missing");
  return obj.at(key);
}

std::string require_string(const Json& obj, const std::string& base, const std::string& key) {
  const Json& v = require(obj, base, key);
  if (!v.is_string()) throw SchemaError(ptr(base, key), "expected string");
  return v.get<std::string>();
}

Json extras(const Json& obj, std::initializer_list<std::string_view> known) {
  Json out = Json::object();
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool is_known = false;
    for (auto k : known) is_known = is_known || it.key() == k;
    if (!is_known) out[it.key()] = it.value();
  }
  return out;
}

}  // namespace

std::string_view to_string(SemanticType t) {
  for (const auto& [type, name] : kTypeNames)
    if (type == t) return name;
  return "unknown";
}

std::optional<SemanticType> semantic_type_from_string(std::string_view s) {
  for (const auto& [type, name] : kTypeNames)
    if (name == s) return type;
  return std::nullopt;
}

const VariableSpec* EntitySpec::find(std::string_view variable) const {
  for (const auto& v : variables)
    if (v.name == variable) return &v;
  return nullptr;
}

const EntitySpec* MetadataDocument::find(std::string_view entity) const {
  for (const auto& e : entities)
    if (e.name == entity) return &e;
  return nullptr;
}

bool is_valid_identifier(std::string_view name) {
  return !name.empty() && name.find_first_of(".()\n") == std::string_view::npos;
}

void validate_metadata(const MetadataDocument& doc) {
  std::set<std::string> entity_names;
  for (std::size_t i = 0; i < doc.entities.size(); ++i) {
    const auto& e = doc.entities[i];
    const std::string base = ptr("/entities", i);
    if (!is_valid_identifier(e.name)) throw SchemaError(ptr(base, "name"), "invalid entity name");
    if (!entity_names.insert(e.name).second)
      throw SchemaError(ptr(base, "name"), "duplicate entity name '" + e.name + "'");

    std::set<std::string> var_names;
    int index_count = 0;
    int time_count = 0;
    for (std::size_t j = 0; j < e.variables.size(); ++j) {
      const auto& v = e.variables[j];
      const std::string vbase = ptr(ptr(base, "variables"), j);
      if (!is_valid_identifier(v.name))
        throw SchemaError(ptr(vbase, "name"), "invalid variable name");
      if (!var_names.insert(v.name).second)
        throw SchemaError(ptr(vbase, "name"), "duplicate variable name '" + v.name + "'");
      if (v.semantic_type == SemanticType::Index) ++index_count;
      if (v.semantic_type == SemanticType::TimeIndex) {
        ++time_count;
        if (e.time_index != v.name)
          throw SchemaError(ptr(vbase, "semantic_type"),
                            "time_index variable '" + v.name + "' is not the entity time_index");
      }
    }
    const VariableSpec* index = e.find(e.index);
    if (index == nullptr)
      throw SchemaError(ptr(base, "index"), "index '" + e.index + "' is not a declared variable");
    if (index->semantic_type != SemanticType::Index || index_count != 1)
      throw SchemaError(ptr(base, "index"),
                        "entity must have exactly one variable of semantic_type index, named by "
                        "'index'");
    if (e.time_index) {
      const VariableSpec* t = e.find(*e.time_index);
      if (t == nullptr || t->semantic_type != SemanticType::TimeIndex)
        throw SchemaError(ptr(base, "time_index"),
                          "time_index '" + *e.time_index +
                              "' must name a declared variable of semantic_type time_index");
    }
    if (time_count > 1) throw SchemaError(ptr(base, "variables"), "more than one time_index variable");
  }

  std::map<std::string, std::vector<std::string>> parents_of;
  for (std::size_t i = 0; i < doc.relationships.size(); ++i) {
    const auto& r = doc.relationships[i];
    const std::string base = ptr("/relationships", i);
    const EntitySpec* parent = doc.find(r.parent_entity);
    if (parent == nullptr)
      throw SchemaError(ptr(base, "parent_entity"), "undeclared entity '" + r.parent_entity + "'");
    const EntitySpec* child = doc.find(r.child_entity);
    if (child == nullptr)
      throw SchemaError(ptr(base, "child_entity"), "undeclared entity '" + r.child_entity + "'");
    if (parent->index != r.parent_variable)
      throw SchemaError(ptr(base, "parent_variable"),
                        "'" + r.parent_variable + "' is not the index of '" + r.parent_entity + "'");
    if (child->find(r.child_variable) == nullptr)
      throw SchemaError(ptr(base, "child_variable"),
                        "'" + r.child_variable + "' is not a variable of '" + r.child_entity + "'");
    parents_of[r.child_entity].push_back(r.parent_entity);
  }

  // child -> parent edges must form a DAG
  std::map<std::string, int> state;  // 0 unvisited, 1 on stack, 2 done
  std::function<void(const std::string&)> visit = [&](const std::string& node) {
    state[node] = 1;
    for (const auto& p : parents_of[node]) {
      if (state[p] == 1) throw SchemaError("/relationships", "relationship graph has a cycle through '" + p + "'");
      if (state[p] == 0) visit(p);
    }
    state[node] = 2;
  };
  for (const auto& e : doc.entities)
    if (state[e.name] == 0) visit(e.name);
}

MetadataDocument metadata_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("", "metadata document must be an object");
  MetadataDocument doc;
  doc.entityset_name = require_string(j, "", "entityset_name");
  const Json& entities = require(j, "", "entities");
  if (!entities.is_array()) throw SchemaError("/entities", "expected array");
  for (std::size_t i = 0; i < entities.size(); ++i) {
    const Json& ej = entities[i];
    const std::string base = ptr("/entities", i);
    if (!ej.is_object()) throw SchemaError(base, "expected object");
    EntitySpec e;
    e.name = require_string(ej, base, "name");
    e.index = require_string(ej, base, "index");
    if (ej.contains("time_index") && !ej.at("time_index").is_null()) {
      if (!ej.at("time_index").is_string()) throw SchemaError(ptr(base, "time_index"), "expected string");
      e.time_index = ej.at("time_index").get<std::string>();
    }
    const Json& vars = require(ej, base, "variables");
    if (!vars.is_array()) throw SchemaError(ptr(base, "variables"), "expected array");
    for (std::size_t k = 0; k < vars.size(); ++k) {
      const std::string vbase = ptr(ptr(base, "variables"), k);
      const Json& vj = vars[k];
      if (!vj.is_object()) throw SchemaError(vbase, "expected object");
      VariableSpec v;
      v.name = require_string(vj, vbase, "name");
      const std::string type = require_string(vj, vbase, "semantic_type");
      auto parsed = semantic_type_from_string(type);
      if (!parsed) throw SchemaError(ptr(vbase, "semantic_type"), "unknown semantic_type '" + type + "'");
      v.semantic_type = *parsed;
      v.extra = extras(vj, {"name", "semantic_type"});
      e.variables.push_back(std::move(v));
    }
    e.extra = extras(ej, {"name", "index", "time_index", "variables"});
    doc.entities.push_back(std::move(e));
  }
  if (j.contains("relationships")) {
    const Json& rels = j.at("relationships");
    if (!rels.is_array()) throw SchemaError("/relationships", "expected array");
    for (std::size_t i = 0; i < rels.size(); ++i) {
      const std::string base = ptr("/relationships", i);
      const Json& rj = rels[i];
      if (!rj.is_object()) throw SchemaError(base, "expected object");
      doc.relationships.push_back({require_string(rj, base, "parent_entity"),
                                   require_string(rj, base, "parent_variable"),
                                   require_string(rj, base, "child_entity"),
                                   require_string(rj, base, "child_variable")});
    }
  }
  doc.extra = extras(j, {"entityset_name", "entities", "relationships"});
  validate_metadata(doc);
  return doc;
}

MetadataDocument parse_metadata(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("metadata JSON syntax error: ") + e.what(), e.byte);
  }
  return metadata_from_json(j);
}

Json metadata_to_json(const MetadataDocument& doc) {
  Json j = doc.extra;
  j["entityset_name"] = doc.entityset_name;
  j["entities"] = Json::array();
  for (const auto& e : doc.entities) {
    Json ej = e.extra;
    ej["name"] = e.name;
    ej["index"] = e.index;
    if (e.time_index) ej["time_index"] = *e.time_index;
    ej["variables"] = Json::array();
    for (const auto& v : e.variables) {
      Json vj = v.extra;
      vj["name"] = v.name;
      vj["semantic_type"] = std::string(to_string(v.semantic_type));
      ej["variables"].push_back(std::move(vj));
    }
    j["entities"].push_back(std::move(ej));
  }
  j["relationships"] = Json::array();
  for (const auto& r : doc.relationships) {
    j["relationships"].push_back({{"parent_entity", r.parent_entity},
                                  {"parent_variable", r.parent_variable},
                                  {"child_entity", r.child_entity},
                                  {"child_variable", r.child_variable}});
  }
  return j;
}

std::string emit_metadata(const MetadataDocument& doc) { return dump_canonical(metadata_to_json(doc)); }

MetadataDocument load_metadata_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open metadata file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_metadata(ss.str());
}

}  // namespace chronoforge
