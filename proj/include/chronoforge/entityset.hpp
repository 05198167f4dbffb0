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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "chronoforge/error.hpp"
#include "chronoforge/metadata.hpp"
#include "chronoforge/time.hpp"

namespace chronoforge {

// One cell. monostate is null.
using Value = std::variant<std::monostate, double, bool, Timestamp, std::string>;

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

// Parses text for a declared semantic type. Empty text is null. Returns
// nullopt when the text is not a valid value of the type.
std::optional<Value> parse_value(SemanticType type, std::string_view text);
std::string render_value(const Value& v);

using Variable = VariableSpec;

struct Relationship {
  std::string parent_entity;
  std::string parent_variable;
  std::string child_entity;
  std::string child_variable;
};

class Entity {
 public:
  const std::string& name() const noexcept { return spec_.name; }
  const std::vector<Variable>& variables() const noexcept { return spec_.variables; }
  const std::string& index() const noexcept { return spec_.index; }
  const std::optional<std::string>& time_index() const noexcept { return spec_.time_index; }
  const EntitySpec& spec() const noexcept { return spec_; }

  std::size_t row_count() const noexcept { return columns_.empty() ? 0 : columns_.front().size(); }
  std::optional<std::size_t> column_of(std::string_view variable) const;
  const std::vector<Value>& column(std::size_t i) const { return columns_.at(i); }
  const std::vector<Value>& column(std::string_view variable) const;
  const Value& at(std::size_t row, std::size_t col) const { return columns_[col][row]; }

  const std::string& index_value(std::size_t row) const;
  std::optional<std::size_t> find_row(std::string_view index_value) const;
  // Own time-index value of a row; nullopt for entities without a time index.
  std::optional<Timestamp> time_of(std::size_t row) const;

 private:
  friend class EntitySet;
  friend class EntitySetBuilder;

  EntitySpec spec_;
  std::vector<std::vector<Value>> columns_;  // one per variable, declaration order
  std::unordered_map<std::string, std::size_t> index_lookup_;
  std::size_t index_col_ = 0;
  std::optional<std::size_t> time_col_;
};

// Rows handed over for validation/appending: raw text keyed by header.
struct RowBatch {
  std::string entity;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Violation {
  enum class Kind { UnknownEntity, ColumnSetMismatch, TypeViolation, DuplicateIndex, DanglingKey };
  Kind kind;
  std::string entity;
  std::string column;
  std::size_t row = 0;  // 1-based position within the batch, 0 if not row-specific
  std::string value;

  std::string kind_name() const;
  std::string message() const;
};

struct ConsistencyReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
  std::size_t count(Violation::Kind kind) const;
};

class ConsistencyError : public DataError {
 public:
  explicit ConsistencyError(ConsistencyReport report);
  const ConsistencyReport& report() const noexcept { return report_; }

 private:
  ConsistencyReport report_;
};

// Immutable, versioned collection of entities and relationships. Rows of a
// time-indexed entity are kept sorted by time index (stable), so every
// point-in-time query is a binary search.
class EntitySet {
 public:
  const std::string& name() const noexcept { return metadata_.entityset_name; }
  std::uint64_t version() const noexcept { return version_; }
  const MetadataDocument& metadata() const noexcept { return metadata_; }

  const std::vector<Entity>& entities() const noexcept { return entities_; }
  const Entity& entity(std::string_view name) const;
  const Entity* find_entity(std::string_view name) const;
  std::size_t entity_position(std::string_view name) const;

  const std::vector<Relationship>& relationships() const noexcept { return relationships_; }
  // Relationship positions where the entity is the parent / the child.
  const std::vector<std::size_t>& child_relationships(std::string_view parent) const;
  const std::vector<std::size_t>& parent_relationships(std::string_view child) const;
  // Child rows of a parent row along a relationship, in row order.
  const std::vector<std::size_t>& children_of(std::size_t relationship, std::size_t parent_row) const;
  std::optional<std::size_t> parent_of(std::size_t relationship, std::size_t child_row) const;

  // Instant a row became available: its own time index, otherwise the latest
  // available time among its parent rows, otherwise none (always available).
  std::optional<Timestamp> effective_time(std::string_view entity, std::size_t row) const;
  const std::vector<std::optional<Timestamp>>& effective_times(std::string_view entity) const;

  // Latest time-index value across all entities.
  std::optional<Timestamp> latest_time() const;

 private:
  friend class EntitySetBuilder;
  void rebuild();

  MetadataDocument metadata_;
  std::uint64_t version_ = 1;
  std::vector<Entity> entities_;
  std::vector<Relationship> relationships_;
  std::unordered_map<std::string, std::size_t> entity_lookup_;
  std::vector<std::vector<std::size_t>> child_rels_;   // per entity
  std::vector<std::vector<std::size_t>> parent_rels_;  // per entity
  std::vector<std::vector<std::vector<std::size_t>>> children_;  // [rel][parent row]
  std::vector<std::vector<std::size_t>> parent_rows_;            // [rel][child row], npos if null
  std::vector<std::vector<std::optional<Timestamp>>> effective_;  // [entity][row]
};

// Visible portion of an EntitySet at a cutoff: rows of time-indexed entities
// whose time index is strictly before the cutoff; timeless entities in full.
class EntitySetView {
 public:
  EntitySetView(const EntitySet& es, Timestamp cutoff);

  const EntitySet& entityset() const noexcept { return *es_; }
  Timestamp cutoff() const noexcept { return cutoff_; }

  // Visible rows are the prefix [0, visible_count) of the entity's row order.
  std::size_t visible_count(std::string_view entity) const;
  bool is_visible(std::string_view entity, std::size_t row) const;
  std::vector<std::string> visible_index_values(std::string_view entity) const;

  // Copy of only the visible rows, same version.
  EntitySet materialize() const;

 private:
  const EntitySet* es_;
  Timestamp cutoff_;
  std::vector<std::size_t> counts_;
};

EntitySetView query_by_time(const EntitySet& es, Timestamp cutoff);
EntitySetView query_by_time(const EntitySetView& view, Timestamp cutoff);

// Validation of new rows against an existing EntitySet (which may be empty).
ConsistencyReport check_consistency(const EntitySet& es, const std::vector<RowBatch>& batches);

// Builds a version-1 EntitySet; throws DataError naming entity, column and row.
EntitySet build_entityset(const MetadataDocument& metadata, const std::vector<RowBatch>& batches);
EntitySet load_entityset(const std::filesystem::path& data_dir, const MetadataDocument& metadata);

// Appends rows from <entity>.csv files found in new_data_path. Returns the
// next version; throws ConsistencyError when the batch does not fit.
EntitySet add_new_data(const EntitySet& es, const std::filesystem::path& new_data_path,
                       const MetadataDocument& metadata);
EntitySet add_new_data(const EntitySet& es, const std::vector<RowBatch>& batches);

// Splits key_variable and the carried variables out of source into a new
// timeless entity with one row per distinct key.
EntitySet normalize_entity(const EntitySet& es, std::string_view source, std::string_view new_entity,
                           std::string_view key_variable,
                           const std::vector<std::string>& carried_variables);

// New version without one (non-key, non-index) variable. Simulates schema drift.
EntitySet drop_variable(const EntitySet& es, std::string_view entity, std::string_view variable);

// Relationship positions leading from an ancestor down to a descendant
// entity (shortest path; ties broken by relationship declaration order).
// Empty for from == to; nullopt when `to` is not a descendant.
std::optional<std::vector<std::size_t>> find_descendant_path(const EntitySet& es, std::string_view from,
                                                             std::string_view to);

// Rows of the path's last entity that join to `row` of the path's first entity.
std::vector<std::size_t> descendant_rows(const EntitySet& es, const std::vector<std::size_t>& path,
                                         std::size_t row);

// Writes metadata.json and one <entity>.csv per entity.
void write_entityset(const EntitySet& es, const std::filesystem::path& dir);
RowBatch to_batch(const Entity& entity);

}  // namespace chronoforge
