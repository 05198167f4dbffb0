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

#include "chronoforge/entityset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <unordered_set>

#include "chronoforge/csv.hpp"
#include "chronoforge/json_format.hpp"

namespace chronoforge {

constexpr std::size_t kNoRow = static_cast<std::size_t>(-1);

std::optional<Value> parse_value(SemanticType type, std::string_view text) {
  if (text.empty()) return Value{};
  switch (type) {
    case SemanticType::Numeric:
    case SemanticType::Latitude:
    case SemanticType::Longitude: {
      double d = 0;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), d);
      if (ec != std::errc{} || p != text.data() + text.size() || !std::isfinite(d)) return std::nullopt;
      return Value{d};
    }
    case SemanticType::Boolean:
      if (text == "true" || text == "True" || text == "TRUE" || text == "1") return Value{true};
      if (text == "false" || text == "False" || text == "FALSE" || text == "0") return Value{false};
      return std::nullopt;
    case SemanticType::Datetime:
    case SemanticType::TimeIndex:
      if (auto t = try_parse_timestamp(text)) return Value{*t};
      return std::nullopt;
    default:
      return Value{std::string(text)};
  }
}

std::string render_value(const Value& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(double d) const { return format_double(d); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(Timestamp t) const { return format_timestamp(t); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, v);
}

// ---------------------------------------------------------------- Entity

std::optional<std::size_t> Entity::column_of(std::string_view variable) const {
  for (std::size_t i = 0; i < spec_.variables.size(); ++i)
    if (spec_.variables[i].name == variable) return i;
  return std::nullopt;
}

const std::vector<Value>& Entity::column(std::string_view variable) const {
  auto c = column_of(variable);
  if (!c) throw DataError("UnknownVariable", name(), std::string(variable), 0);
  return columns_[*c];
}

const std::string& Entity::index_value(std::size_t row) const {
  return std::get<std::string>(columns_[index_col_][row]);
}

std::optional<std::size_t> Entity::find_row(std::string_view index_value) const {
  auto it = index_lookup_.find(std::string(index_value));
  if (it == index_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<Timestamp> Entity::time_of(std::size_t row) const {
  if (!time_col_) return std::nullopt;
  return std::get<Timestamp>(columns_[*time_col_][row]);
}

// ---------------------------------------------------------------- Violations

std::string Violation::kind_name() const {
  switch (kind) {
    case Kind::UnknownEntity: return "UnknownEntity";
    case Kind::ColumnSetMismatch: return "ColumnSetMismatch";
    case Kind::TypeViolation: return "TypeViolation";
    case Kind::DuplicateIndex: return "DuplicateIndex";
    case Kind::DanglingKey: return "DanglingKey";
  }
  return "Violation";
}

std::string Violation::message() const {
  std::string s = kind_name() + "(" + entity;
  if (!column.empty()) s += ", " + column;
  if (row != 0) s += ", row " + std::to_string(row);
  s += ")";
  if (!value.empty()) s += ": '" + value + "'";
  return s;
}

std::size_t ConsistencyReport::count(Violation::Kind kind) const {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; }));
}

namespace {
std::string summarize(const ConsistencyReport& report) {
  std::string s = "consistency check failed with " + std::to_string(report.violations.size()) + " violation(s)";
  if (!report.violations.empty()) s += "; first: " + report.violations.front().message();
  return s;
}
}  // namespace

ConsistencyError::ConsistencyError(ConsistencyReport report)
    : DataError(summarize(report)), report_(std::move(report)) {}

// ---------------------------------------------------------------- EntitySet

const Entity& EntitySet::entity(std::string_view name) const {
  if (const Entity* e = find_entity(name)) return *e;
  throw DataError("UnknownEntity", std::string(name), "", 0);
}

const Entity* EntitySet::find_entity(std::string_view name) const {
  auto it = entity_lookup_.find(std::string(name));
  return it == entity_lookup_.end() ? nullptr : &entities_[it->second];
}

std::size_t EntitySet::entity_position(std::string_view name) const {
  auto it = entity_lookup_.find(std::string(name));
  if (it == entity_lookup_.end()) throw DataError("UnknownEntity", std::string(name), "", 0);
  return it->second;
}

const std::vector<std::size_t>& EntitySet::child_relationships(std::string_view parent) const {
  return child_rels_[entity_position(parent)];
}

const std::vector<std::size_t>& EntitySet::parent_relationships(std::string_view child) const {
  return parent_rels_[entity_position(child)];
}

const std::vector<std::size_t>& EntitySet::children_of(std::size_t relationship, std::size_t parent_row) const {
  return children_[relationship][parent_row];
}

std::optional<std::size_t> EntitySet::parent_of(std::size_t relationship, std::size_t child_row) const {
  std::size_t p = parent_rows_[relationship][child_row];
  if (p == kNoRow) return std::nullopt;
  return p;
}

std::optional<Timestamp> EntitySet::effective_time(std::string_view entity, std::size_t row) const {
  return effective_[entity_position(entity)][row];
}

const std::vector<std::optional<Timestamp>>& EntitySet::effective_times(std::string_view entity) const {
  return effective_[entity_position(entity)];
}

std::optional<Timestamp> EntitySet::latest_time() const {
  std::optional<Timestamp> latest;
  for (const auto& e : entities_) {
    if (!e.time_col_ || e.row_count() == 0) continue;
    Timestamp t = *e.time_of(e.row_count() - 1);  // rows sorted by time
    if (!latest || *latest < t) latest = t;
  }
  return latest;
}

void EntitySet::rebuild() {
  entity_lookup_.clear();
  for (std::size_t i = 0; i < entities_.size(); ++i) {
    Entity& e = entities_[i];
    entity_lookup_[e.name()] = i;
    e.index_col_ = *e.column_of(e.index());
    e.time_col_ = e.time_index() ? e.column_of(*e.time_index()) : std::nullopt;
    e.index_lookup_.clear();
    for (std::size_t r = 0; r < e.row_count(); ++r) e.index_lookup_[e.index_value(r)] = r;
  }

  relationships_.clear();
  for (const auto& r : metadata_.relationships)
    relationships_.push_back({r.parent_entity, r.parent_variable, r.child_entity, r.child_variable});

  child_rels_.assign(entities_.size(), {});
  parent_rels_.assign(entities_.size(), {});
  children_.assign(relationships_.size(), {});
  parent_rows_.assign(relationships_.size(), {});
  for (std::size_t ri = 0; ri < relationships_.size(); ++ri) {
    const auto& rel = relationships_[ri];
    std::size_t pi = entity_lookup_.at(rel.parent_entity);
    std::size_t ci = entity_lookup_.at(rel.child_entity);
    child_rels_[pi].push_back(ri);
    parent_rels_[ci].push_back(ri);
    const Entity& parent = entities_[pi];
    const Entity& child = entities_[ci];
    children_[ri].assign(parent.row_count(), {});
    parent_rows_[ri].assign(child.row_count(), kNoRow);
    const auto& fk = child.column(rel.child_variable);
    for (std::size_t r = 0; r < child.row_count(); ++r) {
      if (is_null(fk[r])) continue;
      auto p = parent.find_row(render_value(fk[r]));
      if (!p) continue;
      parent_rows_[ri][r] = *p;
      children_[ri][*p].push_back(r);
    }
  }

  effective_.assign(entities_.size(), {});
  std::vector<int> state(entities_.size(), 0);
  std::function<void(std::size_t)> compute = [&](std::size_t ei) {
    if (state[ei] == 2) return;
    state[ei] = 2;
    for (std::size_t ri : parent_rels_[ei]) compute(entity_lookup_.at(relationships_[ri].parent_entity));
    const Entity& e = entities_[ei];
    auto& eff = effective_[ei];
    eff.assign(e.row_count(), std::nullopt);
    for (std::size_t r = 0; r < e.row_count(); ++r) {
      if (e.time_col_) {
        eff[r] = e.time_of(r);
        continue;
      }
      for (std::size_t ri : parent_rels_[ei]) {
        std::size_t p = parent_rows_[ri][r];
        if (p == kNoRow) continue;
        const auto& pt = effective_[entity_lookup_.at(relationships_[ri].parent_entity)][p];
        if (pt && (!eff[r] || *eff[r] < *pt)) eff[r] = pt;
      }
    }
  };
  for (std::size_t i = 0; i < entities_.size(); ++i) compute(i);
}

// ---------------------------------------------------------------- builder

class EntitySetBuilder {
 public:
  static EntitySet empty(const MetadataDocument& metadata) {
    validate_metadata(metadata);
    EntitySet es;
    es.metadata_ = metadata;
    for (const auto& spec : metadata.entities) {
      Entity e;
      e.spec_ = spec;
      e.columns_.assign(spec.variables.size(), {});
      es.entities_.push_back(std::move(e));
    }
    es.rebuild();
    return es;
  }

  // Appends already-validated batches and restores the time ordering.
  static void append(EntitySet& es, const std::vector<RowBatch>& batches) {
    for (const auto& batch : batches) {
      Entity& e = es.entities_[es.entity_position(batch.entity)];
      std::vector<std::size_t> source(e.variables().size());
      for (std::size_t v = 0; v < e.variables().size(); ++v)
        source[v] = static_cast<std::size_t>(
            std::find(batch.header.begin(), batch.header.end(), e.variables()[v].name) - batch.header.begin());
      for (const auto& row : batch.rows) {
        for (std::size_t v = 0; v < e.variables().size(); ++v)
          e.columns_[v].push_back(*parse_value(e.variables()[v].semantic_type, row[source[v]]));
      }
    }
    for (auto& e : es.entities_) {
      if (!e.time_index()) continue;
      std::size_t tc = *e.column_of(*e.time_index());
      std::vector<std::size_t> order(e.row_count());
      std::iota(order.begin(), order.end(), 0);
      const auto& times = e.columns_[tc];
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::get<Timestamp>(times[a]) < std::get<Timestamp>(times[b]);
      });
      if (std::is_sorted(order.begin(), order.end())) continue;
      for (auto& col : e.columns_) {
        std::vector<Value> sorted;
        sorted.reserve(col.size());
        for (std::size_t i : order) sorted.push_back(std::move(col[i]));
        col = std::move(sorted);
      }
    }
    es.rebuild();
  }

  static EntitySet with_metadata(const EntitySet& es, MetadataDocument metadata,
                                 std::vector<Entity> entities) {
    EntitySet out;
    out.metadata_ = std::move(metadata);
    out.version_ = es.version_ + 1;
    out.entities_ = std::move(entities);
    out.rebuild();
    return out;
  }

  static EntitySet bump(const EntitySet& es) {
    EntitySet out = es;
    ++out.version_;
    return out;
  }

  static EntitySet subset(const EntitySet& es, const std::vector<std::vector<bool>>& keep) {
    EntitySet out;
    out.metadata_ = es.metadata_;
    out.version_ = es.version_;
    out.entities_ = es.entities_;
    for (std::size_t i = 0; i < out.entities_.size(); ++i) {
      for (auto& col : out.entities_[i].columns_) {
        std::vector<Value> kept;
        for (std::size_t r = 0; r < col.size(); ++r)
          if (keep[i][r]) kept.push_back(col[r]);
        col = std::move(kept);
      }
    }
    out.rebuild();
    return out;
  }

  static std::vector<Entity>& entities(EntitySet& es) { return es.entities_; }
  static std::vector<std::vector<Value>>& columns(Entity& e) { return e.columns_; }
  static EntitySpec& spec(Entity& e) { return e.spec_; }
};

// ---------------------------------------------------------------- views

EntitySetView::EntitySetView(const EntitySet& es, Timestamp cutoff) : es_(&es), cutoff_(cutoff) {
  counts_.reserve(es.entities().size());
  for (const auto& e : es.entities()) {
    if (!e.time_index()) {
      counts_.push_back(e.row_count());
      continue;
    }
    const auto& times = e.column(*e.time_index());
    auto it = std::lower_bound(times.begin(), times.end(), cutoff, [](const Value& v, Timestamp c) {
      return std::get<Timestamp>(v) < c;
    });
    counts_.push_back(static_cast<std::size_t>(it - times.begin()));
  }
}

std::size_t EntitySetView::visible_count(std::string_view entity) const {
  return counts_[es_->entity_position(entity)];
}

bool EntitySetView::is_visible(std::string_view entity, std::size_t row) const {
  return row < visible_count(entity);
}

std::vector<std::string> EntitySetView::visible_index_values(std::string_view entity) const {
  const Entity& e = es_->entity(entity);
  std::vector<std::string> out;
  for (std::size_t r = 0; r < visible_count(entity); ++r) out.push_back(e.index_value(r));
  return out;
}

EntitySet EntitySetView::materialize() const {
  std::vector<std::vector<bool>> keep;
  for (std::size_t i = 0; i < es_->entities().size(); ++i) {
    std::vector<bool> k(es_->entities()[i].row_count(), false);
    for (std::size_t r = 0; r < counts_[i]; ++r) k[r] = true;
    keep.push_back(std::move(k));
  }
  return EntitySetBuilder::subset(*es_, keep);
}

EntitySetView query_by_time(const EntitySet& es, Timestamp cutoff) { return EntitySetView(es, cutoff); }

EntitySetView query_by_time(const EntitySetView& view, Timestamp cutoff) {
  return EntitySetView(view.entityset(), std::min(view.cutoff(), cutoff));
}

// ---------------------------------------------------------------- consistency

ConsistencyReport check_consistency(const EntitySet& es, const std::vector<RowBatch>& batches) {
  using Kind = Violation::Kind;
  ConsistencyReport report;
  auto add = [&](Kind k, const std::string& entity, const std::string& column, std::size_t row,
                 std::string value = {}) {
    report.violations.push_back({k, entity, column, row, std::move(value)});
  };

  // Batches whose header matches; new index values per entity for FK resolution.
  std::vector<const RowBatch*> usable;
  std::map<std::string, std::unordered_set<std::string>> new_keys;
  for (const auto& batch : batches) {
    const Entity* e = es.find_entity(batch.entity);
    if (e == nullptr) {
      add(Kind::UnknownEntity, batch.entity, "", 0);
      continue;
    }
    std::set<std::string> declared, given(batch.header.begin(), batch.header.end());
    for (const auto& v : e->variables()) declared.insert(v.name);
    if (declared != given || given.size() != batch.header.size()) {
      std::string diff;
      for (const auto& d : declared)
        if (!given.count(d)) diff += (diff.empty() ? "missing " : ", missing ") + d;
      for (const auto& g : given)
        if (!declared.count(g)) diff += (diff.empty() ? "unexpected " : ", unexpected ") + g;
      if (diff.empty()) diff = "duplicate header column";
      add(Kind::ColumnSetMismatch, batch.entity, "", 0, diff);
      continue;
    }
    usable.push_back(&batch);
    auto idx = static_cast<std::size_t>(
        std::find(batch.header.begin(), batch.header.end(), e->index()) - batch.header.begin());
    for (const auto& row : batch.rows) new_keys[batch.entity].insert(row[idx]);
  }

  for (const RowBatch* batch : usable) {
    const Entity& e = es.entity(batch->entity);
    std::vector<std::size_t> col(e.variables().size());
    for (std::size_t v = 0; v < e.variables().size(); ++v)
      col[v] = static_cast<std::size_t>(std::find(batch->header.begin(), batch->header.end(),
                                                  e.variables()[v].name) -
                                        batch->header.begin());
    std::unordered_set<std::string> seen;
    for (std::size_t r = 0; r < batch->rows.size(); ++r) {
      const auto& row = batch->rows[r];
      for (std::size_t v = 0; v < e.variables().size(); ++v) {
        const auto& var = e.variables()[v];
        const std::string& text = row[col[v]];
        auto parsed = parse_value(var.semantic_type, text);
        bool required = var.semantic_type == SemanticType::Index || var.semantic_type == SemanticType::TimeIndex;
        if (!parsed || (required && is_null(*parsed)))
          add(Kind::TypeViolation, e.name(), var.name, r + 1, text);
      }
      const std::string& key = row[col[*e.column_of(e.index())]];
      if (!key.empty() && (e.find_row(key) || !seen.insert(key).second))
        add(Kind::DuplicateIndex, e.name(), e.index(), r + 1, key);
    }
    for (std::size_t ri : es.parent_relationships(e.name())) {
      const auto& rel = es.relationships()[ri];
      const Entity& parent = es.entity(rel.parent_entity);
      std::size_t fk = col[*e.column_of(rel.child_variable)];
      const auto nk = new_keys.find(rel.parent_entity);
      for (std::size_t r = 0; r < batch->rows.size(); ++r) {
        const std::string& value = batch->rows[r][fk];
        if (value.empty()) continue;
        if (parent.find_row(value)) continue;
        if (nk != new_keys.end() && nk->second.count(value)) continue;
        add(Kind::DanglingKey, e.name(), rel.child_variable, r + 1, value);
      }
    }
  }
  return report;
}

EntitySet build_entityset(const MetadataDocument& metadata, const std::vector<RowBatch>& batches) {
  EntitySet es = EntitySetBuilder::empty(metadata);
  ConsistencyReport report = check_consistency(es, batches);
  if (!report.ok()) {
    const Violation& v = report.violations.front();
    throw DataError(v.kind_name(), v.entity, v.column, v.row, v.value.empty() ? "" : "'" + v.value + "'");
  }
  EntitySetBuilder::append(es, batches);
  return es;
}

namespace {

RowBatch read_batch(const std::filesystem::path& file, const std::string& entity) {
  csv::Table t;
  try {
    t = csv::read_file(file);
  } catch (const ParseError& e) {
    throw DataError("MalformedCsv", entity, "", 0, e.what());
  }
  return {entity, std::move(t.header), std::move(t.rows)};
}

}  // namespace

EntitySet load_entityset(const std::filesystem::path& data_dir, const MetadataDocument& metadata) {
  validate_metadata(metadata);
  std::vector<RowBatch> batches;
  for (const auto& e : metadata.entities) {
    auto file = data_dir / (e.name + ".csv");
    if (!std::filesystem::exists(file))
      throw DataError("MissingFile", e.name, "", 0, file.string());
    batches.push_back(read_batch(file, e.name));
  }
  return build_entityset(metadata, batches);
}

EntitySet add_new_data(const EntitySet& es, const std::vector<RowBatch>& batches) {
  ConsistencyReport report = check_consistency(es, batches);
  if (!report.ok()) throw ConsistencyError(std::move(report));
  EntitySet out = EntitySetBuilder::bump(es);
  EntitySetBuilder::append(out, batches);
  return out;
}

EntitySet add_new_data(const EntitySet& es, const std::filesystem::path& new_data_path,
                       const MetadataDocument& metadata) {
  if (!(metadata.entities == es.metadata().entities) ||
      !(metadata.relationships == es.metadata().relationships)) {
    ConsistencyReport report;
    report.violations.push_back({Violation::Kind::ColumnSetMismatch, es.name(), "", 0,
                                 "metadata does not match the EntitySet schema"});
    throw ConsistencyError(std::move(report));
  }
  if (!std::filesystem::is_directory(new_data_path))
    throw DataError("MissingFile", es.name(), "", 0, new_data_path.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(new_data_path))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<RowBatch> batches;
  for (const auto& f : files) batches.push_back(read_batch(f, f.stem().string()));
  return add_new_data(es, batches);
}

// ---------------------------------------------------------------- normalize

EntitySet normalize_entity(const EntitySet& es, std::string_view source, std::string_view new_entity,
                           std::string_view key_variable,
                           const std::vector<std::string>& carried_variables) {
  const Entity& src = es.entity(source);
  const std::string src_name(source);
  if (es.find_entity(new_entity)) throw ConfigError("entity '" + std::string(new_entity) + "' already exists");
  if (!is_valid_identifier(new_entity)) throw ConfigError("invalid entity name '" + std::string(new_entity) + "'");
  auto key_col = src.column_of(key_variable);
  if (!key_col) throw DataError("UnknownVariable", src_name, std::string(key_variable), 0);
  if (key_variable == src.index() || (src.time_index() && key_variable == *src.time_index()))
    throw ConfigError("cannot normalize on the index or time index of '" + src_name + "'");
  std::vector<std::size_t> carried_cols;
  for (const auto& c : carried_variables) {
    auto col = src.column_of(c);
    if (!col) throw DataError("UnknownVariable", src_name, c, 0);
    if (c == key_variable || c == src.index() || (src.time_index() && c == *src.time_index()))
      throw ConfigError("variable '" + c + "' cannot be carried");
    for (const auto& r : es.metadata().relationships)
      if (r.child_entity == src_name && r.child_variable == c)
        throw ConfigError("variable '" + c + "' is a foreign key and cannot be carried");
    carried_cols.push_back(*col);
  }

  // Distinct key values in first-appearance order, with functional-dependency check.
  std::vector<std::string> keys;
  std::unordered_map<std::string, std::size_t> first_row;
  for (std::size_t r = 0; r < src.row_count(); ++r) {
    const Value& k = src.at(r, *key_col);
    if (is_null(k)) {
      for (std::size_t c : carried_cols)
        if (!is_null(src.at(r, c)))
          throw DataError("FunctionalDependencyViolation", src_name, std::string(key_variable), r + 1,
                          "null key with non-null carried value");
      continue;
    }
    std::string key = render_value(k);
    auto [it, inserted] = first_row.emplace(key, r);
    if (inserted) {
      keys.push_back(key);
      continue;
    }
    for (std::size_t c : carried_cols)
      if (!(src.at(r, c) == src.at(it->second, c)))
        throw DataError("FunctionalDependencyViolation", src_name, src.variables()[c].name, r + 1,
                        "key '" + key + "' maps to conflicting values");
  }

  MetadataDocument md = es.metadata();
  EntitySpec new_spec;
  new_spec.name = std::string(new_entity);
  new_spec.index = std::string(key_variable);
  new_spec.variables.push_back({std::string(key_variable), SemanticType::Index, Json::object()});
  for (std::size_t c : carried_cols) new_spec.variables.push_back(src.variables()[c]);

  std::vector<Entity> entities = es.entities();
  Entity& s = entities[es.entity_position(source)];
  EntitySpec& sspec = EntitySetBuilder::spec(s);
  auto& scols = EntitySetBuilder::columns(s);

  Entity created;
  EntitySetBuilder::spec(created) = new_spec;
  auto& ncols = EntitySetBuilder::columns(created);
  ncols.assign(new_spec.variables.size(), {});
  for (const auto& key : keys) {
    std::size_t r = first_row.at(key);
    ncols[0].push_back(Value{key});
    for (std::size_t i = 0; i < carried_cols.size(); ++i) ncols[i + 1].push_back(scols[carried_cols[i]][r]);
  }

  // Drop carried columns from the source, retype the key as a foreign key.
  std::vector<std::size_t> drop = carried_cols;
  std::sort(drop.rbegin(), drop.rend());
  for (std::size_t c : drop) {
    sspec.variables.erase(sspec.variables.begin() + static_cast<std::ptrdiff_t>(c));
    scols.erase(scols.begin() + static_cast<std::ptrdiff_t>(c));
  }
  for (auto& v : sspec.variables)
    if (v.name == key_variable) v.semantic_type = SemanticType::Id;
  for (auto& e : md.entities)
    if (e.name == src_name) e = sspec;
  md.entities.push_back(new_spec);
  md.relationships.push_back({new_spec.name, new_spec.index, src_name, std::string(key_variable)});
  validate_metadata(md);
  entities.push_back(std::move(created));
  return EntitySetBuilder::with_metadata(es, std::move(md), std::move(entities));
}

EntitySet drop_variable(const EntitySet& es, std::string_view entity, std::string_view variable) {
  const Entity& e = es.entity(entity);
  auto col = e.column_of(variable);
  if (!col) throw DataError("UnknownVariable", std::string(entity), std::string(variable), 0);
  if (variable == e.index() || (e.time_index() && variable == *e.time_index()))
    throw ConfigError("cannot drop the index or time index");
  for (const auto& r : es.metadata().relationships)
    if ((r.child_entity == entity && r.child_variable == variable))
      throw ConfigError("cannot drop a relationship variable");
  MetadataDocument md = es.metadata();
  std::vector<Entity> entities = es.entities();
  Entity& target = entities[es.entity_position(entity)];
  auto& spec = EntitySetBuilder::spec(target);
  spec.variables.erase(spec.variables.begin() + static_cast<std::ptrdiff_t>(*col));
  auto& cols = EntitySetBuilder::columns(target);
  cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(*col));
  for (auto& s : md.entities)
    if (s.name == entity) s = spec;
  return EntitySetBuilder::with_metadata(es, std::move(md), std::move(entities));
}

std::optional<std::vector<std::size_t>> find_descendant_path(const EntitySet& es, std::string_view from,
                                                             std::string_view to) {
  es.entity(from);
  es.entity(to);
  if (from == to) return std::vector<std::size_t>{};
  std::map<std::string, std::vector<std::size_t>> paths;
  std::vector<std::string> frontier{std::string(from)};
  paths[std::string(from)] = {};
  while (!frontier.empty()) {
    std::vector<std::string> next;
    for (const auto& node : frontier) {
      for (std::size_t ri : es.child_relationships(node)) {
        const std::string& child = es.relationships()[ri].child_entity;
        if (paths.count(child)) continue;
        auto p = paths[node];
        p.push_back(ri);
        if (child == to) return p;
        paths[child] = std::move(p);
        next.push_back(child);
      }
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

std::vector<std::size_t> descendant_rows(const EntitySet& es, const std::vector<std::size_t>& path,
                                         std::size_t row) {
  std::vector<std::size_t> current{row};
  for (std::size_t ri : path) {
    std::vector<std::size_t> next;
    for (std::size_t r : current) {
      const auto& kids = es.children_of(ri, r);
      next.insert(next.end(), kids.begin(), kids.end());
    }
    current = std::move(next);
  }
  return current;
}

RowBatch to_batch(const Entity& entity) {
  RowBatch b;
  b.entity = entity.name();
  for (const auto& v : entity.variables()) b.header.push_back(v.name);
  for (std::size_t r = 0; r < entity.row_count(); ++r) {
    std::vector<std::string> row;
    for (std::size_t c = 0; c < entity.variables().size(); ++c) row.push_back(render_value(entity.at(r, c)));
    b.rows.push_back(std::move(row));
  }
  return b;
}

void write_entityset(const EntitySet& es, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "metadata.json", std::ios::binary);
    out << emit_metadata(es.metadata());
  }
  for (const auto& e : es.entities()) {
    RowBatch b = to_batch(e);
    csv::write_file(dir / (e.name() + ".csv"), {b.header, b.rows});
  }
}

}  // namespace chronoforge
