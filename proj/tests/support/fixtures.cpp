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

#include "fixtures.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <map>
#include <set>
#include <sys/wait.h>
#include <unistd.h>

namespace chronoforge::testing {

namespace fs = std::filesystem;

fs::path data_dir() { return CHRONOFORGE_DATA_DIR; }
fs::path retail_tiny_dir() { return data_dir() / "retail_tiny"; }

MetadataDocument retail_tiny_metadata() { return load_metadata_file((retail_tiny_dir() / "metadata.json").string()); }

EntitySet retail_tiny() { return load_entityset(retail_tiny_dir(), retail_tiny_metadata()); }

namespace {

const Timestamp kBase = parse_timestamp("2014-01-01T00:00:00Z");

std::string random_time(Rng& rng) {
  // Coarse grid so ties are common.
  const std::int64_t s = rng.between(0, 90) * 86400 + rng.between(0, 3) * 6 * 3600;
  return format_timestamp(Timestamp{kBase.seconds + s});
}

}  // namespace

RandomFixture random_fixture(std::uint64_t seed, int max_entities, std::size_t max_rows) {
  Rng rng(seed, 0x5eed);
  const int n = static_cast<int>(rng.between(2, max_entities));
  MetadataDocument md;
  md.entityset_name = "random_" + std::to_string(seed);
  std::vector<std::vector<int>> parents(n);
  for (int i = 1; i < n; ++i) {
    parents[i].push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(i))));
    if (i >= 2 && rng.below(4) == 0) {
      int q = static_cast<int>(rng.below(static_cast<std::uint64_t>(i)));
      if (q != parents[i][0]) parents[i].push_back(q);
    }
  }
  std::vector<bool> timed(n), dated(n);
  for (int i = 0; i < n; ++i) {
    timed[i] = rng.below(10) < (i == 0 ? 3u : 7u);
    dated[i] = rng.below(10) < 3;
    EntitySpec e;
    e.name = "e" + std::to_string(i);
    e.index = "id";
    e.variables.push_back({"id", SemanticType::Index, Json::object()});
    for (int p : parents[i])
      e.variables.push_back({"e" + std::to_string(p) + "_id", SemanticType::Id, Json::object()});
    if (timed[i]) {
      e.time_index = "t";
      e.variables.push_back({"t", SemanticType::TimeIndex, Json::object()});
    }
    e.variables.push_back({"x", SemanticType::Numeric, Json::object()});
    e.variables.push_back({"b", SemanticType::Boolean, Json::object()});
    e.variables.push_back({"c", SemanticType::Categorical, Json::object()});
    if (dated[i]) e.variables.push_back({"d", SemanticType::Datetime, Json::object()});
    md.entities.push_back(std::move(e));
    for (int p : parents[i])
      md.relationships.push_back(
          {"e" + std::to_string(p), "id", "e" + std::to_string(i), "e" + std::to_string(p) + "_id"});
  }

  std::vector<std::size_t> counts(n);
  std::size_t remaining = max_rows;
  for (int i = 0; i < n; ++i) {
    std::size_t want = i == 0 ? static_cast<std::size_t>(rng.between(3, 12)) : static_cast<std::size_t>(rng.between(0, 60));
    counts[i] = std::min(want, remaining);
    remaining -= counts[i];
  }

  std::vector<RowBatch> batches;
  for (int i = 0; i < n; ++i) {
    RowBatch b;
    b.entity = md.entities[i].name;
    for (const auto& v : md.entities[i].variables) b.header.push_back(v.name);
    for (std::size_t r = 0; r < counts[i]; ++r) {
      std::vector<std::string> row;
      for (const auto& v : md.entities[i].variables) {
        if (v.name == "id") {
          row.push_back(b.entity + "_" + std::to_string(r));
        } else if (v.semantic_type == SemanticType::Id) {
          const int p = std::stoi(v.name.substr(1, v.name.find('_') - 1));
          if (counts[p] == 0 || rng.below(10) == 0) row.emplace_back();
          else row.push_back("e" + std::to_string(p) + "_" + std::to_string(rng.below(counts[p])));
        } else if (v.name == "t") {
          row.push_back(random_time(rng));
        } else if (v.name == "x") {
          if (rng.below(5) == 0) row.emplace_back();
          else row.push_back(format_double(static_cast<double>(rng.between(-50, 50)) / 4.0));
        } else if (v.name == "b") {
          const auto k = rng.below(5);
          row.push_back(k == 0 ? "" : (k % 2 ? "true" : "false"));
        } else if (v.name == "c") {
          static const char* cats[] = {"", "red", "green", "blue"};
          row.push_back(cats[rng.below(4)]);
        } else if (v.name == "d") {
          row.push_back(rng.below(6) == 0 ? "" : random_time(rng));
        }
      }
      b.rows.push_back(std::move(row));
    }
    batches.push_back(std::move(b));
  }
  RandomFixture f{md, build_entityset(md, batches)};
  return f;
}

EntitySet delete_rows(const EntitySet& es, const std::function<bool(const Entity&, std::size_t)>& drop) {
  std::map<std::string, std::set<std::string>> deleted;  // entity -> index values
  for (const auto& e : es.entities())
    for (std::size_t r = 0; r < e.row_count(); ++r)
      if (drop(e, r)) deleted[e.name()].insert(e.index_value(r));
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& rel : es.relationships()) {
      const Entity& child = es.entity(rel.child_entity);
      const auto& fk = child.column(rel.child_variable);
      const auto& gone = deleted[rel.parent_entity];
      for (std::size_t r = 0; r < child.row_count(); ++r) {
        if (is_null(fk[r]) || !gone.count(render_value(fk[r]))) continue;
        if (deleted[child.name()].insert(child.index_value(r)).second) changed = true;
      }
    }
  }
  std::vector<RowBatch> batches;
  for (const auto& e : es.entities()) {
    RowBatch b = to_batch(e);
    const auto& gone = deleted[e.name()];
    const std::size_t idx = static_cast<std::size_t>(
        std::find(b.header.begin(), b.header.end(), e.index()) - b.header.begin());
    std::vector<std::vector<std::string>> kept;
    for (auto& row : b.rows)
      if (!gone.count(row[idx])) kept.push_back(std::move(row));
    b.rows = std::move(kept);
    batches.push_back(std::move(b));
  }
  return build_entityset(es.metadata(), batches);
}

EntitySet truncate_at(const EntitySet& es, Timestamp cutoff) {
  return delete_rows(es, [&](const Entity& e, std::size_t r) {
    auto t = e.time_of(r);
    return t && !(*t < cutoff);
  });
}

namespace {

SplitData separable_split(Rng& rng, std::size_t n, const std::string& prefix, Timestamp when) {
  FeatureMatrix m;
  m.columns = {"f1", "f2"};
  m.types = {SemanticType::Numeric, SemanticType::Numeric};
  m.labels.emplace();
  for (std::size_t i = 0; i < n; ++i) {
    const bool positive = i % 2 == 0;
    const double sign = positive ? 1.0 : -1.0;
    m.rows.push_back({sign * rng.uniform(1, 2), sign * rng.uniform(1, 2)});
    m.labels->push_back(positive);
    m.instance_ids.push_back(prefix + std::to_string(i));
    m.cutoffs.push_back(when);
  }
  return SplitData::from(std::move(m), nullptr, "points");
}

}  // namespace

SeparableData separable_data(std::uint64_t seed, std::size_t n_train, std::size_t n_tune, std::size_t n_test) {
  Rng rng(seed, 0x5e9);
  SeparableData d;
  d.train = separable_split(rng, n_train, "a", parse_timestamp("2014-01-01"));
  d.tune = separable_split(rng, n_tune, "b", parse_timestamp("2014-02-01"));
  d.test = separable_split(rng, n_test, "c", parse_timestamp("2014-03-01"));
  return d;
}

SearchParams search_params(const std::vector<std::string>& spec_files, std::size_t budget, AutomlMethod automl,
                           std::uint64_t seed) {
  SearchParams p;
  for (const auto& f : spec_files) {
    const fs::path path = data_dir() / "specs" / f;
    MethodSpec spec = load_method_spec(path);
    p.methods.push_back({spec.method_class, path, std::move(spec)});
  }
  p.budget = Budget::parse(Json(budget));
  p.automl = automl;
  p.seed = seed;
  return p;
}

RunConfig retail_tiny_config() { return RunConfig::load(retail_tiny_dir() / "run_config.json"); }

fs::path train_retail_tiny(const std::string& name, unsigned jobs) {
  const RunConfig cfg = retail_tiny_config();
  RunOptions opt;
  opt.output_dir = scratch_dir(name);
  opt.jobs = jobs;
  run_labels(cfg, opt);
  run_features(cfg, opt);
  run_train(cfg, opt);
  return *opt.output_dir;
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path err = fs::temp_directory_path() /
                       ("chronoforge_" + std::to_string(::getpid()) + "_stderr_" + std::to_string(counter++));
  const std::string cmd = std::string("'") + CHRONOFORGE_CLI + "' " + args + " >/dev/null 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = read_text(err);
  fs::remove(err);
  return r;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("chronoforge_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace chronoforge::testing
