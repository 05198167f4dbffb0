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

#include "chronoforge/method_spec.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "chronoforge/error.hpp"
#include "chronoforge/learners.hpp"

namespace chronoforge {

namespace {

std::string value_text(const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

ParameterSpec::Type parse_type(const std::string& t, const std::string& pointer) {
  if (t == "int") return ParameterSpec::Type::Int;
  if (t == "float") return ParameterSpec::Type::Float;
  if (t == "string") return ParameterSpec::Type::String;
  if (t == "bool") return ParameterSpec::Type::Bool;
  throw SchemaError(pointer, "unknown parameter type '" + t + "'");
}

bool is_integral(const Json& v) {
  if (v.is_number_integer()) return true;
  if (v.is_number_float()) {
    double d = v.get<double>();
    return std::isfinite(d) && d == std::floor(d);
  }
  return false;
}

}  // namespace

bool ParameterSpec::contains(const Json& v) const {
  switch (type) {
    case Type::Int:
      return is_integral(v) && v.get<double>() >= lo && v.get<double>() <= hi;
    case Type::Float:
      return v.is_number() && v.get<double>() >= lo && v.get<double>() <= hi;
    case Type::String:
    case Type::Bool:
      return std::find(values.begin(), values.end(), v) != values.end();
  }
  return false;
}

const ParameterSpec* MethodSpec::find(std::string_view n) const {
  for (const auto& p : parameters)
    if (p.name == n) return &p;
  return nullptr;
}

std::vector<std::string> MethodSpec::active_parameters(const Json& hyper) const {
  std::vector<std::string> out = root_parameters;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto c = conditions.find(out[i]);
    if (c == conditions.end()) continue;
    std::vector<std::string> add;
    for (const auto& [value, deps] : c->second) {
      if (value != "*" && (!hyper.contains(out[i]) || value_text(hyper.at(out[i])) != value)) continue;
      add.insert(add.end(), deps.begin(), deps.end());
    }
    for (auto& d : add)
      if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
  }
  return out;
}

MethodSpec method_spec_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("", "method spec must be a JSON object");
  MethodSpec s;
  s.source = j;
  auto need_string = [&](const char* key) -> std::string {
    if (!j.contains(key) || !j.at(key).is_string()) throw SchemaError(std::string("/") + key, "expected string");
    return j.at(key).get<std::string>();
  };
  s.name = need_string("name");
  s.method_class = j.contains("class") ? need_string("class") : need_string("method_key");
  s.method_key = resolve_method_key(s.method_class);

  if (!j.contains("parameters") || !j.at("parameters").is_object())
    throw SchemaError("/parameters", "expected object");
  for (auto it = j.at("parameters").begin(); it != j.at("parameters").end(); ++it) {
    const std::string pointer = "/parameters/" + it.key();
    const Json& pj = it.value();
    if (!pj.is_object() || !pj.contains("type") || !pj.at("type").is_string())
      throw SchemaError(pointer + "/type", "expected string");
    ParameterSpec p;
    p.name = it.key();
    p.type = parse_type(pj.at("type").get<std::string>(), pointer + "/type");
    const char* key = pj.contains("values") ? "values" : "range";
    if (!pj.contains(key) || !pj.at(key).is_array() || pj.at(key).empty())
      throw SchemaError(pointer + "/range", "expected a non-empty array");
    const Json& r = pj.at(key);
    if (p.type == ParameterSpec::Type::Int || p.type == ParameterSpec::Type::Float) {
      if (r.size() != 2 || !r[0].is_number() || !r[1].is_number())
        throw SchemaError(pointer + "/range", "expected [min, max]");
      p.lo = r[0].get<double>();
      p.hi = r[1].get<double>();
      if (p.lo > p.hi) throw SchemaError(pointer + "/range", "min exceeds max");
      if (p.type == ParameterSpec::Type::Int && (!is_integral(r[0]) || !is_integral(r[1])))
        throw SchemaError(pointer + "/range", "int range bounds must be integers");
    } else {
      for (std::size_t i = 0; i < r.size(); ++i) {
        bool ok = p.type == ParameterSpec::Type::String ? r[i].is_string() : r[i].is_boolean();
        if (!ok) throw SchemaError(pointer + "/range/" + std::to_string(i), "value does not match parameter type");
        p.values.push_back(r[i]);
      }
    }
    s.parameters.push_back(std::move(p));
  }

  if (!j.contains("root_parameters") || !j.at("root_parameters").is_array())
    throw SchemaError("/root_parameters", "expected array");
  for (std::size_t i = 0; i < j.at("root_parameters").size(); ++i) {
    const Json& n = j.at("root_parameters")[i];
    if (!n.is_string() || s.find(n.get<std::string>()) == nullptr)
      throw SchemaError("/root_parameters/" + std::to_string(i), "undeclared parameter");
    s.root_parameters.push_back(n.get<std::string>());
  }

  if (j.contains("conditions")) {
    const Json& c = j.at("conditions");
    if (!c.is_object()) throw SchemaError("/conditions", "expected object");
    for (auto it = c.begin(); it != c.end(); ++it) {
      const std::string pointer = "/conditions/" + it.key();
      if (s.find(it.key()) == nullptr) throw SchemaError(pointer, "undeclared parameter");
      auto add = [&](const std::string& value, const Json& deps, const std::string& ptr) {
        if (!deps.is_array()) throw SchemaError(ptr, "expected array of parameter names");
        for (std::size_t i = 0; i < deps.size(); ++i) {
          if (!deps[i].is_string() || s.find(deps[i].get<std::string>()) == nullptr)
            throw SchemaError(ptr + "/" + std::to_string(i), "undeclared parameter");
          s.conditions[it.key()][value].push_back(deps[i].get<std::string>());
        }
      };
      if (it.value().is_array()) {
        add("*", it.value(), pointer);
      } else if (it.value().is_object()) {
        for (auto v = it.value().begin(); v != it.value().end(); ++v) add(v.key(), v.value(), pointer + "/" + v.key());
      } else {
        throw SchemaError(pointer, "expected array or object");
      }
    }
  }
  return s;
}

MethodSpec parse_method_spec(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("method spec JSON syntax error: ") + e.what(), e.byte);
  }
  return method_spec_from_json(j);
}

MethodSpec load_method_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read method spec '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_method_spec(ss.str());
}

void check_hyperparameters(const MethodSpec& spec, const Json& hyper) {
  if (!hyper.is_object()) throw ConfigError("hyperparameters must be a JSON object");
  for (auto it = hyper.begin(); it != hyper.end(); ++it) {
    const ParameterSpec* p = spec.find(it.key());
    if (p == nullptr) throw ConfigError("hyperparameter '" + it.key() + "' is not declared by " + spec.name);
    if (!p->contains(it.value())) {
      std::string allowed;
      if (p->type == ParameterSpec::Type::Int || p->type == ParameterSpec::Type::Float) {
        allowed = "[" + format_double(p->lo) + ", " + format_double(p->hi) + "]";
      } else {
        allowed = Json(p->values).dump();
      }
      throw ConfigError("hyperparameter " + it.key() + "=" + it.value().dump() + " outside range " + allowed);
    }
  }
}

namespace {

Json draw(const ParameterSpec& p, Rng& rng) {
  switch (p.type) {
    case ParameterSpec::Type::Int:
      return rng.between(static_cast<std::int64_t>(p.lo), static_cast<std::int64_t>(p.hi));
    case ParameterSpec::Type::Float:
      return rng.uniform(p.lo, p.hi);
    default:
      return p.values[rng.below(p.values.size())];
  }
}

std::vector<Json> grid_values(const ParameterSpec& p, int points) {
  std::vector<Json> out;
  switch (p.type) {
    case ParameterSpec::Type::Int: {
      std::vector<std::int64_t> vs;
      for (int i = 0; i < points; ++i) {
        double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        vs.push_back(std::llround(p.lo + t * (p.hi - p.lo)));
      }
      vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
      for (auto v : vs) out.emplace_back(v);
      break;
    }
    case ParameterSpec::Type::Float:
      for (int i = 0; i < points; ++i) {
        double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        double v = i == points - 1 ? p.hi : p.lo + t * (p.hi - p.lo);
        if (out.empty() || out.back().get<double>() != v) out.emplace_back(v);
      }
      break;
    default:
      out = p.values;
  }
  return out;
}

}  // namespace

Json sample_random(const MethodSpec& spec, Rng& rng) {
  Json hyper = Json::object();
  // Conditionals depend on sampled values, so activate in rounds.
  for (;;) {
    bool added = false;
    for (const auto& name : spec.active_parameters(hyper)) {
      if (hyper.contains(name)) continue;
      hyper[name] = draw(*spec.find(name), rng);
      added = true;
    }
    if (!added) return hyper;
  }
}

std::vector<Json> grid_configurations(const MethodSpec& spec, int points) {
  std::vector<Json> out;
  std::function<void(Json)> expand = [&](Json partial) {
    for (const auto& name : spec.active_parameters(partial)) {
      if (partial.contains(name)) continue;
      for (const auto& v : grid_values(*spec.find(name), points)) {
        Json next = partial;
        next[name] = v;
        expand(std::move(next));
      }
      return;
    }
    out.push_back(std::move(partial));
  };
  expand(Json::object());
  return out;
}

}  // namespace chronoforge
