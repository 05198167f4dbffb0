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

#include "chronoforge/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "chronoforge/rng.hpp"

namespace chronoforge {
namespace {

const std::string kDecisionTree = "decision_tree";
const std::string kRandomForest = "random_forest";
const std::string kLogistic = "logistic_regression";

template <typename T>
T param(const Json& h, const char* name, T fallback) {
  if (!h.is_object() || !h.contains(name) || h.at(name).is_null()) return fallback;
  try {
    return h.at(name).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string("hyperparameter '") + name + "' has the wrong type");
  }
}

void require_two_classes(std::span<const int> y) {
  if (y.empty()) throw DegenerateLabelsError("cannot fit a learner on zero rows");
  bool pos = false, neg = false;
  for (int v : y) (v ? pos : neg) = true;
  if (!(pos && neg)) throw DegenerateLabelsError("training labels contain a single class");
}

// ------------------------------------------------------------------ CART

struct TreeParams {
  bool entropy = false;
  std::optional<int> max_depth;
  double min_samples_split = 2;
  double min_samples_leaf = 1;
  double max_features = 1.0;

  static TreeParams from(const Json& h) {
    TreeParams p;
    const std::string criterion = param<std::string>(h, "criterion", "gini");
    if (criterion != "gini" && criterion != "entropy")
      throw ConfigError("criterion must be 'gini' or 'entropy', got '" + criterion + "'");
    p.entropy = criterion == "entropy";
    if (h.is_object() && h.contains("max_depth") && !h.at("max_depth").is_null()) {
      p.max_depth = param<int>(h, "max_depth", 0);
      if (*p.max_depth < 1) throw ConfigError("max_depth must be >= 1");
    }
    p.min_samples_split = param<double>(h, "min_samples_split", 2);
    p.min_samples_leaf = param<double>(h, "min_samples_leaf", 1);
    p.max_features = param<double>(h, "max_features", 1.0);
    if (p.min_samples_split < 2) throw ConfigError("min_samples_split must be >= 2");
    if (p.min_samples_leaf < 1) throw ConfigError("min_samples_leaf must be >= 1");
    if (!(p.max_features > 0.0 && p.max_features <= 1.0)) throw ConfigError("max_features must be in (0, 1]");
    return p;
  }
};

struct Node {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // weighted positive fraction
};

double impurity(double pos, double total, bool entropy) {
  if (total <= 0) return 0.0;
  double p = pos / total;
  double q = 1.0 - p;
  if (!entropy) return 1.0 - p * p - q * q;
  double h = 0.0;
  if (p > 0) h -= p * std::log2(p);
  if (q > 0) h -= q * std::log2(q);
  return h;
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const int> y, std::span<const double> w, const TreeParams& p,
              std::uint64_t seed)
      : x_(x), y_(y), w_(w), p_(p), rng_(seed), importance_(x.cols, 0.0) {
    total_weight_ = std::accumulate(w.begin(), w.end(), 0.0);
    n_try_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(p.max_features * static_cast<double>(x.cols))));
    n_try_ = std::min(n_try_, x.cols);
  }

  std::vector<Node> build() {
    std::vector<std::size_t> samples;
    for (std::size_t i = 0; i < y_.size(); ++i)
      if (w_[i] > 0) samples.push_back(i);
    grow(samples, 0);
    return std::move(nodes_);
  }

  std::vector<double> importances() const {
    std::vector<double> imp = importance_;
    double s = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (s > 0)
      for (double& v : imp) v /= s;
    return imp;
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double decrease = 0.0;
  };

  int grow(std::vector<std::size_t>& samples, int depth) {
    double weight = 0, pos = 0;
    for (std::size_t i : samples) {
      weight += w_[i];
      if (y_[i]) pos += w_[i];
    }
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    nodes_[id].value = weight > 0 ? pos / weight : 0.0;
    const double node_impurity = impurity(pos, weight, p_.entropy);
    if ((p_.max_depth && depth >= *p_.max_depth) || weight < p_.min_samples_split || node_impurity <= 0.0)
      return id;

    Split best = find_split(samples, weight, pos, node_impurity);
    if (best.feature < 0) return id;
    importance_[static_cast<std::size_t>(best.feature)] += weight / total_weight_ * best.decrease;

    std::vector<std::size_t> left, right;
    for (std::size_t i : samples)
      (x_.at(i, static_cast<std::size_t>(best.feature)) <= best.threshold ? left : right).push_back(i);
    samples.clear();
    samples.shrink_to_fit();
    int l = grow(left, depth + 1);
    int r = grow(right, depth + 1);
    nodes_[id].feature = best.feature;
    nodes_[id].threshold = best.threshold;
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  std::vector<std::size_t> candidate_features() {
    std::vector<std::size_t> f(x_.cols);
    std::iota(f.begin(), f.end(), 0);
    if (n_try_ == x_.cols) return f;
    for (std::size_t i = 0; i < n_try_; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng_.below(x_.cols - i));
      std::swap(f[i], f[j]);
    }
    f.resize(n_try_);
    std::sort(f.begin(), f.end());
    return f;
  }

  Split find_split(const std::vector<std::size_t>& samples, double weight, double pos, double node_impurity) {
    Split best;
    std::vector<std::size_t> order = samples;
    for (std::size_t f : candidate_features()) {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        double va = x_.at(a, f), vb = x_.at(b, f);
        return va < vb || (va == vb && a < b);
      });
      double lw = 0, lp = 0;
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        std::size_t i = order[k];
        lw += w_[i];
        if (y_[i]) lp += w_[i];
        double here = x_.at(i, f), next = x_.at(order[k + 1], f);
        if (here == next) continue;
        double rw = weight - lw;
        if (lw < p_.min_samples_leaf || rw < p_.min_samples_leaf) continue;
        double decrease = node_impurity - (lw / weight) * impurity(lp, lw, p_.entropy) -
                          (rw / weight) * impurity(pos - lp, rw, p_.entropy);
        if (decrease > best.decrease + 1e-12) {
          double mid = here + (next - here) / 2.0;
          if (!(mid < next)) mid = here;  // adjacent doubles
          best = {static_cast<int>(f), mid, decrease};
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  std::span<const int> y_;
  std::span<const double> w_;
  TreeParams p_;
  Rng rng_;
  std::vector<Node> nodes_;
  std::vector<double> importance_;
  double total_weight_ = 0;
  std::size_t n_try_ = 1;
};

double tree_score(const std::vector<Node>& nodes, std::span<const double> x) {
  int i = 0;
  while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
    const Node& n = nodes[static_cast<std::size_t>(i)];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(i)].value;
}

Json nodes_to_json(const std::vector<Node>& nodes) {
  Json arr = Json::array();
  for (const auto& n : nodes) {
    Json j = {{"value", n.value}};
    if (n.feature >= 0) {
      j["feature"] = n.feature;
      j["threshold"] = n.threshold;
      j["left"] = n.left;
      j["right"] = n.right;
    }
    arr.push_back(std::move(j));
  }
  return arr;
}

std::vector<Node> nodes_from_json(const Json& arr) {
  std::vector<Node> nodes;
  for (const auto& j : arr) {
    Node n;
    n.value = j.at("value").get<double>();
    if (j.contains("feature")) {
      n.feature = j.at("feature").get<int>();
      n.threshold = j.at("threshold").get<double>();
      n.left = j.at("left").get<int>();
      n.right = j.at("right").get<int>();
    }
    nodes.push_back(n);
  }
  return nodes;
}

class DecisionTree final : public Learner {
 public:
  DecisionTree(Json hyper, std::vector<Node> nodes, std::vector<double> importances)
      : hyper_(std::move(hyper)), nodes_(std::move(nodes)), importances_(std::move(importances)) {}

  const std::string& method_key() const override { return kDecisionTree; }
  double score(std::span<const double> x) const override { return tree_score(nodes_, x); }
  std::vector<double> feature_importances() const override { return importances_; }
  Json to_json() const override {
    return {{"method_key", kDecisionTree},
            {"hyperparameters", hyper_},
            {"feature_importances", importances_},
            {"nodes", nodes_to_json(nodes_)}};
  }

 private:
  Json hyper_;
  std::vector<Node> nodes_;
  std::vector<double> importances_;
};

class RandomForest final : public Learner {
 public:
  RandomForest(Json hyper, std::vector<std::vector<Node>> trees, std::vector<double> importances)
      : hyper_(std::move(hyper)), trees_(std::move(trees)), importances_(std::move(importances)) {}

  const std::string& method_key() const override { return kRandomForest; }
  double score(std::span<const double> x) const override {
    double s = 0;
    for (const auto& t : trees_) s += tree_score(t, x);
    return s / static_cast<double>(trees_.size());
  }
  std::vector<double> feature_importances() const override { return importances_; }
  Json to_json() const override {
    Json trees = Json::array();
    for (const auto& t : trees_) trees.push_back(nodes_to_json(t));
    return {{"method_key", kRandomForest},
            {"hyperparameters", hyper_},
            {"feature_importances", importances_},
            {"trees", std::move(trees)}};
  }

 private:
  Json hyper_;
  std::vector<std::vector<Node>> trees_;
  std::vector<double> importances_;
};

class LogisticRegression final : public Learner {
 public:
  LogisticRegression(Json hyper, std::vector<double> mean, std::vector<double> scale, std::vector<double> w, double b)
      : hyper_(std::move(hyper)), mean_(std::move(mean)), scale_(std::move(scale)), w_(std::move(w)), b_(b) {}

  const std::string& method_key() const override { return kLogistic; }
  double score(std::span<const double> x) const override {
    double z = b_;
    for (std::size_t c = 0; c < w_.size(); ++c) z += w_[c] * (x[c] - mean_[c]) / scale_[c];
    return 1.0 / (1.0 + std::exp(-z));
  }
  std::vector<double> feature_importances() const override {
    std::vector<double> imp(w_.size());
    double s = 0;
    for (std::size_t c = 0; c < w_.size(); ++c) s += imp[c] = std::fabs(w_[c]);
    if (s > 0)
      for (double& v : imp) v /= s;
    return imp;
  }
  Json to_json() const override {
    return {{"method_key", kLogistic}, {"hyperparameters", hyper_}, {"mean", mean_},
            {"scale", scale_},         {"coefficients", w_},        {"intercept", b_}};
  }

 private:
  Json hyper_;
  std::vector<double> mean_, scale_, w_;
  double b_;
};

std::unique_ptr<Learner> fit_tree(const Json& h, const Matrix& x, std::span<const int> y, std::uint64_t seed) {
  TreeParams p = TreeParams::from(h);
  std::vector<double> w(y.size(), 1.0);
  TreeBuilder b(x, y, w, p, seed);
  auto nodes = b.build();
  return std::make_unique<DecisionTree>(h, std::move(nodes), b.importances());
}

std::unique_ptr<Learner> fit_forest(const Json& h, const Matrix& x, std::span<const int> y, std::uint64_t seed) {
  TreeParams p = TreeParams::from(h);
  const int n_estimators = param<int>(h, "n_estimators", 50);
  const bool bootstrap = param<bool>(h, "bootstrap", true);
  if (n_estimators < 1) throw ConfigError("n_estimators must be >= 1");
  std::vector<std::vector<Node>> trees;
  std::vector<double> importance(x.cols, 0.0);
  for (int t = 0; t < n_estimators; ++t) {
    Rng rng(seed, static_cast<std::uint64_t>(t));
    std::vector<double> w(y.size(), bootstrap ? 0.0 : 1.0);
    if (bootstrap)
      for (std::size_t i = 0; i < y.size(); ++i) w[rng.below(y.size())] += 1.0;
    TreeBuilder b(x, y, w, p, rng.next());
    trees.push_back(b.build());
    auto imp = b.importances();
    for (std::size_t c = 0; c < imp.size(); ++c) importance[c] += imp[c] / n_estimators;
  }
  return std::make_unique<RandomForest>(h, std::move(trees), std::move(importance));
}

std::unique_ptr<Learner> fit_logistic(const Json& h, const Matrix& x, std::span<const int> y) {
  const double l2 = param<double>(h, "l2", 0.0);
  const double lr = param<double>(h, "learning_rate", 0.1);
  const int iters = param<int>(h, "max_iter", 300);
  if (l2 < 0 || lr <= 0 || iters < 1) throw ConfigError("logistic_regression: invalid hyperparameters");
  const std::size_t n = x.rows, d = x.cols;
  std::vector<double> mean(d, 0.0), scale(d, 1.0);
  for (std::size_t c = 0; c < d; ++c) {
    double s = 0;
    for (std::size_t r = 0; r < n; ++r) s += x.at(r, c);
    mean[c] = s / static_cast<double>(n);
    double v = 0;
    for (std::size_t r = 0; r < n; ++r) v += (x.at(r, c) - mean[c]) * (x.at(r, c) - mean[c]);
    double sd = std::sqrt(v / static_cast<double>(n));
    scale[c] = sd > 0 ? sd : 1.0;
  }
  std::vector<double> w(d, 0.0), grad(d);
  double b = 0.0;
  std::vector<double> z(d);
  for (int it = 0; it < iters; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double gb = 0;
    for (std::size_t r = 0; r < n; ++r) {
      double s = b;
      for (std::size_t c = 0; c < d; ++c) {
        z[c] = (x.at(r, c) - mean[c]) / scale[c];
        s += w[c] * z[c];
      }
      double err = 1.0 / (1.0 + std::exp(-s)) - y[r];
      for (std::size_t c = 0; c < d; ++c) grad[c] += err * z[c];
      gb += err;
    }
    for (std::size_t c = 0; c < d; ++c) w[c] -= lr * (grad[c] / static_cast<double>(n) + l2 * w[c]);
    b -= lr * gb / static_cast<double>(n);
  }
  return std::make_unique<LogisticRegression>(h, std::move(mean), std::move(scale), std::move(w), b);
}

}  // namespace

std::string resolve_method_key(const std::string& name) {
  static const std::vector<std::pair<std::string, std::string>> aliases = {
      {"decision_tree", kDecisionTree},
      {"dt", kDecisionTree},
      {"DecisionTreeClassifier", kDecisionTree},
      {"sklearn.tree.DecisionTreeClassifier", kDecisionTree},
      {"random_forest", kRandomForest},
      {"rf", kRandomForest},
      {"RandomForestClassifier", kRandomForest},
      {"RandomForestClassifer", kRandomForest},
      {"sklearn.ensemble.RandomForestClassifier", kRandomForest},
      {"logistic_regression", kLogistic},
      {"logreg", kLogistic},
      {"LogisticRegression", kLogistic},
      {"sklearn.linear_model.LogisticRegression", kLogistic},
  };
  for (const auto& [alias, key] : aliases)
    if (alias == name) return key;
  return name;
}

bool is_registered_method(const std::string& key) {
  return key == kDecisionTree || key == kRandomForest || key == kLogistic;
}

std::unique_ptr<Learner> fit_learner(const std::string& method_key, const Json& hyperparameters,
                                     const Matrix& x, std::span<const int> y, std::uint64_t seed) {
  const std::string key = resolve_method_key(method_key);
  if (!is_registered_method(key)) throw UnknownMethodError("no learner registered for method '" + method_key + "'");
  if (x.rows != y.size()) throw ConfigError("design matrix and labels disagree on row count");
  require_two_classes(y);
  if (key == kDecisionTree) return fit_tree(hyperparameters, x, y, seed);
  if (key == kRandomForest) return fit_forest(hyperparameters, x, y, seed);
  return fit_logistic(hyperparameters, x, y);
}

std::vector<double> predict_scores(const Learner& learner, const Matrix& x) {
  std::vector<double> s(x.rows);
  for (std::size_t r = 0; r < x.rows; ++r) s[r] = learner.score(x.row(r));
  return s;
}

std::unique_ptr<Learner> learner_from_json(const Json& j) {
  try {
    const std::string key = j.at("method_key").get<std::string>();
    const Json& h = j.at("hyperparameters");
    if (key == kDecisionTree)
      return std::make_unique<DecisionTree>(h, nodes_from_json(j.at("nodes")),
                                            j.at("feature_importances").get<std::vector<double>>());
    if (key == kRandomForest) {
      std::vector<std::vector<Node>> trees;
      for (const auto& t : j.at("trees")) trees.push_back(nodes_from_json(t));
      return std::make_unique<RandomForest>(h, std::move(trees),
                                            j.at("feature_importances").get<std::vector<double>>());
    }
    if (key == kLogistic)
      return std::make_unique<LogisticRegression>(h, j.at("mean").get<std::vector<double>>(),
                                                  j.at("scale").get<std::vector<double>>(),
                                                  j.at("coefficients").get<std::vector<double>>(),
                                                  j.at("intercept").get<double>());
    throw UnknownMethodError("no learner registered for method '" + key + "'");
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed learner state: ") + e.what());
  }
}

}  // namespace chronoforge
