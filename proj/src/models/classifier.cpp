#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "sgid/error.hpp"
#include "sgid/models.hpp"
#include "sgid/rng.hpp"

namespace sgid {

using nlohmann::json;

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kDecisionTree: return "dt";
    case Algorithm::kLogisticRegression: return "lr";
    case Algorithm::kRandomForest: return "rf";
    case Algorithm::kLinearSvm: return "svm";
  }
  return "?";
}

Algorithm algorithm_from_string(std::string_view s) {
  if (s == "dt") return Algorithm::kDecisionTree;
  if (s == "lr") return Algorithm::kLogisticRegression;
  if (s == "rf") return Algorithm::kRandomForest;
  if (s == "svm") return Algorithm::kLinearSvm;
  throw UsageError("unknown algorithm '" + std::string(s) + "' (expected dt, lr, rf or svm)");
}

json to_json(const TrainConfig& c) {
  return json{
      {"algorithm", std::string(to_string(c.algorithm))},
      {"class_weight", c.class_weight},
      {"seed", c.seed},
      {"tree", {{"max_depth", c.tree.max_depth}, {"min_samples_leaf", c.tree.min_samples_leaf}}},
      {"logistic",
       {{"l2", c.logistic.l2},
        {"max_iterations", c.logistic.max_iterations},
        {"tolerance", c.logistic.tolerance},
        {"history", c.logistic.history}}},
      {"forest",
       {{"n_trees", c.forest.n_trees},
        {"bootstrap", c.forest.bootstrap},
        {"feature_fraction", c.forest.feature_fraction}}},
      {"svm", {{"c", c.svm.c}, {"epochs", c.svm.epochs}}},
  };
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  c.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
  c.class_weight = j.at("class_weight").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  const json& t = j.at("tree");
  c.tree.max_depth = t.at("max_depth").get<std::size_t>();
  c.tree.min_samples_leaf = t.at("min_samples_leaf").get<std::size_t>();
  const json& l = j.at("logistic");
  c.logistic.l2 = l.at("l2").get<double>();
  c.logistic.max_iterations = l.at("max_iterations").get<std::size_t>();
  c.logistic.tolerance = l.at("tolerance").get<double>();
  c.logistic.history = l.at("history").get<std::size_t>();
  const json& f = j.at("forest");
  c.forest.n_trees = f.at("n_trees").get<std::size_t>();
  c.forest.bootstrap = f.at("bootstrap").get<bool>();
  c.forest.feature_fraction = f.at("feature_fraction").get<double>();
  const json& s = j.at("svm");
  c.svm.c = s.at("c").get<double>();
  c.svm.epochs = s.at("epochs").get<std::size_t>();
  return c;
}

std::vector<double> class_weights(std::span<const int> labels, double class_weight) {
  std::vector<double> w(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) w[i] = labels[i] == 1 ? class_weight : 1.0;
  return w;
}

namespace {

void validate(const Dataset& data, const TrainConfig& config) {
  if (data.rows.size() != data.labels.size()) {
    throw UsageError("training rows and labels differ in length");
  }
  if (data.size() < 2) throw DataError("training needs at least 2 samples");
  bool pos = false, neg = false;
  for (int y : data.labels) {
    if (y == 1) pos = true;
    else if (y == 0) neg = true;
    else throw DataError("training label " + std::to_string(y) + " is not 0 or 1");
  }
  if (!pos || !neg) throw DataError("training labels contain a single class");
  for (const SparseVector& x : data.rows) {
    if (x.indices.size() != x.values.size()) throw UsageError("malformed sparse row");
    for (std::size_t k = 0; k < x.indices.size(); ++k) {
      if (x.indices[k] >= data.dims) {
        throw UsageError("feature column " + std::to_string(x.indices[k]) +
                         " exceeds dimensionality " + std::to_string(data.dims));
      }
      if (k > 0 && x.indices[k] <= x.indices[k - 1]) {
        throw UsageError("sparse row indices are not strictly increasing");
      }
    }
  }
  if (!(config.class_weight >= 1.0) || !std::isfinite(config.class_weight)) {
    throw UsageError("class_weight must be >= 1");
  }
  switch (config.algorithm) {
    case Algorithm::kLogisticRegression:
      if (!(config.logistic.l2 > 0.0)) throw UsageError("LR l2 must be > 0");
      break;
    case Algorithm::kLinearSvm:
      if (!(config.svm.c > 0.0)) throw UsageError("SVM c must be > 0");
      break;
    case Algorithm::kRandomForest:
      if (config.forest.n_trees == 0) throw UsageError("RF needs at least one tree");
      if (config.forest.feature_fraction > 1.0) {
        throw UsageError("RF feature_fraction must be <= 1");
      }
      break;
    case Algorithm::kDecisionTree: break;
  }
}

bool row_less(const SparseVector& a, const SparseVector& b) {
  if (a.indices != b.indices) {
    return std::lexicographical_compare(a.indices.begin(), a.indices.end(),
                                        b.indices.begin(), b.indices.end());
  }
  return std::lexicographical_compare(a.values.begin(), a.values.end(), b.values.begin(),
                                      b.values.end());
}

Dataset canonical(const Dataset& data) {
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (data.labels[i] != data.labels[j]) return data.labels[i] < data.labels[j];
    return row_less(data.rows[i], data.rows[j]);
  });
  Dataset out;
  out.dims = data.dims;
  out.rows.reserve(data.size());
  out.labels.reserve(data.size());
  for (std::size_t i : order) {
    out.rows.push_back(data.rows[i]);
    out.labels.push_back(data.labels[i]);
  }
  return out;
}

std::size_t forest_max_features(const ForestParams& p, std::size_t dims) {
  if (dims == 0) return 0;
  double m = p.feature_fraction > 0.0 ? std::round(p.feature_fraction * static_cast<double>(dims))
                                      : std::floor(std::sqrt(static_cast<double>(dims)));
  return std::clamp<std::size_t>(static_cast<std::size_t>(m), 1, dims);
}

RandomForest fit_forest(const Dataset& data, std::span<const double> base,
                        const TrainConfig& config) {
  RandomForest forest;
  const std::size_t n = data.size();
  const std::size_t mf = forest_max_features(config.forest, data.dims);
  std::vector<double> w(n);
  for (std::size_t t = 0; t < config.forest.n_trees; ++t) {
    const std::uint64_t tree_seed = Rng::derive(config.seed, t);
    if (config.forest.bootstrap) {
      Rng rng(tree_seed);
      std::vector<std::size_t> counts(n, 0);
      for (std::size_t k = 0; k < n; ++k) ++counts[rng.below(n)];
      for (std::size_t i = 0; i < n; ++i) w[i] = base[i] * static_cast<double>(counts[i]);
    } else {
      std::copy(base.begin(), base.end(), w.begin());
    }
    forest.trees.push_back(fit_tree(data, w, config.tree, mf, Rng::derive(tree_seed, 1)));
  }
  return forest;
}

}  // namespace

Classifier::Classifier(Algorithm algorithm, std::size_t dims, TrainConfig config, Params params)
    : algorithm_(algorithm), dims_(dims), config_(std::move(config)), params_(std::move(params)) {}

double Classifier::score(const SparseVector& x) const {
  if (!x.indices.empty() && x.indices.back() >= dims_) {
    throw UsageError("feature column " + std::to_string(x.indices.back()) +
                     " exceeds model dimensionality " + std::to_string(dims_));
  }
  switch (algorithm_) {
    case Algorithm::kLogisticRegression: {
      const auto& m = std::get<LinearModel>(params_);
      double z = m.bias;
      for (std::size_t k = 0; k < x.indices.size(); ++k) z += m.weights[x.indices[k]] * x.values[k];
      return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    }
    case Algorithm::kLinearSvm: {
      const auto& m = std::get<LinearModel>(params_);
      double z = m.bias;
      for (std::size_t k = 0; k < x.indices.size(); ++k) z += m.weights[x.indices[k]] * x.values[k];
      return z;
    }
    case Algorithm::kDecisionTree: return std::get<DecisionTree>(params_).score(x);
    case Algorithm::kRandomForest: return std::get<RandomForest>(params_).score(x);
  }
  return 0.0;
}

Classifier train(const Dataset& input, const TrainConfig& config) {
  validate(input, config);
  Dataset data = canonical(input);
  std::vector<double> w = class_weights(data.labels, config.class_weight);
  switch (config.algorithm) {
    case Algorithm::kLogisticRegression:
      return Classifier(config.algorithm, data.dims, config,
                        fit_logistic(data, w, config.logistic));
    case Algorithm::kLinearSvm:
      return Classifier(config.algorithm, data.dims, config,
                        fit_linear_svm(data, w, config.svm, config.seed));
    case Algorithm::kDecisionTree:
      return Classifier(config.algorithm, data.dims, config,
                        fit_tree(data, w, config.tree, 0, config.seed));
    case Algorithm::kRandomForest:
      return Classifier(config.algorithm, data.dims, config, fit_forest(data, w, config));
  }
  throw UsageError("unknown algorithm");
}

double predict_score(const Classifier& m, const SparseVector& x) { return m.score(x); }

int predict(const Classifier& m, const SparseVector& x, double threshold) {
  if (m.probabilistic() && !(threshold >= 0.0 && threshold <= 1.0)) {
    throw UsageError("threshold must lie in [0,1] for probabilistic models");
  }
  return m.score(x) >= threshold ? 1 : 0;
}

namespace {

json tree_to_json(const DecisionTree& t) {
  json nodes = json::array();
  for (const TreeNode& n : t.nodes) {
    nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.value}));
  }
  return nodes;
}

DecisionTree tree_from_json(const json& j, std::size_t dims) {
  DecisionTree t;
  for (const json& n : j) {
    TreeNode node;
    node.feature = n.at(0).get<std::int32_t>();
    node.threshold = n.at(1).get<double>();
    node.left = n.at(2).get<std::int32_t>();
    node.right = n.at(3).get<std::int32_t>();
    node.value = n.at(4).get<double>();
    t.nodes.push_back(node);
  }
  // Reject anything that could walk out of bounds or loop.
  const auto count = static_cast<std::int32_t>(t.nodes.size());
  if (count == 0) throw DataError("tree has no nodes");
  for (std::int32_t i = 0; i < count; ++i) {
    const TreeNode& n = t.nodes[static_cast<std::size_t>(i)];
    if (n.feature < 0) continue;
    if (static_cast<std::size_t>(n.feature) >= dims || n.left <= i || n.right <= i ||
        n.left >= count || n.right >= count) {
      throw DataError("tree node " + std::to_string(i) + " is malformed");
    }
  }
  return t;
}

}  // namespace

json Classifier::to_json() const {
  json params;
  switch (algorithm_) {
    case Algorithm::kLogisticRegression:
    case Algorithm::kLinearSvm: {
      const auto& m = std::get<LinearModel>(params_);
      params = {{"weights", m.weights}, {"bias", m.bias}};
      break;
    }
    case Algorithm::kDecisionTree:
      params = {{"nodes", tree_to_json(std::get<DecisionTree>(params_))}};
      break;
    case Algorithm::kRandomForest: {
      json trees = json::array();
      for (const DecisionTree& t : std::get<RandomForest>(params_).trees) {
        trees.push_back(tree_to_json(t));
      }
      params = {{"trees", trees}};
      break;
    }
  }
  return json{{"format", "sgid-classifier"},
              {"version", kModelFormatVersion},
              {"algorithm", std::string(to_string(algorithm_))},
              {"dims", dims_},
              {"config", sgid::to_json(config_)},
              {"params", params}};
}

Classifier Classifier::from_json(const json& j) {
  try {
    if (!j.is_object() || j.value("format", "") != "sgid-classifier") {
      throw DataError("not a classifier model");
    }
    int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw DataError("unsupported classifier format version " + std::to_string(version) +
                      " (expected " + std::to_string(kModelFormatVersion) + ")");
    }
    Algorithm alg = algorithm_from_string(j.at("algorithm").get<std::string>());
    auto dims = j.at("dims").get<std::size_t>();
    TrainConfig config = train_config_from_json(j.at("config"));
    const json& p = j.at("params");
    switch (alg) {
      case Algorithm::kLogisticRegression:
      case Algorithm::kLinearSvm: {
        LinearModel m;
        m.weights = p.at("weights").get<std::vector<double>>();
        m.bias = p.at("bias").get<double>();
        if (m.weights.size() != dims) throw DataError("weight vector length != dims");
        return Classifier(alg, dims, config, m);
      }
      case Algorithm::kDecisionTree:
        return Classifier(alg, dims, config, tree_from_json(p.at("nodes"), dims));
      case Algorithm::kRandomForest: {
        RandomForest f;
        for (const json& t : p.at("trees")) f.trees.push_back(tree_from_json(t, dims));
        if (f.trees.empty()) throw DataError("forest has no trees");
        return Classifier(alg, dims, config, f);
      }
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("corrupt classifier model: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("corrupt classifier model: ") + e.what());
  }
  throw DataError("corrupt classifier model");
}

void save_model(const Classifier& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << m.to_json().dump() << '\n';
  if (!out) throw DataError("failed writing " + path.string());
}

Classifier load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("corrupt model file " + path.string() + ": " + e.what());
  }
  return Classifier::from_json(j);
}

}  // namespace sgid
