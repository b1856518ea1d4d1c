#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <istream>
#include <vector>

#include "json.hpp"
#include "sgid/features.hpp"

namespace sgid {

enum class Algorithm { kDecisionTree, kLogisticRegression, kRandomForest, kLinearSvm };

std::string_view to_string(Algorithm a);
Algorithm algorithm_from_string(std::string_view s);  // dt | lr | rf | svm

struct TreeParams {
  std::size_t max_depth = 0;  // 0 = unlimited
  std::size_t min_samples_leaf = 1;
};

struct LogisticParams {
  double l2 = 1.0;  // penalty (l2/2)||w||^2; the intercept is not penalized
  std::size_t max_iterations = 500;
  double tolerance = 1e-6;  // on the Euclidean gradient norm
  std::size_t history = 10;  // L-BFGS memory
};

struct ForestParams {
  std::size_t n_trees = 100;
  bool bootstrap = true;
  double feature_fraction = 0.0;  // <= 0 means sqrt(dims) features per split
};

struct SvmParams {
  double c = 1.0;  // lambda = 1 / (c * n)
  std::size_t epochs = 50;
};

struct TrainConfig {
  Algorithm algorithm = Algorithm::kLogisticRegression;
  double class_weight = 1.0;  // multiplier on SGID (label 1) samples
  std::uint64_t seed = 42;
  TreeParams tree;
  LogisticParams logistic;
  ForestParams forest;
  SvmParams svm;
};

nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

/// Rows and binary labels over a fixed column count.
struct Dataset {
  std::vector<SparseVector> rows;
  std::vector<int> labels;
  std::size_t dims = 0;

  std::size_t size() const { return rows.size(); }
};

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // x[feature] <= threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;  // weighted positive fraction of the node's samples
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  double score(const SparseVector& x) const;
};

struct RandomForest {
  std::vector<DecisionTree> trees;
  double score(const SparseVector& x) const;
};

/// A trained classifier. Probabilistic algorithms (DT, LR, RF) score in
/// [0,1]; the SVM scores with an unbounded margin.
class Classifier {
 public:
  using Params = std::variant<LinearModel, DecisionTree, RandomForest>;

  Classifier(Algorithm algorithm, std::size_t dims, TrainConfig config, Params params);

  Algorithm algorithm() const { return algorithm_; }
  std::size_t dims() const { return dims_; }
  const TrainConfig& config() const { return config_; }
  const Params& params() const { return params_; }
  bool probabilistic() const { return algorithm_ != Algorithm::kLinearSvm; }

  /// Throws UsageError when x has a column outside the training dimensionality.
  double score(const SparseVector& x) const;

  nlohmann::json to_json() const;
  static Classifier from_json(const nlohmann::json& j);

 private:
  Algorithm algorithm_;
  std::size_t dims_;
  TrainConfig config_;
  Params params_;
};

/// Per-sample influence: class_weight for label 1, 1 otherwise.
std::vector<double> class_weights(std::span<const int> labels, double class_weight);

/// Deterministic in (data, config). Rows are first put in a canonical order
/// (label, then row contents), so input order does not change the model.
Classifier train(const Dataset& data, const TrainConfig& config);

double predict_score(const Classifier& m, const SparseVector& x);

/// 1 iff score >= threshold. Probabilistic models require threshold in [0,1].
int predict(const Classifier& m, const SparseVector& x, double threshold = 0.5);

inline constexpr int kModelFormatVersion = 1;

void save_model(const Classifier& m, const std::filesystem::path& path);
Classifier load_model(const std::filesystem::path& path);

// Building blocks exposed for testing.

/// Weighted binary Gini impurity 1 - p^2 - (1-p)^2.
double gini(double positive_weight, double negative_weight);

struct SplitChoice {
  std::uint32_t feature = 0;
  double threshold = 0.0;
  double child_impurity = 0.0;  // w_left * gini(left) + w_right * gini(right)
};

/// Best Gini split over all features for the given rows; ties go to the
/// lowest feature, then the lowest threshold. nullopt when no feature splits.
std::optional<SplitChoice> best_split(const Dataset& data, std::span<const std::size_t> rows,
                                      std::span<const double> weights,
                                      std::size_t min_samples_leaf = 1);

DecisionTree fit_tree(const Dataset& data, std::span<const double> weights,
                      const TreeParams& params, std::size_t max_features,
                      std::uint64_t seed);

/// Weighted, L2-regularized logistic loss over parameters (w..., b).
class LogisticObjective {
 public:
  LogisticObjective(const Dataset& data, std::span<const double> weights, double l2);

  std::size_t dims() const { return dims_ + 1; }
  double value(std::span<const double> params) const;
  /// Writes the gradient into grad and returns the loss.
  double value_and_gradient(std::span<const double> params, std::span<double> grad) const;

 private:
  const Dataset& data_;
  std::span<const double> weights_;
  double l2_;
  std::size_t dims_;
};

struct OptimizerTrace {
  std::vector<double> losses;  // loss after each accepted iteration, losses[0] at start
  double final_gradient_norm = 0.0;
  std::size_t iterations = 0;
};

LinearModel fit_logistic(const Dataset& data, std::span<const double> weights,
                         const LogisticParams& params, OptimizerTrace* trace = nullptr);

LinearModel fit_linear_svm(const Dataset& data, std::span<const double> weights,
                           const SvmParams& params, std::uint64_t seed);

// External scorers standing in for neural models.

struct ScorerSpec {
  enum class Kind { kFile, kCommand } kind = Kind::kFile;
  std::string target;  // TSV path or shell command

  /// "file:PATH", "cmd:COMMAND", or a bare path (treated as file).
  static ScorerSpec parse(std::string_view s);
};

struct Corpus;

/// Reads `id<TAB>probability` lines. Every corpus id must be covered and
/// every value must lie in [0,1]; otherwise DataError.
std::unordered_map<std::string, double> external_scores(const ScorerSpec& spec,
                                                        const Corpus& corpus);

std::unordered_map<std::string, double> parse_score_tsv(std::istream& in,
                                                        std::string_view source);

}  // namespace sgid
