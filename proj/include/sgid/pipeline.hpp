#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "sgid/augmentation.hpp"
#include "sgid/corpus.hpp"
#include "sgid/features.hpp"
#include "sgid/lexicon.hpp"
#include "sgid/metrics.hpp"
#include "sgid/models.hpp"
#include "sgid/preprocess.hpp"

namespace sgid {

/// Everything that determines a trained model, end to end.
struct PipelineConfig {
  PreprocessConfig preprocess;
  TfIdfOptions tfidf;
  bool word_counts = false;
  TrainConfig train;
  std::optional<Strategy> strategy;  // nullopt = no oversampling
  Ratio ratio;
  std::optional<double> threshold;  // default 0.5 (probabilistic) or 0 (SVM)

  double effective_threshold() const;
  /// Short stable key, e.g. "rf|random|0.66|wc=1|cw=1".
  std::string descriptor() const;
  nlohmann::json to_json() const;
  static PipelineConfig from_json(const nlohmann::json& j);
};

nlohmann::json to_json(const PreprocessConfig& c);
PreprocessConfig preprocess_config_from_json(const nlohmann::json& j);

/// Tables and groups loaded once and shared across folds and grid cells.
struct Resources {
  PreprocessTables tables;
  EquivalenceGroups groups;

  static Resources load_default();
  const Lexicon& lexicon() const { return tables.lexicon; }
};

/// A labeled corpus after preprocessing.
struct PreparedCorpus {
  std::vector<std::string> ids;
  std::vector<std::string> raw;
  std::vector<std::string> texts;
  std::vector<int> labels;
  std::vector<std::set<std::string>> categories;

  std::size_t size() const { return texts.size(); }
};

/// Requires every item to be labeled (DataError otherwise).
PreparedCorpus prepare(const Corpus& corpus, const PreprocessConfig& config,
                       const PreprocessTables& tables);

struct PipelineModel {
  PipelineConfig config;
  TfIdfModel tfidf;
  Classifier classifier;
  AugmentationPlan augmentation;

  /// Features of an already preprocessed text.
  SparseVector features(const std::string& text, const Lexicon& lexicon) const;
  double score(const std::string& text, const Lexicon& lexicon) const;
  int predict(const std::string& text, const Lexicon& lexicon) const;

  nlohmann::json to_json() const;
  static PipelineModel from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static PipelineModel load(const std::filesystem::path& path);
};

inline constexpr int kPipelineFormatVersion = 1;

/// Oversamples (when configured), fits TF-IDF on the resulting training
/// texts and trains the classifier.
PipelineModel fit_pipeline(const std::vector<std::string>& texts, const std::vector<int>& labels,
                           const PipelineConfig& config, const Resources& resources,
                           std::uint64_t augmentation_seed);

struct FoldOutcome {
  std::size_t fold = 0;
  std::vector<std::size_t> test_indices;
  std::vector<int> test_labels;
  std::vector<double> scores;
  std::vector<int> predictions;
  std::vector<Provenance> test_provenance;  // always kOriginal
  ConfusionMatrix cm;
  MetricsReport report;
  AugmentationPlan augmentation;
  std::size_t train_rows = 0;  // after oversampling
};

struct CvResult {
  PipelineConfig config;
  std::string descriptor;
  std::uint64_t seed = 0;
  std::size_t k = 0;
  std::vector<FoldOutcome> folds;
  MetricsReport mean;  // per-fold average
  ConfusionMatrix pooled;
  MetricsReport pooled_report;
  std::vector<std::string> warnings;

  std::vector<double> metric_values(std::string_view metric) const;
  nlohmann::json to_json(bool include_scores = false) const;
};

/// Fits every fold on its training part only and evaluates on the held-out
/// part. A training part missing a class throws DataError naming the fold.
CvResult cross_validate(const PreparedCorpus& data, const PipelineConfig& config,
                        const FoldPlan& plan, const Resources& resources);

/// Threshold sweep over the held-out scores, maximizing mean MCC across folds.
SweepResult sweep_cv(const CvResult& cv);

struct GridSpec {
  std::vector<Algorithm> algorithms;
  std::vector<Strategy> strategies;
  std::vector<Ratio> ratios;
  std::vector<bool> word_counts;
  std::vector<double> class_weights;

  std::size_t cells() const;
  /// Every algorithm, strategy and ratio, both word-count settings, weight 1.
  static GridSpec default_grid();
};

struct GridCell {
  std::size_t rank = 0;  // 1-based
  PipelineConfig config;
  CvResult result;
};

/// Evaluates every cell (in parallel when jobs > 1) and ranks by mean MCC,
/// then mean F1_1, then descriptor. The result does not depend on jobs.
std::vector<GridCell> grid_search(const PreparedCorpus& data, const PipelineConfig& base,
                                  const GridSpec& grid, const FoldPlan& plan,
                                  const Resources& resources, std::size_t jobs = 1);

/// Ranking order used by grid_search.
bool ranks_before(const CvResult& a, const CvResult& b);

std::string grid_table_csv(const std::vector<GridCell>& cells);
std::string metrics_table_csv(const CvResult& cv);

struct ErrorEntry {
  std::string id;
  std::string text;
  double score = 0.0;
  int label = 0;
  std::set<std::string> keyword_categories;
  std::set<std::string> sgid_categories;
};

struct CategoryMisses {
  std::string category;
  std::size_t instances = 0;  // positives annotated with the category
  std::size_t missed = 0;     // of which predicted 0
  std::optional<double> rate;  // nullopt when there are no instances
};

struct ErrorReport {
  ConfusionMatrix cm;
  std::vector<ErrorEntry> false_positives;
  std::vector<ErrorEntry> false_negatives;
  std::vector<CategoryMisses> categories;  // one row per rubric category

  nlohmann::json to_json() const;
  std::string to_text() const;
};

ErrorReport error_report(const PipelineModel& model, const PreparedCorpus& data,
                         const Lexicon& lexicon);

}  // namespace sgid
