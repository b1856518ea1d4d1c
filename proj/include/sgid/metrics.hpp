#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace sgid {

/// Positive class = SGID (label 1).
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
  nlohmann::json to_json() const;
};

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels);

struct MetricsReport {
  double p0 = 0, r0 = 0, f1_0 = 0;
  double p1 = 0, r1 = 0, f1_1 = 0;
  double accuracy = 0;
  double mcc = 0;

  static constexpr std::array<std::string_view, 8> kNames = {"P0", "R0", "F1_0", "P1",
                                                            "R1", "F1_1", "A", "MCC"};
  double get(std::string_view name) const;
  nlohmann::json to_json() const;
};

/// Ratios with a zero denominator are defined as 0.
MetricsReport metrics(const ConfusionMatrix& cm);

/// Per-metric arithmetic mean.
MetricsReport mean_report(std::span<const MetricsReport> reports);

// Paired t-test.

/// I_x(a, b), by continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

/// Two-tailed p-value of Student's t with df degrees of freedom.
double student_t_two_tailed(double t, double df);

struct TTestResult {
  double t = 0.0;  // +-infinity when every difference is the same nonzero value
  std::size_t df = 0;
  double p = 1.0;
  bool significant = false;  // p < 0.05

  nlohmann::json to_json() const;
};

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

// Inter-rater agreement.

struct KappaResult {
  double kappa = 0.0;
  double po = 0.0;
  double pe = 0.0;
};

/// Cohen's kappa for two raters. pe = 1 gives kappa 1 when po = 1, else 0.
KappaResult cohens_kappa(std::span<const int> a, std::span<const int> b);

/// ratings[rater][item]; nullopt = missing.
using RatingMatrix = std::vector<std::vector<std::optional<std::string>>>;

/// Nominal Krippendorff's alpha from the coincidence matrix. Items with
/// fewer than two ratings are skipped. When only one value occurs at all,
/// there is no expected disagreement and alpha is reported as 1.
double krippendorff_alpha(const RatingMatrix& ratings);

/// CSV with a header of rater names, one row per item, blank = missing.
/// Returns the matrix transposed to rater-major order.
RatingMatrix read_ratings_csv(std::istream& in, std::vector<std::string>* raters = nullptr);

// Threshold sweep.

/// 0.10, 0.11, ..., 0.99 computed as k/100.
std::vector<double> threshold_grid();

struct SweepResult {
  double threshold = 0.5;
  MetricsReport report;
  std::vector<std::pair<double, double>> curve;  // (threshold, MCC)

  nlohmann::json to_json() const;
};

/// Maximizes MCC over the grid, ties to the lowest threshold.
/// Throws UsageError when the scores are not probabilities.
SweepResult threshold_sweep(std::span<const double> scores, std::span<const int> labels,
                            bool probabilistic = true);

/// Same, maximizing the mean per-group MCC (e.g. over CV folds); the report
/// is the per-group mean at the chosen threshold.
SweepResult threshold_sweep_groups(const std::vector<std::vector<double>>& scores,
                                   const std::vector<std::vector<int>>& labels,
                                   bool probabilistic = true);

}  // namespace sgid
