#include "sgid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "sgid/csv.hpp"
#include "sgid/error.hpp"
#include "sgid/text.hpp"

namespace sgid {

using nlohmann::json;

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

json ConfusionMatrix::to_json() const {
  return json{{"TP", tp}, {"FP", fp}, {"FN", fn}, {"TN", tn}};
}

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw UsageError("predictions and labels differ in length (" +
                     std::to_string(predictions.size()) + " vs " +
                     std::to_string(labels.size()) + ")");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    bool p = predictions[i] == 1;
    bool y = labels[i] == 1;
    if (p && y) ++cm.tp;
    else if (p) ++cm.fp;
    else if (y) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

double MetricsReport::get(std::string_view name) const {
  if (name == "P0") return p0;
  if (name == "R0") return r0;
  if (name == "F1_0") return f1_0;
  if (name == "P1") return p1;
  if (name == "R1") return r1;
  if (name == "F1_1") return f1_1;
  if (name == "A") return accuracy;
  if (name == "MCC") return mcc;
  throw UsageError("unknown metric '" + std::string(name) + "'");
}

json MetricsReport::to_json() const {
  json j = json::object();
  for (std::string_view n : kNames) j[std::string(n)] = get(n);
  return j;
}

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

MetricsReport metrics(const ConfusionMatrix& cm) {
  const double tp = static_cast<double>(cm.tp), fp = static_cast<double>(cm.fp);
  const double fn = static_cast<double>(cm.fn), tn = static_cast<double>(cm.tn);
  MetricsReport r;
  r.p1 = ratio(tp, tp + fp);
  r.r1 = ratio(tp, tp + fn);
  r.f1_1 = ratio(2.0 * r.p1 * r.r1, r.p1 + r.r1);
  r.p0 = ratio(tn, tn + fn);
  r.r0 = ratio(tn, tn + fp);
  r.f1_0 = ratio(2.0 * r.p0 * r.r0, r.p0 + r.r0);
  r.accuracy = ratio(tp + tn, tp + tn + fp + fn);
  const double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  r.mcc = den == 0.0 ? 0.0 : (tp * tn - fp * fn) / std::sqrt(den);
  return r;
}

MetricsReport mean_report(std::span<const MetricsReport> reports) {
  MetricsReport m;
  if (reports.empty()) return m;
  for (const MetricsReport& r : reports) {
    m.p0 += r.p0;
    m.r0 += r.r0;
    m.f1_0 += r.f1_0;
    m.p1 += r.p1;
    m.r1 += r.r1;
    m.f1_1 += r.f1_1;
    m.accuracy += r.accuracy;
    m.mcc += r.mcc;
  }
  const double n = static_cast<double>(reports.size());
  m.p0 /= n;
  m.r0 /= n;
  m.f1_0 /= n;
  m.p1 /= n;
  m.r1 /= n;
  m.f1_1 /= n;
  m.accuracy /= n;
  m.mcc /= n;
  return m;
}

namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw UsageError("incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The continued fraction converges fast for x < (a+1)/(a+b+2); use the
  // symmetry I_x(a,b) = 1 - I_{1-x}(b,a) otherwise.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_tailed(double t, double df) {
  if (!(df > 0.0)) throw UsageError("degrees of freedom must be > 0");
  if (std::isnan(t)) throw UsageError("t statistic is NaN");
  if (std::isinf(t)) return 0.0;
  return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

json TTestResult::to_json() const {
  json j{{"df", df}, {"p", p}, {"significant", significant}};
  if (std::isinf(t)) j["t"] = t > 0 ? "inf" : "-inf";
  else j["t"] = t;
  return j;
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw UsageError("paired t-test needs equal-length samples");
  const std::size_t n = a.size();
  if (n < 2) throw UsageError("paired t-test needs at least 2 pairs");
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dev = (a[i] - b[i]) - mean;
    ss += dev * dev;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  TTestResult r;
  r.df = n - 1;
  // Differences that agree up to rounding count as constant.
  if (sd <= 1e-12 * std::fabs(mean) || sd == 0.0) {
    if (mean == 0.0) {
      r.t = 0.0;
      r.p = 1.0;
    } else {
      r.t = mean > 0 ? std::numeric_limits<double>::infinity()
                     : -std::numeric_limits<double>::infinity();
      r.p = 0.0;
    }
  } else {
    r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    r.p = student_t_two_tailed(r.t, static_cast<double>(r.df));
  }
  r.significant = r.p < 0.05;
  return r;
}

KappaResult cohens_kappa(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw UsageError("kappa needs equal-length rating vectors");
  if (a.empty()) throw UsageError("kappa needs at least one item");
  const double n = static_cast<double>(a.size());
  std::map<int, std::pair<double, double>> marginals;
  double agree = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) agree += 1.0;
    marginals[a[i]].first += 1.0;
    marginals[b[i]].second += 1.0;
  }
  KappaResult r;
  r.po = agree / n;
  for (const auto& [label, counts] : marginals) r.pe += (counts.first / n) * (counts.second / n);
  if (r.pe >= 1.0) r.kappa = r.po >= 1.0 ? 1.0 : 0.0;
  else r.kappa = (r.po - r.pe) / (1.0 - r.pe);
  return r;
}

double krippendorff_alpha(const RatingMatrix& ratings) {
  if (ratings.size() < 2) throw UsageError("alpha needs at least 2 raters");
  const std::size_t items = ratings.front().size();
  for (const auto& row : ratings) {
    if (row.size() != items) throw UsageError("rating rows differ in length");
  }
  std::map<std::string, std::size_t> codes;
  for (const auto& row : ratings) {
    for (const auto& v : row) {
      if (v) codes.emplace(*v, 0);
    }
  }
  std::size_t next = 0;
  for (auto& [value, code] : codes) code = next++;
  const std::size_t k = codes.size();

  std::vector<double> o(k * k, 0.0);
  std::size_t pairable = 0;
  std::vector<std::size_t> present;
  for (std::size_t u = 0; u < items; ++u) {
    present.clear();
    for (const auto& row : ratings) {
      if (row[u]) present.push_back(codes.at(*row[u]));
    }
    const std::size_t m = present.size();
    if (m < 2) continue;
    ++pairable;
    const double w = 1.0 / static_cast<double>(m - 1);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (i != j) o[present[i] * k + present[j]] += w;
      }
    }
  }
  if (pairable == 0) throw DataError("no item has ratings from two or more raters");

  std::vector<double> nc(k, 0.0);
  double n = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < k; ++d) nc[c] += o[c * k + d];
    n += nc[c];
  }
  double observed = 0.0, expected = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < k; ++d) {
      if (c == d) continue;
      observed += o[c * k + d];
      expected += nc[c] * nc[d];
    }
  }
  if (expected == 0.0) return 1.0;
  return 1.0 - (n - 1.0) * observed / expected;
}

RatingMatrix read_ratings_csv(std::istream& in, std::vector<std::string>* raters) {
  auto records = csv::read_all(in);
  if (records.empty()) throw DataError("ratings file is empty");
  const auto& header = records.front().fields;
  if (header.size() < 2) throw DataError("ratings file needs at least 2 rater columns");
  if (raters) *raters = header;
  RatingMatrix m(header.size());
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& f = records[r].fields;
    if (f.size() != header.size()) {
      throw DataError("ratings line " + std::to_string(records[r].line) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(f.size()));
    }
    for (std::size_t c = 0; c < f.size(); ++c) {
      std::string v = text::trim(f[c]);
      m[c].push_back(v.empty() ? std::nullopt : std::optional<std::string>(v));
    }
  }
  return m;
}

std::vector<double> threshold_grid() {
  std::vector<double> g;
  for (int k = 10; k <= 99; ++k) g.push_back(k / 100.0);
  return g;
}

json SweepResult::to_json() const {
  json c = json::array();
  for (const auto& [t, m] : curve) c.push_back(json::array({t, m}));
  return json{{"threshold", threshold}, {"report", report.to_json()}, {"curve", c}};
}

namespace {

ConfusionMatrix confusion_at(std::span<const double> scores, std::span<const int> labels,
                             double threshold) {
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    bool p = scores[i] >= threshold;
    bool y = labels[i] == 1;
    if (p && y) ++cm.tp;
    else if (p) ++cm.fp;
    else if (y) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

constexpr double kTieEps = 1e-12;

}  // namespace

SweepResult threshold_sweep_groups(const std::vector<std::vector<double>>& scores,
                                   const std::vector<std::vector<int>>& labels,
                                   bool probabilistic) {
  if (!probabilistic) {
    throw UsageError("threshold sweep needs probability scores; SVM margins are not swept");
  }
  if (scores.size() != labels.size() || scores.empty()) {
    throw UsageError("threshold sweep needs matching, non-empty score and label groups");
  }
  for (std::size_t g = 0; g < scores.size(); ++g) {
    if (scores[g].size() != labels[g].size() || scores[g].empty()) {
      throw UsageError("threshold sweep group " + std::to_string(g) + " is malformed");
    }
    for (double v : scores[g]) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw UsageError("threshold sweep needs scores in [0,1]; got " + std::to_string(v));
      }
    }
  }
  SweepResult best;
  bool have = false;
  double best_mcc = 0.0;
  std::vector<MetricsReport> reports(scores.size());
  for (double t : threshold_grid()) {
    for (std::size_t g = 0; g < scores.size(); ++g) {
      reports[g] = metrics(confusion_at(scores[g], labels[g], t));
    }
    MetricsReport mean = mean_report(reports);
    best.curve.emplace_back(t, mean.mcc);
    if (!have || mean.mcc > best_mcc + kTieEps) {
      have = true;
      best_mcc = mean.mcc;
      best.threshold = t;
      best.report = mean;
    }
  }
  return best;
}

SweepResult threshold_sweep(std::span<const double> scores, std::span<const int> labels,
                            bool probabilistic) {
  if (scores.size() != labels.size()) throw UsageError("scores and labels differ in length");
  return threshold_sweep_groups({std::vector<double>(scores.begin(), scores.end())},
                                {std::vector<int>(labels.begin(), labels.end())},
                                probabilistic);
}

}  // namespace sgid
