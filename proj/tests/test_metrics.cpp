#include <cmath>
#include <map>
#include <sstream>

#include "doctest.h"
#include "sgid/error.hpp"
#include "sgid/metrics.hpp"
#include "sgid/rng.hpp"

using namespace sgid;

namespace {

double oracle_mcc(double tp, double fp, double fn, double tn) {
  double d = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  return d == 0 ? 0.0 : (tp * tn - fp * fn) / std::sqrt(d);
}

// Textbook coincidence matrix: every ordered pair of values within a unit
// adds 1/(m_u - 1).
double oracle_alpha(const RatingMatrix& ratings) {
  std::map<std::pair<std::string, std::string>, double> o;
  std::size_t items = ratings.front().size();
  for (std::size_t u = 0; u < items; ++u) {
    std::vector<std::string> vals;
    for (const auto& rater : ratings)
      if (rater[u]) vals.push_back(*rater[u]);
    if (vals.size() < 2) continue;
    for (std::size_t i = 0; i < vals.size(); ++i)
      for (std::size_t j = 0; j < vals.size(); ++j)
        if (i != j) o[{vals[i], vals[j]}] += 1.0 / static_cast<double>(vals.size() - 1);
  }
  std::map<std::string, double> nc;
  double n = 0, observed = 0;
  for (const auto& [ck, v] : o) {
    nc[ck.first] += v;
    n += v;
    if (ck.first != ck.second) observed += v;
  }
  double expected = 0;
  for (const auto& [c, a] : nc)
    for (const auto& [k, b] : nc)
      if (c != k) expected += a * b;
  expected /= n - 1;
  if (expected == 0) return 1.0;
  return 1.0 - observed / expected;
}

struct Sweep {
  double threshold;
  double mcc;
};

Sweep oracle_sweep(const std::vector<double>& s, const std::vector<int>& y) {
  Sweep best{0, -2};
  for (int k = 10; k <= 99; ++k) {
    double thr = k / 100.0;
    double tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      bool p = s[i] >= thr;
      (p ? (y[i] ? tp : fp) : (y[i] ? fn : tn)) += 1;
    }
    double m = oracle_mcc(tp, fp, fn, tn);
    if (m > best.mcc + 1e-12) best = {thr, m};
  }
  return best;
}

}  // namespace

TEST_CASE("confusion matrix") {
  std::vector<int> y{1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
  CHECK(confusion(y, y) == ConfusionMatrix{5, 0, 0, 5});
  std::vector<int> zeros(10, 0);
  CHECK(confusion(zeros, y) == ConfusionMatrix{0, 0, 5, 5});
  std::vector<int> short_y{1};
  CHECK_THROWS_AS(confusion(short_y, y), UsageError);

  ConfusionMatrix a{1, 2, 3, 4};
  a += ConfusionMatrix{1, 1, 1, 1};
  CHECK(a == ConfusionMatrix{2, 3, 4, 5});
}

TEST_CASE("reference confusion matrix") {
  // Synthetic predictions that reproduce the published matrix.
  std::vector<int> preds, labels;
  auto add = [&](int p, int l, int n) {
    for (int i = 0; i < n; ++i) {
      preds.push_back(p);
      labels.push_back(l);
    }
  };
  add(1, 1, 1138);
  add(0, 1, 286);
  add(1, 0, 190);
  add(0, 0, 9393);
  ConfusionMatrix cm = confusion(preds, labels);
  CHECK(cm == ConfusionMatrix{1138, 190, 286, 9393});
  MetricsReport r = metrics(cm);
  CHECK(r.accuracy == doctest::Approx(0.9567547924048333).epsilon(1e-12));
  CHECK(r.mcc == doctest::Approx(0.8029955608369996).epsilon(1e-12));
  CHECK(r.p1 == doctest::Approx(0.8569277108433735).epsilon(1e-12));
  CHECK(r.r1 == doctest::Approx(0.7991573033707865).epsilon(1e-12));
  CHECK(std::fabs(r.accuracy - 0.9568) <= 0.0005);
  CHECK(std::fabs(r.mcc - 0.803) <= 0.002);
  CHECK(r.get("MCC") == r.mcc);
  CHECK(r.get("F1_0") == r.f1_0);
  CHECK_THROWS_AS(r.get("AUC"), UsageError);
}

TEST_CASE("metric conventions and identities") {
  MetricsReport perfect = metrics({5, 0, 0, 5});
  for (auto name : MetricsReport::kNames) CHECK(perfect.get(name) == 1.0);
  MetricsReport all_neg = metrics({0, 0, 5, 5});
  CHECK(all_neg.mcc == 0.0);
  CHECK(all_neg.p1 == 0.0);
  CHECK(all_neg.f1_1 == 0.0);
  CHECK(metrics({}).accuracy == 0.0);

  Rng rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t n = 1 + rng.below(60);
    std::vector<int> p(n), y(n);
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = static_cast<int>(rng.below(2));
      y[i] = static_cast<int>(rng.below(2));
      tp += p[i] && y[i];
      fp += p[i] && !y[i];
      fn += !p[i] && y[i];
      tn += !p[i] && !y[i];
    }
    ConfusionMatrix cm = confusion(p, y);
    CHECK(cm == ConfusionMatrix{tp, fp, fn, tn});
    MetricsReport r = metrics(cm);
    MetricsReport swapped = metrics({tn, fn, fp, tp});
    CHECK(r.mcc == doctest::Approx(swapped.mcc).epsilon(1e-15));
    CHECK(r.p1 == swapped.p0);
    CHECK(r.mcc == doctest::Approx(oracle_mcc(tp, fp, fn, tn)).epsilon(1e-14));
    double pos = static_cast<double>(tp + fn), neg = static_cast<double>(tn + fp);
    CHECK(r.accuracy == doctest::Approx((r.r1 * pos + r.r0 * neg) / n).epsilon(1e-15));
    CHECK(r.mcc >= -1.0);
    CHECK(r.mcc <= 1.0);
  }

  std::vector<MetricsReport> two{metrics({5, 0, 0, 5}), metrics({0, 0, 5, 5})};
  MetricsReport mean = mean_report(two);
  CHECK(mean.mcc == 0.5);
  CHECK(mean.accuracy == 0.75);
}

TEST_CASE("student t distribution") {
  CHECK(regularized_incomplete_beta(2, 3, 0) == 0.0);
  CHECK(regularized_incomplete_beta(2, 3, 1) == 1.0);
  CHECK(regularized_incomplete_beta(1, 1, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(regularized_incomplete_beta(2, 2, 0.5) == doctest::Approx(0.5).epsilon(1e-14));

  CHECK(student_t_two_tailed(1.0, 3) == doctest::Approx(0.39100221895577053).epsilon(1e-10));
  CHECK(student_t_two_tailed(1.5, 9) == doctest::Approx(0.16785065605707486).epsilon(1e-10));
  CHECK(student_t_two_tailed(0.5, 30) == doctest::Approx(0.6207230048851273).epsilon(1e-10));

  // Published critical values for two-tailed 0.05 and 0.01.
  struct Row {
    double df, t05, t01;
  };
  for (Row r : {Row{3, 3.1824463052842638, 5.8409093097333535},
                Row{9, 2.2621571628540997, 3.2498355415921263},
                Row{30, 2.042272456301238, 2.7499956535670305}}) {
    CHECK(std::fabs(student_t_two_tailed(r.t05, r.df) - 0.05) < 1e-4);
    CHECK(std::fabs(student_t_two_tailed(r.t01, r.df) - 0.01) < 1e-4);
    CHECK(student_t_two_tailed(r.t05, r.df) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(student_t_two_tailed(-r.t01, r.df) == doctest::Approx(0.01).epsilon(1e-9));
  }
  CHECK(student_t_two_tailed(0.0, 5) == 1.0);
  CHECK(student_t_two_tailed(INFINITY, 5) == 0.0);
}

TEST_CASE("paired t-test") {
  std::vector<double> a{0.9, 0.8, 0.7, 0.85}, b{0.85, 0.75, 0.72, 0.8};
  TTestResult r = paired_t_test(a, b);
  CHECK(r.t == doctest::Approx(1.857142857142857).epsilon(1e-9));
  CHECK(r.df == 3);
  CHECK(r.p == doctest::Approx(0.1602837154333001).epsilon(1e-9));
  CHECK_FALSE(r.significant);

  TTestResult s = paired_t_test(b, a);
  CHECK(s.t == -r.t);
  CHECK(s.p == r.p);

  TTestResult same = paired_t_test(a, a);
  CHECK(same.t == 0.0);
  CHECK(same.p == 1.0);

  std::vector<double> shifted{1.0, 0.9, 0.8, 0.95};
  TTestResult constant = paired_t_test(shifted, a);
  CHECK(std::isinf(constant.t));
  CHECK(constant.t > 0);
  CHECK(constant.p == 0.0);
  CHECK(constant.significant);

  std::vector<double> one{1.0};
  CHECK_THROWS_AS(paired_t_test(one, one), UsageError);
  CHECK_THROWS_AS(paired_t_test(a, one), UsageError);

  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 2 + rng.below(10);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.uniform01();
      y[i] = rng.uniform01();
    }
    TTestResult f = paired_t_test(x, y), g = paired_t_test(y, x);
    CHECK(f.t == -g.t);
    CHECK(f.p == doctest::Approx(g.p).epsilon(1e-15));
  }
}

TEST_CASE("cohen's kappa") {
  std::vector<int> a{1, 1, 0, 0}, b{1, 0, 1, 0};
  KappaResult k = cohens_kappa(a, b);
  CHECK(k.po == 0.5);
  CHECK(k.pe == 0.5);
  CHECK(k.kappa == 0.0);
  CHECK(cohens_kappa(a, a).kappa == 1.0);

  std::vector<int> ones(4, 1), zeros(4, 0);
  KappaResult opposite = cohens_kappa(ones, zeros);
  CHECK(opposite.po == 0.0);
  CHECK(opposite.pe == 0.0);
  CHECK(opposite.kappa == 0.0);
  CHECK(cohens_kappa(ones, ones).kappa == 1.0);
  std::vector<int> three{1, 0, 1};
  CHECK_THROWS_AS(cohens_kappa(three, a), UsageError);

  // Every binary pair of rating vectors up to six items.
  for (std::size_t n = 1; n <= 6; ++n) {
    for (unsigned ma = 0; ma < (1u << n); ++ma) {
      for (unsigned mb = 0; mb < (1u << n); ++mb) {
        std::vector<int> x(n), y(n);
        double agree = 0, xa = 0, yb = 0;
        for (std::size_t i = 0; i < n; ++i) {
          x[i] = (ma >> i) & 1;
          y[i] = (mb >> i) & 1;
          agree += x[i] == y[i];
          xa += x[i];
          yb += y[i];
        }
        double po = agree / n;
        double pe = (xa / n) * (yb / n) + (1 - xa / n) * (1 - yb / n);
        double want = pe < 1 ? (po - pe) / (1 - pe) : (po == 1 ? 1.0 : 0.0);
        CHECK(std::fabs(cohens_kappa(x, y).kappa - want) <= 1e-12);
      }
    }
  }
}

TEST_CASE("krippendorff's alpha") {
  using R = std::optional<std::string>;
  RatingMatrix unanimous{{R("A"), R("B"), R("A")}, {R("A"), R("B"), R("A")}};
  CHECK(krippendorff_alpha(unanimous) == 1.0);

  RatingMatrix example{{R("A"), R("A"), R("B"), R("B")}, {R("A"), R("B"), R("B"), R("B")}};
  CHECK(std::fabs(krippendorff_alpha(example) - oracle_alpha(example)) <= 1e-12);
  CHECK(krippendorff_alpha(example) == doctest::Approx(8.0 / 15.0).epsilon(1e-12));

  RatingMatrix single{{R("A")}, {R("B")}};
  CHECK(krippendorff_alpha(single) <= 0.0);

  RatingMatrix lonely{{R("A"), std::nullopt}, {std::nullopt, R("B")}};
  CHECK_THROWS_AS(krippendorff_alpha(lonely), DataError);

  // Exhaustive: two raters, up to six items, values A/B/missing.
  std::size_t checked = 0;
  for (std::size_t n = 1; n <= 6; ++n) {
    std::size_t cases = 1;
    for (std::size_t i = 0; i < 2 * n; ++i) cases *= 3;
    for (std::size_t c = 0; c < cases; ++c) {
      RatingMatrix m(2, std::vector<R>(n));
      std::size_t code = c;
      bool pairable = false;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < 2; ++r) {
          std::size_t v = code % 3;
          code /= 3;
          if (v < 2) m[r][i] = std::string(1, static_cast<char>('A' + v));
        }
        pairable = pairable || (m[0][i] && m[1][i]);
      }
      if (!pairable) {
        CHECK_THROWS_AS(krippendorff_alpha(m), DataError);
        continue;
      }
      double got = krippendorff_alpha(m), want = oracle_alpha(m);
      if (std::fabs(got - want) > 1e-12) {
        FAIL_CHECK("alpha mismatch at n=" << n << " case " << c);
      }
      ++checked;
    }
  }
  CHECK(checked > 500000);

  // Three raters with gaps.
  RatingMatrix three{{R("A"), R("B"), std::nullopt, R("C")},
                     {R("A"), R("B"), R("C"), R("C")},
                     {std::nullopt, R("A"), R("C"), R("A")}};
  CHECK(std::fabs(krippendorff_alpha(three) - oracle_alpha(three)) <= 1e-12);
}

TEST_CASE("ratings csv") {
  std::istringstream in("ann,bob\nA,B\n,A\nC,\n");
  std::vector<std::string> raters;
  RatingMatrix m = read_ratings_csv(in, &raters);
  CHECK(raters == std::vector<std::string>{"ann", "bob"});
  REQUIRE(m.size() == 2);
  REQUIRE(m[0].size() == 3);
  CHECK(m[0][0] == std::optional<std::string>("A"));
  CHECK_FALSE(m[0][1].has_value());
  CHECK(m[1][1] == std::optional<std::string>("A"));
  CHECK_FALSE(m[1][2].has_value());

  std::istringstream ragged("a,b\nx\n");
  CHECK_THROWS_AS(read_ratings_csv(ragged), DataError);
}

TEST_CASE("threshold sweep") {
  auto grid = threshold_grid();
  REQUIRE(grid.size() == 90);
  CHECK(grid.front() == 0.10);
  CHECK(grid.back() == 0.99);
  CHECK(grid[50] == 60 / 100.0);

  std::vector<double> sep{0.1, 0.3, 0.55, 0.6, 0.8, 0.95};
  std::vector<int> sy{0, 0, 0, 1, 1, 1};
  SweepResult s = threshold_sweep(sep, sy);
  CHECK(s.threshold == 0.56);
  CHECK(s.report.mcc == 1.0);
  CHECK(s.curve.size() == 90);

  std::vector<double> flat(6, 0.5);
  SweepResult f = threshold_sweep(flat, sy);
  CHECK(f.threshold == 0.10);
  CHECK(f.report.mcc == 0.0);

  std::vector<double> margins{-2.0, 3.0};
  std::vector<int> my{0, 1};
  CHECK_THROWS_AS(threshold_sweep(margins, my, false), UsageError);
  CHECK_THROWS_AS(threshold_sweep(margins, my, true), UsageError);

  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 10 + rng.below(40);
    std::vector<double> sc(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(rng.below(2));
      // Coarse scores so that ties between thresholds are common.
      sc[i] = std::min(1.0, static_cast<double>(rng.below(21)) / 20.0 + 0.15 * y[i]);
    }
    Sweep want = oracle_sweep(sc, y);
    SweepResult got = threshold_sweep(sc, y);
    CHECK(got.threshold == want.threshold);
    CHECK(got.report.mcc == doctest::Approx(want.mcc).epsilon(1e-12));
  }
}

TEST_CASE("grouped threshold sweep") {
  Rng rng(78);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::vector<double>> scores(3);
    std::vector<std::vector<int>> labels(3);
    for (std::size_t g = 0; g < 3; ++g) {
      for (int i = 0; i < 15; ++i) {
        int y = static_cast<int>(rng.below(2));
        labels[g].push_back(y);
        scores[g].push_back(std::min(1.0, rng.uniform01() * 0.8 + 0.2 * y));
      }
    }
    double best_t = 0, best_m = -2;
    for (int k = 10; k <= 99; ++k) {
      double thr = k / 100.0, sum = 0;
      for (std::size_t g = 0; g < 3; ++g) {
        double tp = 0, fp = 0, fn = 0, tn = 0;
        for (std::size_t i = 0; i < scores[g].size(); ++i) {
          bool p = scores[g][i] >= thr;
          (p ? (labels[g][i] ? tp : fp) : (labels[g][i] ? fn : tn)) += 1;
        }
        sum += oracle_mcc(tp, fp, fn, tn);
      }
      if (sum / 3 > best_m + 1e-12) {
        best_m = sum / 3;
        best_t = thr;
      }
    }
    SweepResult got = threshold_sweep_groups(scores, labels);
    CHECK(got.threshold == best_t);
    CHECK(got.report.mcc == doctest::Approx(best_m).epsilon(1e-12));
  }
}
