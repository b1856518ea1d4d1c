#include <algorithm>
#include <filesystem>

#include "doctest.h"
#include "sgid/error.hpp"
#include "sgid/pipeline.hpp"
#include "sgid/rng.hpp"

using namespace sgid;

namespace {

const Resources& resources() {
  static const Resources r = Resources::load_default();
  return r;
}

PreparedCorpus make_corpus(const std::vector<std::string>& texts, const std::vector<int>& labels) {
  PreparedCorpus c;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    c.ids.push_back("t" + std::to_string(i));
    c.raw.push_back(texts[i]);
    c.texts.push_back(texts[i]);
    c.labels.push_back(labels[i]);
    c.categories.emplace_back();
  }
  return c;
}

// Positives carry a lexicon keyword plus noise; negatives are noise only.
PreparedCorpus keyword_corpus(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  const std::vector<std::string> bad{"bitch", "slut", "whore", "tits", "sexy"};
  const std::vector<std::string> noise{"merge", "build", "test", "review", "patch", "docs",
                                       "commit", "branch", "release", "fix", "issue", "ci"};
  std::vector<std::string> texts;
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) {
    int y = i % 4 == 0 ? 1 : 0;
    std::string t;
    for (int w = 0; w < 4; ++w) t += noise[rng.below(noise.size())] + " ";
    if (y) t += bad[rng.below(bad.size())] + " ";
    t += "n" + std::to_string(i);
    texts.push_back(t);
    labels.push_back(y);
  }
  return make_corpus(texts, labels);
}

PipelineConfig config(Algorithm a) {
  PipelineConfig c;
  c.train.algorithm = a;
  c.train.forest.n_trees = 10;
  return c;
}

}  // namespace

TEST_CASE("config serialization and descriptor") {
  PipelineConfig c = config(Algorithm::kRandomForest);
  c.strategy = Strategy::kRandom;
  c.ratio = Ratio::parse("0.66");
  c.word_counts = true;
  CHECK(c.descriptor() == "rf|random|0.66|wc=1|cw=1");
  PipelineConfig back = PipelineConfig::from_json(c.to_json());
  CHECK(back.descriptor() == c.descriptor());
  CHECK(back.to_json() == c.to_json());

  PipelineConfig plain = config(Algorithm::kLogisticRegression);
  CHECK(plain.descriptor() == "lr|none|-|wc=0|cw=1");
  CHECK(plain.effective_threshold() == 0.5);
  CHECK(config(Algorithm::kLinearSvm).effective_threshold() == 0.0);
  plain.threshold = 0.3;
  CHECK(plain.effective_threshold() == 0.3);

}

TEST_CASE("prepare requires labels") {
  Corpus corpus;
  LabeledComment a;
  a.comment.id = "a";
  a.comment.text = "It's fine";
  a.label = 0;
  corpus.items.push_back(a);
  PreparedCorpus p = prepare(corpus, PreprocessConfig{}, resources().tables);
  CHECK(p.texts[0] == "it is fine");
  CHECK(p.raw[0] == "It's fine");
  corpus.items[0].label.reset();
  CHECK_THROWS_AS(prepare(corpus, PreprocessConfig{}, resources().tables), DataError);
}

TEST_CASE("ten folds over a hundred items") {
  PreparedCorpus data = keyword_corpus(100, 1);
  FoldPlan plan = make_folds(100, 10, 42);
  CvResult cv = cross_validate(data, config(Algorithm::kLogisticRegression), plan, resources());
  REQUIRE(cv.folds.size() == 10);
  std::vector<std::size_t> seen;
  for (const FoldOutcome& f : cv.folds) {
    CHECK(f.test_indices.size() == 10);
    CHECK(f.cm.total() == 10);
    CHECK(f.scores.size() == 10);
    for (Provenance p : f.test_provenance) CHECK(p == Provenance::kOriginal);
    CHECK(f.train_rows == 90);
    seen.insert(seen.end(), f.test_indices.begin(), f.test_indices.end());
  }
  std::sort(seen.begin(), seen.end());
  for (std::size_t i = 0; i < 100; ++i) CHECK(seen[i] == i);

  ConfusionMatrix pooled;
  for (const FoldOutcome& f : cv.folds) pooled += f.cm;
  CHECK(pooled == cv.pooled);
  CHECK(cv.metric_values("MCC").size() == 10);

  // Identical inputs give identical results.
  CvResult again = cross_validate(data, config(Algorithm::kLogisticRegression), plan, resources());
  CHECK(again.to_json(true).dump() == cv.to_json(true).dump());
}

TEST_CASE("augmentation touches training folds only") {
  PreparedCorpus data = keyword_corpus(100, 2);
  PipelineConfig c = config(Algorithm::kDecisionTree);
  c.strategy = Strategy::kMixed;
  c.ratio = Ratio::parse("1");
  CvResult cv = cross_validate(data, c, make_folds(100, 5, 3), resources());
  for (const FoldOutcome& f : cv.folds) {
    CHECK(f.cm.total() == f.test_indices.size());
    CHECK(f.augmentation.n_add > 0);
    CHECK(f.train_rows == 100 - f.test_indices.size() + f.augmentation.n_add);
    CHECK(f.augmentation.x + f.augmentation.n_add >= f.augmentation.y);
  }
}

TEST_CASE("constant model") {
  PreparedCorpus data = keyword_corpus(100, 4);
  PipelineConfig c = config(Algorithm::kLogisticRegression);
  c.threshold = 1.0;  // nothing reaches it: every prediction is the majority class
  FoldPlan plan = make_folds(100, 10, 5);
  CvResult cv = cross_validate(data, c, plan, resources());
  for (const FoldOutcome& f : cv.folds) {
    std::size_t neg = std::count(f.test_labels.begin(), f.test_labels.end(), 0);
    CHECK(f.report.accuracy == doctest::Approx(static_cast<double>(neg) / f.test_labels.size()));
    CHECK(f.report.mcc == 0.0);
  }
  auto a = cv.metric_values("MCC");
  CvResult again = cross_validate(data, c, plan, resources());
  auto b = again.metric_values("MCC");
  TTestResult t = paired_t_test(a, b);
  CHECK(t.p == 1.0);
}

TEST_CASE("duplicated rows leak across folds") {
  Rng rng(9);
  std::vector<std::string> texts;
  std::vector<int> labels;
  for (int i = 0; i < 100; ++i) {
    std::string t;
    for (int w = 0; w < 3; ++w) t += "w" + std::to_string(rng.below(400)) + " ";
    texts.push_back(t + "u" + std::to_string(i));
    labels.push_back(rng.below(10) < 3 ? 1 : 0);
  }
  std::vector<std::string> dup_texts = texts;
  std::vector<int> dup_labels = labels;
  dup_texts.insert(dup_texts.end(), texts.begin(), texts.end());
  dup_labels.insert(dup_labels.end(), labels.begin(), labels.end());

  PipelineConfig c = config(Algorithm::kDecisionTree);
  CvResult clean = cross_validate(make_corpus(texts, labels), c, make_folds(100, 5, 1), resources());
  CvResult leaky =
      cross_validate(make_corpus(dup_texts, dup_labels), c, make_folds(200, 5, 1), resources());
  MESSAGE("clean MCC " << clean.mean.mcc << ", duplicated MCC " << leaky.mean.mcc);
  CHECK(leaky.mean.mcc > clean.mean.mcc + 0.3);
}

TEST_CASE("a training fold without a class is rejected") {
  PreparedCorpus data = keyword_corpus(20, 6);
  std::fill(data.labels.begin(), data.labels.end(), 0);
  data.labels[3] = 1;
  try {
    cross_validate(data, config(Algorithm::kLogisticRegression), make_folds(20, 4, 1), resources());
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("fold") != std::string::npos);
  }
  CHECK_THROWS_AS(cross_validate(data, config(Algorithm::kDecisionTree), make_folds(19, 4, 1),
                                 resources()),
                  UsageError);
}

TEST_CASE("cv threshold sweep") {
  PreparedCorpus data = keyword_corpus(100, 7);
  CvResult cv = cross_validate(data, config(Algorithm::kLogisticRegression), make_folds(100, 5, 2),
                               resources());
  SweepResult s = sweep_cv(cv);
  CHECK(s.threshold >= 0.10);
  CHECK(s.threshold <= 0.99);
  std::vector<std::vector<double>> scores;
  std::vector<std::vector<int>> labels;
  for (const auto& f : cv.folds) {
    scores.push_back(f.scores);
    labels.push_back(f.test_labels);
  }
  CHECK(threshold_sweep_groups(scores, labels).threshold == s.threshold);
  CHECK_THROWS_AS(sweep_cv(cross_validate(data, config(Algorithm::kLinearSvm),
                                          make_folds(100, 5, 2), resources())),
                  UsageError);
}

TEST_CASE("small grid matches brute-force evaluation") {
  PreparedCorpus data = keyword_corpus(80, 8);
  FoldPlan plan = make_folds(80, 4, 11);
  GridSpec grid{{Algorithm::kDecisionTree, Algorithm::kLogisticRegression},
                {Strategy::kRandom},
                {Ratio::parse("0.5")},
                {false, true},
                {1.0}};
  CHECK(grid.cells() == 4);
  PipelineConfig base;
  auto ranked = grid_search(data, base, grid, plan, resources(), 1);
  REQUIRE(ranked.size() == 4);

  std::vector<CvResult> brute;
  for (Algorithm a : grid.algorithms) {
    for (bool wc : grid.word_counts) {
      PipelineConfig c = base;
      c.train.algorithm = a;
      c.strategy = Strategy::kRandom;
      c.ratio = Ratio::parse("0.5");
      c.word_counts = wc;
      brute.push_back(cross_validate(data, c, plan, resources()));
    }
  }
  std::sort(brute.begin(), brute.end(), [](const CvResult& x, const CvResult& y) {
    if (x.mean.mcc != y.mean.mcc) return x.mean.mcc > y.mean.mcc;
    if (x.mean.f1_1 != y.mean.f1_1) return x.mean.f1_1 > y.mean.f1_1;
    return x.descriptor < y.descriptor;
  });
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(ranked[i].rank == i + 1);
    CHECK(ranked[i].result.descriptor == brute[i].descriptor);
    CHECK(ranked[i].result.mean.mcc == brute[i].mean.mcc);
  }

  auto parallel = grid_search(data, base, grid, plan, resources(), 3);
  CHECK(grid_table_csv(parallel) == grid_table_csv(ranked));
  CHECK(GridSpec::default_grid().cells() == 216);
}

TEST_CASE("pipeline model files") {
  PreparedCorpus data = keyword_corpus(60, 10);
  PipelineConfig c = config(Algorithm::kRandomForest);
  c.word_counts = true;
  PipelineModel m = fit_pipeline(data.texts, data.labels, c, resources(), 1);
  CHECK(m.classifier.dims() == m.tfidf.dims() + 7);

  auto path = std::filesystem::temp_directory_path() / "sgid-test-pipeline.json";
  m.save(path);
  PipelineModel back = PipelineModel::load(path);
  for (const auto& t : data.texts) {
    CHECK(back.score(t, resources().lexicon()) == m.score(t, resources().lexicon()));
  }
  nlohmann::json j = m.to_json();
  j["config"]["word_counts"] = false;
  CHECK_THROWS_AS(PipelineModel::from_json(j), DataError);
}

TEST_CASE("error report") {
  std::vector<std::string> texts{"you stupid bitch", "what a slut", "merge the patch",
                                 "fix the build", "docs look good", "bitch please",
                                 "run the tests", "nice slut"};
  std::vector<int> labels{1, 1, 0, 0, 0, 1, 0, 1};
  // Only the pejorative count separates the classes perfectly.
  PipelineConfig c = config(Algorithm::kDecisionTree);
  c.word_counts = true;
  PipelineModel m = fit_pipeline(texts, labels, c, resources(), 1);

  PreparedCorpus train = make_corpus(texts, labels);
  ErrorReport perfect = error_report(m, train, resources().lexicon());
  CHECK(perfect.false_positives.empty());
  CHECK(perfect.false_negatives.empty());

  PreparedCorpus probe = make_corpus({"women cannot write code", "fix the build"}, {1, 0});
  probe.categories[0] = {"Stereotyping"};
  ErrorReport r = error_report(m, probe, resources().lexicon());
  REQUIRE(r.false_negatives.size() == 1);
  CHECK(r.false_negatives[0].id == "t0");
  CHECK(r.false_negatives[0].sgid_categories == std::set<std::string>{"Stereotyping"});
  CHECK(r.categories.size() == kSgidCategories.size());
  for (const CategoryMisses& row : r.categories) {
    if (row.category == "Stereotyping") {
      CHECK(row.instances == 1);
      CHECK(row.missed == 1);
      CHECK(row.rate == std::optional<double>(1.0));
    } else {
      CHECK(row.instances == 0);
      CHECK_FALSE(row.rate.has_value());
    }
  }
  nlohmann::json j = r.to_json();
  bool saw_na = false;
  for (const auto& row : j.at("categories")) saw_na = saw_na || row.at("fn_rate") == "n/a";
  CHECK(saw_na);
  CHECK(r.to_text().find("Stereotyping") != std::string::npos);
}
