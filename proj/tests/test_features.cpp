#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "sgid/error.hpp"
#include "sgid/features.hpp"
#include "sgid/rng.hpp"

using namespace sgid;

namespace {

std::vector<std::string> tokens(const std::string& d) {
  std::istringstream in(d);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

// Nested-loop recomputation of the tf-idf formulas, keyed by word.
std::map<std::string, double> oracle(const std::vector<std::string>& corpus,
                                     const std::string& doc) {
  std::set<std::string> vocab;
  for (const auto& d : corpus)
    for (const auto& w : tokens(d)) vocab.insert(w);
  auto dt = tokens(doc);
  std::map<std::string, double> out;
  for (const auto& w : vocab) {
    double count = 0;
    for (const auto& t : dt) count += (t == w);
    if (count == 0) continue;
    double df = 0;
    for (const auto& d : corpus) {
      bool seen = false;
      for (const auto& t : tokens(d)) seen = seen || t == w;
      df += seen;
    }
    out[w] = count / static_cast<double>(dt.size()) *
             std::log(static_cast<double>(corpus.size()) / df);
  }
  return out;
}

std::vector<double> dense(const TfIdfModel& m, const FeatureVector& v) {
  std::vector<double> out(m.dims(), 0.0);
  for (std::size_t k = 0; k < v.base.nnz(); ++k) out[v.base.indices[k]] = v.base.values[k];
  return out;
}

bool rel_close(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max(std::fabs(b), 1e-300) || a == b;
}

std::vector<std::string> random_corpus(Rng& rng) {
  std::size_t n_docs = 1 + rng.below(20);
  std::size_t vocab = 2 + rng.below(30);
  std::vector<std::string> corpus;
  for (std::size_t d = 0; d < n_docs; ++d) {
    std::string doc;
    std::size_t len = 1 + rng.below(50);
    for (std::size_t i = 0; i < len; ++i) doc += "w" + std::to_string(rng.below(vocab)) + " ";
    corpus.push_back(doc);
  }
  return corpus;
}

}  // namespace

TEST_CASE("good cat example") {
  TfIdfModel m = TfIdfModel::fit({"good cat", "bad cat"});
  CHECK(m.dims() == 3);
  CHECK(m.words() == std::vector<std::string>{"bad", "cat", "good"});
  CHECK(m.idf()[*m.column("cat")] == 0.0);
  CHECK(m.idf()[*m.column("good")] == doctest::Approx(0.6931471805599453).epsilon(1e-15));

  auto v = dense(m, m.transform("good cat"));
  CHECK(v[*m.column("good")] == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-15));
  CHECK(v[*m.column("cat")] == 0.0);
  CHECK(dense(m, m.transform("good good"))[*m.column("good")] ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(m.transform("zebra unicorn").base.nnz() == 0);
  CHECK(m.transform("").base.nnz() == 0);

  TfIdfModel one = TfIdfModel::fit({"a b c"});
  for (double x : one.idf()) CHECK(x == 0.0);

  CHECK_THROWS(TfIdfModel::fit({}));
  CHECK_THROWS(TfIdfModel::fit({"", "  "}));
}

TEST_CASE("smooth idf and min_doc_freq") {
  TfIdfOptions smooth{IdfMode::kSmooth, 1};
  TfIdfModel m = TfIdfModel::fit({"good cat", "bad cat"}, smooth);
  CHECK(m.idf()[*m.column("cat")] == doctest::Approx(1.0));
  CHECK(m.idf()[*m.column("good")] == doctest::Approx(std::log(1.5) + 1.0));
  CHECK(idf_mode_from_string(to_string(IdfMode::kSmooth)) == IdfMode::kSmooth);

  TfIdfModel pruned = TfIdfModel::fit({"good cat", "bad cat"}, {IdfMode::kPlain, 2});
  CHECK(pruned.words() == std::vector<std::string>{"cat"});
}

TEST_CASE("brute-force oracle on random corpora") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    auto corpus = random_corpus(rng);
    TfIdfModel m = TfIdfModel::fit(corpus);
    std::set<std::string> vocab;
    for (const auto& d : corpus)
      for (const auto& w : tokens(d)) vocab.insert(w);
    REQUIRE(m.dims() == vocab.size());
    for (std::size_t c = 0; c < m.dims(); ++c) {
      CHECK(m.doc_freq()[c] >= 1);
      if (c > 0) CHECK(m.words()[c - 1] < m.words()[c]);
    }
    for (const auto& d : corpus) {
      FeatureVector fv = m.transform(d);
      for (std::size_t k = 1; k < fv.base.nnz(); ++k)
        CHECK(fv.base.indices[k - 1] < fv.base.indices[k]);
      auto got = dense(m, fv);
      auto want = oracle(corpus, d);
      for (std::size_t c = 0; c < m.dims(); ++c) {
        auto it = want.find(m.words()[c]);
        double expected = it == want.end() ? 0.0 : it->second;
        CHECK(rel_close(got[c], expected, 1e-12));
      }
      // Tf sums to one before idf weighting.
      double tf_sum = 0;
      auto dt = tokens(d);
      for (const auto& w : std::set<std::string>(dt.begin(), dt.end()))
        tf_sum += static_cast<double>(std::count(dt.begin(), dt.end(), w)) / dt.size();
      CHECK(tf_sum == doctest::Approx(1.0));
    }
    CHECK(TfIdfModel::fit(corpus).to_json() == m.to_json());
  }
}

TEST_CASE("words in every document contribute zero") {
  TfIdfModel m = TfIdfModel::fit({"the a x", "the b", "the c c"});
  for (const std::string d : {"the a x", "the b", "the c c"}) {
    auto v = dense(m, m.transform(d));
    CHECK(v[*m.column("the")] == 0.0);
  }
}

TEST_CASE("word-count tail") {
  TfIdfModel m = TfIdfModel::fit({"good cat", "bad cat"});
  FeatureVector base = m.transform("good cat");
  FeatureVector with = append_word_counts(base, WordCountVector{1, 1, 0, 0, 0, 0, 0});
  CHECK(with.base == base.base);
  REQUIRE(with.tail.has_value());
  CHECK((*with.tail)[0] == 1.0);
  CHECK((*with.tail)[1] == 1.0);
  CHECK_THROWS_AS(append_word_counts(with, WordCountVector{}), UsageError);

  FeatureVector empty = append_word_counts(FeatureVector{}, WordCountVector{});
  REQUIRE(empty.tail.has_value());
  for (double x : *empty.tail) CHECK(x == 0.0);

  SparseVector flat = with.flatten(m.dims());
  CHECK(flat.indices.back() == m.dims() + 1);
  CHECK(flat.values.back() == 1.0);
  CHECK(empty.flatten(3).nnz() == 0);
}

TEST_CASE("serialization round trip") {
  TfIdfModel m = TfIdfModel::fit({"good cat", "bad cat", "ugly dog"});
  nlohmann::json j = m.to_json();
  TfIdfModel back = TfIdfModel::from_json(j);
  CHECK(back.words() == m.words());
  CHECK(back.idf() == m.idf());
  CHECK(back.n_docs() == 3);
  CHECK(back.transform("good dog").base == m.transform("good dog").base);

  nlohmann::json tampered = nlohmann::json::parse(j.dump());
  tampered["idf"][0] = 42.0;
  CHECK_THROWS_AS(TfIdfModel::from_json(tampered), DataError);
  nlohmann::json missing = j;
  missing.erase("vocabulary");
  CHECK_THROWS_AS(TfIdfModel::from_json(missing), DataError);
}
