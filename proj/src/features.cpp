#include "sgid/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sgid/error.hpp"
#include "sgid/text.hpp"

namespace sgid {

SparseVector FeatureVector::flatten(std::size_t base_dims) const {
  SparseVector out = base;
  if (tail) {
    for (std::size_t i = 0; i < tail->size(); ++i) {
      if ((*tail)[i] != 0.0) {
        out.indices.push_back(static_cast<std::uint32_t>(base_dims + i));
        out.values.push_back((*tail)[i]);
      }
    }
  }
  return out;
}

std::string_view to_string(IdfMode mode) {
  return mode == IdfMode::kPlain ? "plain" : "smooth";
}

IdfMode idf_mode_from_string(std::string_view s) {
  if (s == "plain") return IdfMode::kPlain;
  if (s == "smooth") return IdfMode::kSmooth;
  throw UsageError("unknown idf mode '" + std::string(s) + "' (expected plain|smooth)");
}

double TfIdfModel::idf_value(IdfMode mode, std::size_t n_docs, std::size_t df) {
  const auto n = static_cast<double>(n_docs);
  const auto w = static_cast<double>(df);
  if (mode == IdfMode::kPlain) return std::log(n / w);
  return std::log((1.0 + n) / (1.0 + w)) + 1.0;
}

TfIdfModel TfIdfModel::fit(const std::vector<std::string>& documents,
                           const TfIdfOptions& options) {
  std::map<std::string, std::size_t> df;
  bool any_token = false;
  for (const auto& doc : documents) {
    auto tokens = text::split_whitespace(doc);
    any_token |= !tokens.empty();
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (auto& t : tokens) ++df[t];
  }
  if (!any_token) throw UsageError("TF-IDF fit needs at least one non-empty document");

  TfIdfModel m;
  m.options_ = options;
  m.n_docs_ = documents.size();
  for (const auto& [word, count] : df) {
    if (count < options.min_doc_freq) continue;
    m.index_.emplace(word, static_cast<std::uint32_t>(m.words_.size()));
    m.words_.push_back(word);
    m.doc_freq_.push_back(count);
    m.idf_.push_back(idf_value(options.mode, m.n_docs_, count));
  }
  return m;
}

std::optional<std::uint32_t> TfIdfModel::column(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

FeatureVector TfIdfModel::transform(std::string_view document) const {
  FeatureVector out;
  const auto tokens = text::split_whitespace(document);
  if (tokens.empty()) return out;
  std::map<std::uint32_t, std::size_t> counts;
  for (const auto& t : tokens) {
    if (auto it = index_.find(t); it != index_.end()) ++counts[it->second];
  }
  const auto len = static_cast<double>(tokens.size());
  for (const auto& [col, count] : counts) {
    out.base.indices.push_back(col);
    out.base.values.push_back(static_cast<double>(count) / len * idf_[col]);
  }
  return out;
}

nlohmann::json TfIdfModel::to_json() const {
  return {{"format", "sgid-tfidf"},
          {"version", 1},
          {"mode", std::string(to_string(options_.mode))},
          {"min_doc_freq", options_.min_doc_freq},
          {"n_docs", n_docs_},
          {"vocabulary", words_},
          {"doc_freq", doc_freq_},
          {"idf", idf_}};
}

TfIdfModel TfIdfModel::from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "sgid-tfidf") throw DataError("not a TF-IDF model");
  if (j.value("version", 0) != 1) {
    throw DataError("unsupported TF-IDF model version " + j.value("version", nlohmann::json()).dump());
  }
  TfIdfModel m;
  try {
    m.options_.mode = idf_mode_from_string(j.at("mode").get<std::string>());
    m.options_.min_doc_freq = j.at("min_doc_freq").get<std::size_t>();
    m.n_docs_ = j.at("n_docs").get<std::size_t>();
    m.words_ = j.at("vocabulary").get<std::vector<std::string>>();
    m.doc_freq_ = j.at("doc_freq").get<std::vector<std::size_t>>();
    const auto stored = j.at("idf").get<std::vector<double>>();
    if (m.doc_freq_.size() != m.words_.size() || stored.size() != m.words_.size()) {
      throw DataError("TF-IDF model arrays have inconsistent lengths");
    }
    for (std::size_t i = 0; i < m.words_.size(); ++i) {
      if (m.doc_freq_[i] < 1 || m.doc_freq_[i] > m.n_docs_) {
        throw DataError("TF-IDF model has invalid document frequency for '" + m.words_[i] + "'");
      }
      const double idf = idf_value(m.options_.mode, m.n_docs_, m.doc_freq_[i]);
      if (std::abs(idf - stored[i]) > 1e-12 * std::max(1.0, std::abs(idf))) {
        throw DataError("TF-IDF model idf mismatch for '" + m.words_[i] + "'");
      }
      m.idf_.push_back(idf);
      if (!m.index_.emplace(m.words_[i], static_cast<std::uint32_t>(i)).second) {
        throw DataError("TF-IDF model repeats vocabulary word '" + m.words_[i] + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("corrupt TF-IDF model: ") + e.what());
  }
  return m;
}

FeatureVector append_word_counts(FeatureVector vec, const WordCountVector& counts) {
  if (vec.tail) throw UsageError("word-count tail already attached");
  std::array<double, 7> tail{};
  for (std::size_t i = 0; i < 7; ++i) tail[i] = static_cast<double>(counts[i]);
  vec.tail = tail;
  return vec;
}

}  // namespace sgid
