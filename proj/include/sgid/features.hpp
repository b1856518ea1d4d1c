#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "sgid/lexicon.hpp"

namespace sgid {

/// Sparse row with strictly increasing column indices.
struct SparseVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

/// TF-IDF row over the fitted vocabulary plus the optional word-count tail.
struct FeatureVector {
  SparseVector base;
  std::optional<std::array<double, 7>> tail;

  /// Flattens into one sparse row; tail column i lands at base_dims + i
  /// (zero tail entries are omitted).
  SparseVector flatten(std::size_t base_dims) const;
};

enum class IdfMode {
  kPlain,   // ln(N / df)
  kSmooth,  // ln((1 + N) / (1 + df)) + 1, the common library default
};

std::string_view to_string(IdfMode mode);
IdfMode idf_mode_from_string(std::string_view s);

struct TfIdfOptions {
  IdfMode mode = IdfMode::kPlain;
  std::size_t min_doc_freq = 1;
};

/// Vocabulary, document frequencies and inverse document frequencies fitted
/// on whitespace-tokenized, already preprocessed documents. Columns are the
/// vocabulary words in lexicographic order.
class TfIdfModel {
 public:
  static TfIdfModel fit(const std::vector<std::string>& documents,
                        const TfIdfOptions& options = {});

  /// value(w) = count(w, d) / |d| * idf(w) for vocabulary words; |d| counts
  /// every token, seen or not.
  FeatureVector transform(std::string_view document) const;

  std::size_t dims() const { return words_.size(); }
  std::size_t n_docs() const { return n_docs_; }
  IdfMode mode() const { return options_.mode; }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::size_t>& doc_freq() const { return doc_freq_; }
  const std::vector<double>& idf() const { return idf_; }
  std::optional<std::uint32_t> column(std::string_view word) const;

  nlohmann::json to_json() const;
  /// Recomputes idf from (N, df) and rejects the file if it disagrees with
  /// the stored weights.
  static TfIdfModel from_json(const nlohmann::json& j);

  static double idf_value(IdfMode mode, std::size_t n_docs, std::size_t df);

 private:
  TfIdfOptions options_;
  std::size_t n_docs_ = 0;
  std::vector<std::string> words_;
  std::vector<std::size_t> doc_freq_;
  std::vector<double> idf_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Attaches the 7 word counts as a dense tail; a second append throws UsageError.
FeatureVector append_word_counts(FeatureVector vec, const WordCountVector& counts);

}  // namespace sgid
