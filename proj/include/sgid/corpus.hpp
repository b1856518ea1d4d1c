#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace sgid {

class Lexicon;

/// The twelve SGID categories of the labeling rubric.
inline constexpr std::array<std::string_view, 12> kSgidCategories = {
    "Discredit",         "Stereotyping",           "Sexual harassment",
    "Threats of violence", "Dominance",            "Victim blaming",
    "Sexual objectification", "Appearance reference", "Maternal insults",
    "Damning",           "Sexual reference",       "Anti-LGBTQ+"};

bool is_sgid_category(std::string_view name);

struct RawComment {
  std::string id;
  std::string author;
  std::string created_at;  // normalized "YYYY-MM-DDTHH:MM:SSZ", or empty
  std::string text;
  std::string source;
};

struct LabeledComment {
  RawComment comment;
  std::optional<int> label;  // 1 = SGID, 0 = non-SGID, nullopt = unlabeled
  std::set<std::string> categories;
};

struct Corpus {
  std::vector<LabeledComment> items;
  std::vector<std::string> provenance;

  std::size_t size() const { return items.size(); }
  bool fully_labeled() const;
};

enum class CorpusFormat { kJsonl, kCsv };

/// Normalizes a timestamp to UTC ISO-8601 ("2021-03-01T12:00:00Z").
/// Accepts "YYYY-MM-DD[T ]HH:MM[:SS[.frac]]" with optional "Z" or +-HH[:MM]
/// offset, and a bare date. Throws DataError on anything else.
std::string normalize_timestamp(std::string_view raw);

/// Reads a corpus. Records keep input order; duplicates are not removed.
/// Malformed records raise DataError naming the 1-based line number.
Corpus ingest(const std::filesystem::path& path, CorpusFormat format);
Corpus ingest_jsonl_stream(std::istream& in, std::string_view source_name);
CorpusFormat format_from_path(const std::filesystem::path& path);

void write_jsonl(const Corpus& c, std::ostream& out);
void write_jsonl(const Corpus& c, const std::filesystem::path& path);

/// Keeps the first item of every (author, text, created_at) key.
Corpus deduplicate(const Corpus& c);

/// Drops items whose author is in the exclusion list.
Corpus exclude_authors(const Corpus& c, const std::unordered_set<std::string>& authors);
std::unordered_set<std::string> load_author_list(const std::filesystem::path& path);

/// Probability that a text is English.
using LanguageScorer = std::function<double(const std::string& text)>;

/// Fraction of whitespace tokens (lowercased, edge punctuation stripped)
/// found in a common-word list.
class CommonWordLanguageScorer {
 public:
  explicit CommonWordLanguageScorer(std::unordered_set<std::string> words);
  static CommonWordLanguageScorer from_file(const std::filesystem::path& path);
  double operator()(const std::string& text) const;
  const std::unordered_set<std::string>& words() const { return words_; }

 private:
  std::unordered_set<std::string> words_;
};

/// Keeps items with score >= threshold. Scorer exceptions or scores outside
/// [0,1] raise DataError naming the item id.
Corpus filter_language(const Corpus& c, const LanguageScorer& scorer,
                       double threshold = 0.5);

/// Per-id probability, as produced by an external scorer.
using ScoreMap = std::unordered_map<std::string, double>;

struct StratifiedSampleOptions {
  double high_threshold = 0.2;
  std::size_t size_b = 0;
  std::size_t size_c = 0;
  std::size_t size_d = 0;
  std::uint64_t seed = 42;
  std::string lgbtq_category = "LGBTQ+ identities and slurs";
};

/// Four disjoint strata, each a list of indices into the source corpus.
struct StratifiedSample {
  std::vector<std::size_t> a;  // keyword match, score > threshold
  std::vector<std::size_t> b;  // keyword match, score <= threshold (sampled)
  std::vector<std::size_t> c;  // no keyword (sampled)
  std::vector<std::size_t> d;  // LGBTQ+ keyword, not in A or B (sampled)
  double threshold = 0.2;
};

StratifiedSample stratified_sample(const Corpus& c, const ScoreMap& scores,
                                   const Lexicon& lexicon,
                                   const StratifiedSampleOptions& opts);

struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> assignment;  // item index -> fold index

  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;
  std::vector<std::size_t> fold_sizes() const;
};

/// Seeded shuffle cut into k contiguous blocks; the first n % k folds get
/// one extra item.
FoldPlan make_folds(std::size_t n, std::size_t k, std::uint64_t seed);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// 8:1:1 split: floor(0.8n) / floor(0.1n) / remainder.
Split make_split(std::size_t n, std::uint64_t seed);

}  // namespace sgid
