#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace sgid {

struct Corpus;

/// Keyword category names, in lexicon-file order.
inline constexpr std::array<std::string_view, 12> kKeywordCategories = {
    "Pejoratives",          "LGBTQ+ identities and slurs",
    "Uncomfortable reference", "Women kins",
    "Woman's body parts",   "Women roles",
    "General women",        "Flirtatious",
    "Physical appearance",  "Sexual threat",
    "Cloth",                "Men roles"};

/// Categories counted by the word-count features, in output order.
inline constexpr std::array<std::string_view, 7> kDefaultCountCategories = {
    "Pejoratives",  "Women kins", "LGBTQ+ identities and slurs",
    "Woman's body parts", "Women roles", "Cloth", "General women"};

struct KeywordMatch {
  std::string keyword;
  std::string category;
  std::size_t position = 0;  // token index of the keyword's first token

  friend bool operator==(const KeywordMatch&, const KeywordMatch&) = default;
};

/// Categorized keyword sets. Keywords are lowercase and may span several
/// tokens ("soccer mom"); matching uses alnum tokenization on both sides.
class Lexicon {
 public:
  /// Sectioned file: "[Category]" headers, one keyword per line, '#' starts
  /// a comment. Unknown categories throw DataError; duplicate keywords in a
  /// category and an empty file produce warnings.
  static Lexicon load(const std::filesystem::path& path,
                      std::vector<std::string>* warnings = nullptr);
  static Lexicon parse(std::istream& in, std::vector<std::string>* warnings = nullptr);

  /// Returns false when the keyword was already present in that category.
  bool add(std::string_view category, std::string_view keyword);

  const std::map<std::string, std::set<std::string>>& categories() const {
    return categories_;
  }
  const std::set<std::string>& keywords(std::string_view category) const;
  bool empty() const { return categories_.empty(); }
  std::size_t total_keywords() const;

  /// True when `word` is a keyword of any category.
  bool contains(std::string_view word) const;

  std::vector<KeywordMatch> match(std::string_view text) const;

 private:
  struct Phrase {
    std::vector<std::string> tokens;
    std::string keyword;
    std::string category;
  };
  std::map<std::string, std::set<std::string>> categories_;
  // First token -> candidate phrases starting with it.
  std::unordered_map<std::string, std::vector<Phrase>> by_first_token_;
  std::unordered_set<std::string> all_keywords_;
};

/// Every keyword occurrence, case-insensitively, ordered by position.
std::vector<KeywordMatch> match_keywords(std::string_view text, const Lexicon& lexicon);

using WordCountVector = std::array<int, 7>;

std::array<std::string, 7> default_count_categories();

WordCountVector word_count_vector(
    std::string_view text, const Lexicon& lexicon,
    const std::array<std::string, 7>& categories = default_count_categories());

/// Candidate words for lexicon growth, ranked by document frequency
/// (descending, ties lexicographic). Lexicon words, stop-words, pure numbers
/// and words in fewer than min_doc_freq documents are excluded.
std::vector<std::pair<std::string, std::size_t>> expand_keywords(
    const std::vector<std::string>& documents, const Lexicon& lexicon,
    const std::unordered_set<std::string>& stopwords, std::size_t min_doc_freq = 100);

std::unordered_set<std::string> load_word_list(const std::filesystem::path& path);

/// Sets of mutually substitutable single-token keywords.
class EquivalenceGroups {
 public:
  EquivalenceGroups() = default;
  explicit EquivalenceGroups(std::vector<std::vector<std::string>> groups);

  /// One comma-separated group per line; '#' comments. A group must have at
  /// least two distinct single-token words and no word may appear in two
  /// groups; violations throw DataError.
  static EquivalenceGroups load(const std::filesystem::path& path);
  static EquivalenceGroups parse(std::istream& in);

  const std::vector<std::vector<std::string>>& groups() const { return groups_; }
  std::size_t size() const { return groups_.size(); }

  /// Index of the group containing `word`, if any.
  std::optional<std::size_t> group_of(std::string_view word) const;

 private:
  std::vector<std::vector<std::string>> groups_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// For every distinct grouped word w in `text` (first-occurrence order) and
/// every other word v of w's group, one variant with all occurrences of w
/// replaced by v. Capitalization of each replaced token is carried over.
/// Duplicates and the unchanged text are dropped.
std::vector<std::string> generate_variants(std::string_view text,
                                           const EquivalenceGroups& groups);

/// True iff `variant` equals `source` with every occurrence of one grouped
/// word replaced by a different word of the same group (token-level diff).
bool is_group_substitution(std::string_view source, std::string_view variant,
                           const EquivalenceGroups& groups);

}  // namespace sgid
