#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sgid/lexicon.hpp"

namespace sgid {

/// Which normalization steps run. Order is fixed regardless of the subset:
/// URLs, contractions, symbols, identifiers, repetition, emoji.
struct PreprocessConfig {
  bool remove_urls = true;
  bool expand_contractions = true;
  bool remove_symbols = true;
  bool split_identifiers = true;
  bool eliminate_repetition = true;
  bool replace_emoji = true;
  bool lowercase = true;
  std::string neutral_token = "emoji";

  static PreprocessConfig none();
};

/// Tables the normalization steps consult.
struct PreprocessTables {
  std::unordered_map<std::string, std::string> contractions;  // lowercase key
  std::unordered_map<char, char> adversarial;                 // digit -> letter
  std::unordered_set<std::string> dictionary;                 // lowercase words
  Lexicon lexicon;

  /// contractions.tsv, adversarial.tsv, common_words.txt and lexicon.txt
  /// from the data directory.
  static PreprocessTables load_default();
  static PreprocessTables load(const std::filesystem::path& contractions,
                               const std::filesystem::path& adversarial,
                               const std::filesystem::path& dictionary,
                               const std::filesystem::path& lexicon);
};

std::unordered_map<std::string, std::string> load_tsv_table(const std::filesystem::path& path);

// Individual steps. Each is total over arbitrary bytes.

/// http(s):// and www. spans up to the next whitespace become one space.
std::string remove_urls(std::string_view text);

/// Table lookups over runs of letters and apostrophes (’ is folded to ').
/// A capitalized source word yields a capitalized expansion.
std::string expand_contractions(std::string_view text,
                                const std::unordered_map<std::string, std::string>& table);

/// Deletes ASCII characters other than letters, digits, whitespace, ', : and _.
/// Bytes >= 0x80 are kept so Unicode letters and emoji reach later steps.
std::string remove_special_symbols(std::string_view text);

/// camelCase boundaries and underscores become spaces. `:name_like_this:`
/// emoji markup is left intact for the emoji step.
std::string split_identifiers(std::string_view text);

/// Collapses runs of three or more identical letters (to two when that
/// yields a known word, otherwise to one) and undoes digit-for-letter
/// substitutions when the result is a lexicon keyword.
std::string eliminate_repetition(std::string_view text, const PreprocessTables& tables);

/// `:name:` markup and runs of Unicode emoji code points become the neutral token.
std::string replace_emoji(std::string_view text, std::string_view neutral_token = "emoji");

/// Runs the enabled steps, removes leftover ':' '_' and quote apostrophes
/// when symbol removal is on, normalizes whitespace, then lowercases.
std::string preprocess(std::string_view text, const PreprocessConfig& config,
                       const PreprocessTables& tables);

}  // namespace sgid
