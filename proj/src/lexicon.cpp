#include "sgid/lexicon.hpp"

#include <algorithm>
#include <fstream>

#include "sgid/error.hpp"
#include "sgid/text.hpp"

namespace sgid {

namespace {

std::string strip_comment(std::string_view line) {
  auto pos = line.find('#');
  return text::trim(pos == std::string_view::npos ? line : line.substr(0, pos));
}

bool is_keyword_category(std::string_view name) {
  return std::find(kKeywordCategories.begin(), kKeywordCategories.end(), name) !=
         kKeywordCategories.end();
}

std::string match_case(std::string_view original, const std::string& replacement) {
  std::string out = replacement;
  if (original.empty() || out.empty()) return out;
  const bool first_upper = original[0] >= 'A' && original[0] <= 'Z';
  bool all_upper = original.size() > 1;
  for (char c : original) {
    if (c >= 'a' && c <= 'z') all_upper = false;
  }
  if (all_upper) {
    for (auto& c : out) {
      if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    }
  } else if (first_upper && out[0] >= 'a' && out[0] <= 'z') {
    out[0] = static_cast<char>(out[0] - 'a' + 'A');
  }
  return out;
}

}  // namespace

Lexicon Lexicon::load(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon file: " + path.string());
  return parse(in, warnings);
}

Lexicon Lexicon::parse(std::istream& in, std::vector<std::string>* warnings) {
  Lexicon lex;
  std::string line;
  std::string current;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto content = strip_comment(line);
    if (content.empty()) continue;
    if (content.front() == '[' && content.back() == ']') {
      current = text::trim(std::string_view(content).substr(1, content.size() - 2));
      if (!is_keyword_category(current)) {
        throw DataError("lexicon line " + std::to_string(lineno) +
                        ": unknown category '" + current + "'");
      }
      continue;
    }
    if (current.empty()) {
      throw DataError("lexicon line " + std::to_string(lineno) +
                      ": keyword before any category header");
    }
    if (!lex.add(current, content) && warnings) {
      warnings->push_back("lexicon line " + std::to_string(lineno) + ": duplicate keyword '" +
                          text::to_lower(content) + "' in " + current);
    }
  }
  if (lex.empty() && warnings) warnings->push_back("lexicon is empty");
  return lex;
}

bool Lexicon::add(std::string_view category, std::string_view keyword) {
  if (!is_keyword_category(category)) {
    throw DataError("unknown keyword category '" + std::string(category) + "'");
  }
  auto kw = text::to_lower(text::trim(keyword));
  auto tokens = text::alnum_words(kw);
  if (tokens.empty()) throw DataError("keyword '" + kw + "' has no alphanumeric content");
  auto& set = categories_[std::string(category)];
  if (!set.insert(kw).second) return false;
  all_keywords_.insert(kw);
  by_first_token_[tokens.front()].push_back({tokens, kw, std::string(category)});
  return true;
}

const std::set<std::string>& Lexicon::keywords(std::string_view category) const {
  static const std::set<std::string> kEmpty;
  auto it = categories_.find(std::string(category));
  return it == categories_.end() ? kEmpty : it->second;
}

std::size_t Lexicon::total_keywords() const {
  std::size_t n = 0;
  for (const auto& [_, set] : categories_) n += set.size();
  return n;
}

bool Lexicon::contains(std::string_view word) const {
  return all_keywords_.count(text::to_lower(word)) > 0;
}

std::vector<KeywordMatch> Lexicon::match(std::string_view input) const {
  std::vector<KeywordMatch> out;
  const auto tokens = text::alnum_words(input);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto it = by_first_token_.find(tokens[i]);
    if (it == by_first_token_.end()) continue;
    for (const auto& phrase : it->second) {
      if (i + phrase.tokens.size() > tokens.size()) continue;
      if (std::equal(phrase.tokens.begin(), phrase.tokens.end(), tokens.begin() + i)) {
        out.push_back({phrase.keyword, phrase.category, i});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.position != b.position) return a.position < b.position;
    if (a.keyword != b.keyword) return a.keyword < b.keyword;
    return a.category < b.category;
  });
  return out;
}

std::vector<KeywordMatch> match_keywords(std::string_view text, const Lexicon& lexicon) {
  return lexicon.match(text);
}

std::array<std::string, 7> default_count_categories() {
  std::array<std::string, 7> out;
  for (std::size_t i = 0; i < 7; ++i) out[i] = std::string(kDefaultCountCategories[i]);
  return out;
}

WordCountVector word_count_vector(std::string_view text, const Lexicon& lexicon,
                                  const std::array<std::string, 7>& categories) {
  WordCountVector counts{};
  for (const auto& m : lexicon.match(text)) {
    for (std::size_t i = 0; i < categories.size(); ++i) {
      if (m.category == categories[i]) ++counts[i];
    }
  }
  return counts;
}

std::vector<std::pair<std::string, std::size_t>> expand_keywords(
    const std::vector<std::string>& documents, const Lexicon& lexicon,
    const std::unordered_set<std::string>& stopwords, std::size_t min_doc_freq) {
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : documents) {
    auto words = text::alnum_words(doc);
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    for (auto& w : words) ++df[w];
  }
  std::vector<std::pair<std::string, std::size_t>> out;
  for (auto& [word, count] : df) {
    if (count < min_doc_freq) continue;
    if (lexicon.contains(word) || stopwords.count(word)) continue;
    if (std::all_of(word.begin(), word.end(),
                    [](char c) { return text::is_ascii_digit(static_cast<unsigned char>(c)); })) {
      continue;
    }
    out.emplace_back(word, count);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

std::unordered_set<std::string> load_word_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open word list: " + path.string());
  std::unordered_set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto w = text::to_lower(strip_comment(line));
    if (!w.empty()) out.insert(std::move(w));
  }
  return out;
}

// Equivalence groups.

EquivalenceGroups::EquivalenceGroups(std::vector<std::vector<std::string>> groups) {
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<std::string> cleaned;
    for (auto& w : groups[g]) {
      auto lw = text::to_lower(text::trim(w));
      auto toks = text::alnum_words(lw);
      if (toks.size() != 1 || toks[0] != lw) {
        throw DataError("equivalence group " + std::to_string(g + 1) + ": '" + w +
                        "' is not a single alphanumeric token");
      }
      if (std::find(cleaned.begin(), cleaned.end(), lw) != cleaned.end()) continue;
      if (index_.count(lw)) {
        throw DataError("equivalence group " + std::to_string(g + 1) + ": '" + lw +
                        "' already belongs to group " + std::to_string(index_[lw] + 1));
      }
      index_[lw] = groups_.size();
      cleaned.push_back(lw);
    }
    if (cleaned.size() < 2) {
      throw DataError("equivalence group " + std::to_string(g + 1) +
                      " has fewer than two words");
    }
    groups_.push_back(std::move(cleaned));
  }
}

EquivalenceGroups EquivalenceGroups::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open equivalence group file: " + path.string());
  return parse(in);
}

EquivalenceGroups EquivalenceGroups::parse(std::istream& in) {
  std::vector<std::vector<std::string>> groups;
  std::string line;
  while (std::getline(in, line)) {
    auto content = strip_comment(line);
    if (content.empty()) continue;
    groups.push_back(text::split_trimmed(content, ','));
  }
  return EquivalenceGroups(std::move(groups));
}

std::optional<std::size_t> EquivalenceGroups::group_of(std::string_view word) const {
  auto it = index_.find(text::to_lower(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> generate_variants(std::string_view input,
                                           const EquivalenceGroups& groups) {
  const auto tokens = text::alnum_tokens(input);
  std::vector<std::string> matched;
  for (const auto& t : tokens) {
    if (groups.group_of(t.lower) &&
        std::find(matched.begin(), matched.end(), t.lower) == matched.end()) {
      matched.push_back(t.lower);
    }
  }
  std::vector<std::string> out;
  std::unordered_set<std::string> seen{std::string(input)};
  for (const auto& word : matched) {
    const auto& group = groups.groups()[*groups.group_of(word)];
    for (const auto& alt : group) {
      if (alt == word) continue;
      std::string variant;
      std::size_t cursor = 0;
      for (const auto& t : tokens) {
        if (t.lower != word) continue;
        variant.append(input.substr(cursor, t.begin - cursor));
        variant.append(match_case(input.substr(t.begin, t.end - t.begin), alt));
        cursor = t.end;
      }
      variant.append(input.substr(cursor));
      if (seen.insert(variant).second) out.push_back(std::move(variant));
    }
  }
  return out;
}

bool is_group_substitution(std::string_view source, std::string_view variant,
                           const EquivalenceGroups& groups) {
  const auto a = text::alnum_tokens(source);
  const auto b = text::alnum_tokens(variant);
  if (a.size() != b.size() || a.empty()) return false;
  // Separators between tokens must be byte-identical.
  auto gap = [](std::string_view s, const std::vector<text::TokenSpan>& t, std::size_t i) {
    const std::size_t from = i == 0 ? 0 : t[i - 1].end;
    const std::size_t to = i == t.size() ? s.size() : t[i].begin;
    return s.substr(from, to - from);
  };
  for (std::size_t i = 0; i <= a.size(); ++i) {
    if (gap(source, a, i) != gap(variant, b, i)) return false;
  }
  std::optional<std::string> from, to;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].lower == b[i].lower) continue;
    if (!from) {
      from = a[i].lower;
      to = b[i].lower;
    } else if (a[i].lower != *from || b[i].lower != *to) {
      return false;
    }
  }
  if (!from) return false;
  auto ga = groups.group_of(*from);
  auto gb = groups.group_of(*to);
  if (!ga || !gb || *ga != *gb) return false;
  // Every occurrence of the source word must have been replaced.
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].lower == *from && b[i].lower != *to) return false;
  }
  return true;
}

}  // namespace sgid
