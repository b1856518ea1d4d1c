#include "sgid/preprocess.hpp"

#include <algorithm>
#include <fstream>
#include <optional>

#include "sgid/error.hpp"
#include "sgid/resources.hpp"
#include "sgid/text.hpp"

namespace sgid {

namespace {

using text::is_ascii_alnum;
using text::is_ascii_alpha;
using text::is_ascii_space;

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
char lower(char c) { return is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c; }

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > s.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (lower(s[pos + i]) != prefix[i]) return false;
  }
  return true;
}

bool is_emoji_codepoint(char32_t cp) {
  return (cp >= 0x1F000 && cp <= 0x1FAFF) || (cp >= 0x2600 && cp <= 0x27BF) ||
         (cp >= 0x2B00 && cp <= 0x2BFF) || (cp >= 0x1F900 && cp <= 0x1F9FF);
}

bool is_emoji_joiner(char32_t cp) {
  return cp == 0x200D || cp == 0xFE0F || cp == 0xFE0E || cp == 0x20E3;
}

bool is_markup_name_char(char c) {
  return is_ascii_alnum(static_cast<unsigned char>(c)) || c == '_' || c == '+' || c == '-';
}

// Length of a `:name:` span starting at s[pos] == ':', or 0. The name needs
// at least one letter so clock times like 12:30:45 are not taken.
std::size_t markup_length(std::string_view s, std::size_t pos) {
  if (pos > 0 && is_ascii_alnum(static_cast<unsigned char>(s[pos - 1]))) return 0;
  std::size_t j = pos + 1;
  bool has_letter = false;
  while (j < s.size() && is_markup_name_char(s[j])) {
    has_letter |= is_ascii_alpha(static_cast<unsigned char>(s[j]));
    ++j;
  }
  if (j == pos + 1 || j >= s.size() || s[j] != ':' || !has_letter) return 0;
  if (j + 1 < s.size() && is_ascii_alnum(static_cast<unsigned char>(s[j + 1]))) return 0;
  return j + 1 - pos;
}

bool known_word(const std::string& lower_word, const PreprocessTables& tables) {
  return tables.dictionary.count(lower_word) > 0 || tables.lexicon.contains(lower_word);
}

// Collapses every run of >= 3 identical letters to at most `keep` letters.
std::string collapse_runs(std::string_view token, std::size_t keep) {
  std::string out;
  std::size_t i = 0;
  while (i < token.size()) {
    std::size_t j = i + 1;
    if (is_ascii_alpha(static_cast<unsigned char>(token[i]))) {
      while (j < token.size() && lower(token[j]) == lower(token[i])) ++j;
    }
    const std::size_t run = j - i;
    const std::size_t emit = run >= 3 ? keep : run;
    out.append(token.substr(i, emit));
    i = j;
  }
  return out;
}

bool has_long_run(std::string_view token) {
  for (std::size_t i = 0; i + 2 < token.size(); ++i) {
    if (is_ascii_alpha(static_cast<unsigned char>(token[i])) &&
        lower(token[i]) == lower(token[i + 1]) && lower(token[i]) == lower(token[i + 2])) {
      return true;
    }
  }
  return false;
}

std::string normalize_token(std::string_view token, const PreprocessTables& tables) {
  std::string current(token);
  // Digit-for-letter substitution inside otherwise alphabetic tokens.
  bool has_alpha = false, has_sub = false, clean = true;
  for (char c : current) {
    if (is_ascii_alpha(static_cast<unsigned char>(c))) {
      has_alpha = true;
    } else if (tables.adversarial.count(c)) {
      has_sub = true;
    } else {
      clean = false;
    }
  }
  if (has_alpha && has_sub && clean) {
    std::string swapped = current;
    for (auto& c : swapped) {
      if (auto it = tables.adversarial.find(c); it != tables.adversarial.end()) c = it->second;
    }
    if (tables.lexicon.contains(text::to_lower(swapped))) current = std::move(swapped);
  }
  if (has_long_run(current)) {
    auto two = collapse_runs(current, 2);
    current = known_word(text::to_lower(two), tables) ? two : collapse_runs(current, 1);
  }
  return current;
}

}  // namespace

PreprocessConfig PreprocessConfig::none() {
  PreprocessConfig c;
  c.remove_urls = c.expand_contractions = c.remove_symbols = false;
  c.split_identifiers = c.eliminate_repetition = c.replace_emoji = false;
  c.lowercase = false;
  return c;
}

std::unordered_map<std::string, std::string> load_tsv_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open table: " + path.string());
  std::unordered_map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected key<TAB>value");
    }
    out[text::to_lower(line.substr(0, tab))] = line.substr(tab + 1);
  }
  return out;
}

PreprocessTables PreprocessTables::load(const std::filesystem::path& contractions,
                                        const std::filesystem::path& adversarial,
                                        const std::filesystem::path& dictionary,
                                        const std::filesystem::path& lexicon) {
  PreprocessTables t;
  t.contractions = load_tsv_table(contractions);
  for (const auto& [from, to] : load_tsv_table(adversarial)) {
    if (from.size() != 1 || to.size() != 1) {
      throw DataError("adversarial table entries must map one character to one character");
    }
    t.adversarial[from[0]] = to[0];
  }
  t.dictionary = load_word_list(dictionary);
  t.lexicon = Lexicon::load(lexicon);
  return t;
}

PreprocessTables PreprocessTables::load_default() {
  return load(data_file("contractions.tsv"), data_file("adversarial.tsv"),
              data_file("common_words.txt"), data_file("lexicon.txt"));
}

std::string remove_urls(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const bool boundary = i == 0 || !is_ascii_alnum(static_cast<unsigned char>(s[i - 1]));
    if (boundary && (starts_with_ci(s, i, "http://") || starts_with_ci(s, i, "https://") ||
                     starts_with_ci(s, i, "www."))) {
      while (i < s.size() && !is_ascii_space(static_cast<unsigned char>(s[i]))) ++i;
      out.push_back(' ');
      continue;
    }
    out.push_back(s[i++]);
  }
  return out;
}

std::string expand_contractions(std::string_view input,
                                const std::unordered_map<std::string, std::string>& table) {
  // Fold the typographic apostrophe first.
  std::string s;
  s.reserve(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (input.compare(i, 3, "\xE2\x80\x99") == 0) {
      s.push_back('\'');
      i += 2;
    } else {
      s.push_back(input[i]);
    }
  }
  auto word_char = [](char c) { return is_ascii_alpha(static_cast<unsigned char>(c)) || c == '\''; };
  auto expand = [&](std::string_view word) -> std::optional<std::string> {
    auto it = table.find(text::to_lower(word));
    if (it == table.end()) return std::nullopt;
    std::string rep = it->second;
    if (is_upper(word[word[0] == '\'' ? std::min<std::size_t>(1, word.size() - 1) : 0]) &&
        !rep.empty() && is_lower(rep[0])) {
      rep[0] = static_cast<char>(rep[0] - 'a' + 'A');
    }
    return rep;
  };

  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (!word_char(s[i]) || (i > 0 && is_ascii_alnum(static_cast<unsigned char>(s[i - 1])))) {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && word_char(s[j])) ++j;
    if (j < s.size() && text::is_ascii_digit(static_cast<unsigned char>(s[j]))) {
      out.append(s, i, j - i);
      i = j;
      continue;
    }
    std::string_view word(s.data() + i, j - i);
    if (auto rep = expand(word)) {
      out += *rep;
    } else {
      // Retry without surrounding quote marks.
      std::size_t b = 0, e = word.size();
      while (b < e && word[b] == '\'') ++b;
      while (e > b && word[e - 1] == '\'') --e;
      auto core = word.substr(b, e - b);
      auto rep2 = core.empty() || core.size() == word.size() ? std::nullopt : expand(core);
      if (rep2) {
        out.append(word.substr(0, b));
        out += *rep2;
        out.append(word.substr(e));
      } else {
        out.append(word);
      }
    }
    i = j;
  }
  return out;
}

std::string remove_special_symbols(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (u >= 0x80 || is_ascii_alnum(u) || is_ascii_space(u) || c == '\'' || c == ':' ||
        c == '_') {
      out.push_back(c);
    }
  }
  return out;
}

std::string split_identifiers(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 8);
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == ':') {
      if (std::size_t len = markup_length(s, i)) {
        out.append(s.substr(i, len));
        i += len;
        continue;
      }
    }
    const char c = s[i];
    if (c == '_') {
      out.push_back(' ');
      ++i;
      continue;
    }
    if (is_upper(c) && i > 0) {
      const char prev = s[i - 1];
      const bool next_lower = i + 1 < s.size() && is_lower(s[i + 1]);
      // fooBar -> foo Bar, HTTPServer -> HTTP Server
      if (is_lower(prev) || (is_upper(prev) && next_lower)) out.push_back(' ');
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

std::string eliminate_repetition(std::string_view s, const PreprocessTables& tables) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (!is_ascii_alnum(static_cast<unsigned char>(s[i]))) {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && is_ascii_alnum(static_cast<unsigned char>(s[j]))) ++j;
    out += normalize_token(s.substr(i, j - i), tables);
    i = j;
  }
  return out;
}

std::string replace_emoji(std::string_view s, std::string_view neutral_token) {
  std::string out;
  out.reserve(s.size());
  // Spaces only where the token would otherwise fuse with its neighbours.
  auto emit = [&](std::size_t next) {
    if (!out.empty() && !text::is_ascii_space(static_cast<unsigned char>(out.back()))) out.push_back(' ');
    out.append(neutral_token);
    if (next < s.size() && !text::is_ascii_space(static_cast<unsigned char>(s[next]))) out.push_back(' ');
  };
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == ':') {
      if (std::size_t len = markup_length(s, i)) {
        i += len;
        emit(i);
        continue;
      }
      out.push_back(s[i++]);
      continue;
    }
    if (static_cast<unsigned char>(s[i]) < 0x80) {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t j = i;
    char32_t cp = text::next_codepoint(s, j);
    if (!is_emoji_codepoint(cp)) {
      out.append(s.substr(i, j - i));
      i = j;
      continue;
    }
    // Swallow the whole emoji sequence (ZWJ chains, modifiers, selectors).
    std::size_t k = j;
    while (k < s.size()) {
      std::size_t next = k;
      char32_t c2 = text::next_codepoint(s, next);
      if (!is_emoji_codepoint(c2) && !is_emoji_joiner(c2)) break;
      k = next;
    }
    i = k;
    emit(i);
  }
  return out;
}

namespace {

// Drops characters the symbol step deferred: ':' '_' and apostrophes that
// are not between two letters.
std::string drop_deferred_symbols(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == ':' || c == '_') {
      out.push_back(' ');
      continue;
    }
    if (c == '\'') {
      const bool inner = i > 0 && i + 1 < s.size() &&
                         is_ascii_alpha(static_cast<unsigned char>(s[i - 1])) &&
                         is_ascii_alpha(static_cast<unsigned char>(s[i + 1]));
      if (!inner) {
        out.push_back(' ');
        continue;
      }
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string preprocess(std::string_view input, const PreprocessConfig& config,
                       const PreprocessTables& tables) {
  std::string s(input);
  if (config.remove_urls) s = remove_urls(s);
  if (config.expand_contractions) s = expand_contractions(s, tables.contractions);
  if (config.remove_symbols) {
    s = remove_special_symbols(s);
    // Deleting symbols can join a contraction back together ("it'$s").
    if (config.expand_contractions) s = expand_contractions(s, tables.contractions);
  }
  if (config.split_identifiers) s = split_identifiers(s);
  if (config.eliminate_repetition) s = eliminate_repetition(s, tables);
  if (config.replace_emoji) s = replace_emoji(s, config.neutral_token);
  if (config.remove_symbols) s = drop_deferred_symbols(s);
  s = text::normalize_whitespace(s);
  if (config.lowercase) s = text::to_lower(s);
  return s;
}

}  // namespace sgid
