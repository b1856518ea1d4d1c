#include "sgid/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "sgid/csv.hpp"
#include "sgid/error.hpp"
#include "sgid/lexicon.hpp"
#include "sgid/rng.hpp"
#include "sgid/text.hpp"

namespace sgid {

using nlohmann::json;

bool is_sgid_category(std::string_view name) {
  return std::find(kSgidCategories.begin(), kSgidCategories.end(), name) !=
         kSgidCategories.end();
}

bool Corpus::fully_labeled() const {
  return std::all_of(items.begin(), items.end(),
                     [](const LabeledComment& c) { return c.label.has_value(); });
}

// Timestamps.

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date (Hinnant's algorithm).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

bool read_digits(std::string_view s, std::size_t& pos, std::size_t count, int& out) {
  if (pos + count > s.size()) return false;
  int v = 0;
  for (std::size_t i = 0; i < count; ++i) {
    char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  pos += count;
  out = v;
  return true;
}

}  // namespace

std::string normalize_timestamp(std::string_view raw) {
  const std::string s = text::trim(raw);
  if (s.empty()) return "";
  auto fail = [&]() -> std::string { throw DataError("unparseable timestamp '" + s + "'"); };
  std::size_t p = 0;
  int year, month, day, hour = 0, minute = 0, second = 0;
  if (!read_digits(s, p, 4, year) || p >= s.size() || s[p++] != '-' ||
      !read_digits(s, p, 2, month) || p >= s.size() || s[p++] != '-' ||
      !read_digits(s, p, 2, day)) {
    return fail();
  }
  if (month < 1 || month > 12 || day < 1 || day > 31) return fail();
  int offset_minutes = 0;
  if (p < s.size()) {
    if (s[p] != 'T' && s[p] != ' ') return fail();
    ++p;
    if (!read_digits(s, p, 2, hour) || p >= s.size() || s[p++] != ':' ||
        !read_digits(s, p, 2, minute)) {
      return fail();
    }
    if (p < s.size() && s[p] == ':') {
      ++p;
      if (!read_digits(s, p, 2, second)) return fail();
      if (p < s.size() && s[p] == '.') {
        ++p;
        while (p < s.size() && text::is_ascii_digit(static_cast<unsigned char>(s[p]))) ++p;
      }
    }
    if (hour > 23 || minute > 59 || second > 60) return fail();
    if (p < s.size()) {
      if (s[p] == 'Z' || s[p] == 'z') {
        ++p;
      } else if (s[p] == '+' || s[p] == '-') {
        const int sign = s[p] == '+' ? 1 : -1;
        ++p;
        int oh = 0, om = 0;
        if (!read_digits(s, p, 2, oh)) return fail();
        if (p < s.size() && s[p] == ':') ++p;
        if (p < s.size() && !read_digits(s, p, 2, om)) return fail();
        offset_minutes = sign * (oh * 60 + om);
      } else if (s.compare(p, std::string::npos, " UTC") == 0) {
        p = s.size();
      }
    }
    if (p != s.size()) return fail();
  }
  std::int64_t total = days_from_civil(year, static_cast<unsigned>(month),
                                       static_cast<unsigned>(day)) *
                           86400 +
                       hour * 3600 + minute * 60 + second - offset_minutes * 60;
  std::int64_t days = total >= 0 ? total / 86400 : -((-total + 86399) / 86400);
  std::int64_t secs = total - days * 86400;
  std::int64_t y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02d:%02d:%02dZ", static_cast<long long>(y),
                m, d, static_cast<int>(secs / 3600), static_cast<int>(secs % 3600 / 60),
                static_cast<int>(secs % 60));
  return buf;
}

// Ingestion.

namespace {

[[noreturn]] void record_error(std::string_view source, std::size_t line, const std::string& msg) {
  throw DataError(std::string(source) + ":" + std::to_string(line) + ": " + msg);
}

// Applies the shared record contract to already-extracted fields.
LabeledComment build_item(std::string_view source, std::size_t line, std::string id,
                          std::string author, std::string created_at, std::string body,
                          std::string src, std::optional<int> label,
                          std::set<std::string> categories) {
  if (text::trim(id).empty()) record_error(source, line, "empty \"id\"");
  if (text::trim(body).empty()) record_error(source, line, "empty \"text\"");
  for (const auto& cat : categories) {
    if (!is_sgid_category(cat)) record_error(source, line, "unknown category '" + cat + "'");
  }
  if (label && *label != 0 && *label != 1) record_error(source, line, "label must be 0 or 1");
  if (!label && !categories.empty()) label = 1;
  if (label && *label == 0 && !categories.empty()) {
    record_error(source, line, "label 0 with non-empty categories");
  }
  if (label && *label == 1 && categories.empty()) {
    record_error(source, line, "label 1 requires at least one category");
  }
  LabeledComment item;
  item.comment.id = std::move(id);
  item.comment.author = std::move(author);
  try {
    item.comment.created_at = normalize_timestamp(created_at);
  } catch (const DataError& e) {
    record_error(source, line, e.what());
  }
  item.comment.text = std::move(body);
  item.comment.source = std::move(src);
  item.label = label;
  item.categories = std::move(categories);
  return item;
}

std::string json_string_field(const json& rec, const char* key, bool required,
                              std::string_view source, std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end() || it->is_null()) {
    if (required) record_error(source, line, std::string("missing \"") + key + "\"");
    return "";
  }
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  record_error(source, line, std::string("field \"") + key + "\" must be a string");
}

}  // namespace

Corpus ingest_jsonl_stream(std::istream& in, std::string_view source_name) {
  Corpus c;
  c.provenance.emplace_back(source_name);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      record_error(source_name, lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!rec.is_object()) record_error(source_name, lineno, "record is not a JSON object");
    std::optional<int> label;
    if (auto it = rec.find("label"); it != rec.end() && !it->is_null()) {
      if (it->is_boolean()) {
        label = it->get<bool>() ? 1 : 0;
      } else if (it->is_number_integer()) {
        label = static_cast<int>(it->get<long long>());
      } else {
        record_error(source_name, lineno, "\"label\" must be 0 or 1");
      }
    }
    std::set<std::string> cats;
    if (auto it = rec.find("categories"); it != rec.end() && !it->is_null()) {
      if (!it->is_array()) record_error(source_name, lineno, "\"categories\" must be an array");
      for (const auto& v : *it) {
        if (!v.is_string()) record_error(source_name, lineno, "category must be a string");
        cats.insert(v.get<std::string>());
      }
    }
    c.items.push_back(build_item(
        source_name, lineno, json_string_field(rec, "id", true, source_name, lineno),
        json_string_field(rec, "author", false, source_name, lineno),
        json_string_field(rec, "created_at", false, source_name, lineno),
        json_string_field(rec, "text", true, source_name, lineno),
        json_string_field(rec, "source", false, source_name, lineno), label, std::move(cats)));
  }
  return c;
}

namespace {

Corpus ingest_csv(std::istream& in, std::string_view source_name) {
  Corpus c;
  c.provenance.emplace_back(source_name);
  auto records = csv::read_all(in);
  if (records.empty()) return c;
  const auto& header = records.front().fields;
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (text::trim(header[i]) == name) return i;
    }
    return std::nullopt;
  };
  const auto id_col = column("id");
  const auto text_col = column("text");
  if (!id_col) record_error(source_name, 1, "header lacks \"id\" column");
  if (!text_col) record_error(source_name, 1, "header lacks \"text\" column");
  const auto author_col = column("author");
  const auto ts_col = column("created_at");
  const auto source_col = column("source");
  const auto label_col = column("label");
  const auto cat_col = column("categories");

  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size()) {
      record_error(source_name, rec.line,
                   "expected " + std::to_string(header.size()) + " fields, found " +
                       std::to_string(rec.fields.size()));
    }
    auto field = [&](const std::optional<std::size_t>& col) {
      return col ? rec.fields[*col] : std::string();
    };
    std::optional<int> label;
    if (auto l = text::trim(field(label_col)); !l.empty()) {
      if (l == "0" || l == "false") {
        label = 0;
      } else if (l == "1" || l == "true") {
        label = 1;
      } else {
        record_error(source_name, rec.line, "\"label\" must be 0 or 1");
      }
    }
    std::set<std::string> cats;
    for (auto& cat : text::split_trimmed(field(cat_col), ';')) cats.insert(std::move(cat));
    c.items.push_back(build_item(source_name, rec.line, field(id_col), field(author_col),
                                 field(ts_col), field(text_col), field(source_col), label,
                                 std::move(cats)));
  }
  return c;
}

}  // namespace

CorpusFormat format_from_path(const std::filesystem::path& path) {
  auto ext = text::to_lower(path.extension().string());
  if (ext == ".csv") return CorpusFormat::kCsv;
  return CorpusFormat::kJsonl;
}

Corpus ingest(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file: " + path.string());
  return format == CorpusFormat::kCsv ? ingest_csv(in, path.string())
                                      : ingest_jsonl_stream(in, path.string());
}

void write_jsonl(const Corpus& c, std::ostream& out) {
  for (const auto& item : c.items) {
    json rec;
    rec["id"] = item.comment.id;
    rec["author"] = item.comment.author;
    rec["created_at"] = item.comment.created_at;
    rec["text"] = item.comment.text;
    if (!item.comment.source.empty()) rec["source"] = item.comment.source;
    if (item.label) rec["label"] = *item.label;
    if (!item.categories.empty()) rec["categories"] = item.categories;
    out << rec.dump() << '\n';
  }
}

void write_jsonl(const Corpus& c, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_jsonl(c, out);
}

// Deduplication and filtering.

Corpus deduplicate(const Corpus& c) {
  Corpus out;
  out.provenance = c.provenance;
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (const auto& item : c.items) {
    auto key = std::make_tuple(item.comment.author, item.comment.text, item.comment.created_at);
    if (seen.insert(std::move(key)).second) out.items.push_back(item);
  }
  return out;
}

Corpus exclude_authors(const Corpus& c, const std::unordered_set<std::string>& authors) {
  Corpus out;
  out.provenance = c.provenance;
  for (const auto& item : c.items) {
    if (!authors.count(item.comment.author)) out.items.push_back(item);
  }
  return out;
}

std::unordered_set<std::string> load_author_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open author list: " + path.string());
  std::unordered_set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto name = text::trim(line);
    if (!name.empty() && name[0] != '#') out.insert(std::move(name));
  }
  return out;
}

CommonWordLanguageScorer::CommonWordLanguageScorer(std::unordered_set<std::string> words)
    : words_(std::move(words)) {}

CommonWordLanguageScorer CommonWordLanguageScorer::from_file(const std::filesystem::path& path) {
  return CommonWordLanguageScorer(load_word_list(path));
}

double CommonWordLanguageScorer::operator()(const std::string& input) const {
  const auto tokens = text::split_whitespace(input);
  if (tokens.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& tok : tokens) {
    std::size_t b = 0;
    std::size_t e = tok.size();
    while (b < e && !text::is_ascii_alnum(static_cast<unsigned char>(tok[b]))) ++b;
    while (e > b && !text::is_ascii_alnum(static_cast<unsigned char>(tok[e - 1]))) --e;
    if (b < e && words_.count(text::to_lower(std::string_view(tok).substr(b, e - b)))) ++hits;
  }
  return std::clamp(static_cast<double>(hits) / static_cast<double>(tokens.size()), 0.0, 1.0);
}

Corpus filter_language(const Corpus& c, const LanguageScorer& scorer, double threshold) {
  Corpus out;
  out.provenance = c.provenance;
  for (const auto& item : c.items) {
    double score;
    try {
      score = scorer(item.comment.text);
    } catch (const std::exception& e) {
      throw DataError("language scorer failed on item '" + item.comment.id + "': " + e.what());
    }
    if (!(score >= 0.0 && score <= 1.0)) {
      throw DataError("language scorer returned " + std::to_string(score) + " for item '" +
                      item.comment.id + "'");
    }
    if (score >= threshold) out.items.push_back(item);
  }
  return out;
}

// Stratified sampling.

StratifiedSample stratified_sample(const Corpus& c, const ScoreMap& scores,
                                   const Lexicon& lexicon,
                                   const StratifiedSampleOptions& opts) {
  StratifiedSample out;
  out.threshold = opts.high_threshold;
  std::vector<std::size_t> low_pool, no_kw_pool, lgbtq_pool;
  for (std::size_t i = 0; i < c.items.size(); ++i) {
    const auto& item = c.items[i];
    auto it = scores.find(item.comment.id);
    if (it == scores.end()) throw DataError("no score for item '" + item.comment.id + "'");
    const auto matches = lexicon.match(item.comment.text);
    if (matches.empty()) {
      no_kw_pool.push_back(i);
      continue;
    }
    const bool lgbtq = std::any_of(matches.begin(), matches.end(), [&](const KeywordMatch& m) {
      return m.category == opts.lgbtq_category;
    });
    if (it->second > opts.high_threshold) {
      out.a.push_back(i);
    } else {
      low_pool.push_back(i);
    }
    if (lgbtq && it->second <= opts.high_threshold) lgbtq_pool.push_back(i);
  }

  Rng rng(opts.seed);
  auto draw = [&](const std::vector<std::size_t>& pool, std::size_t k, const char* name) {
    if (k > pool.size()) {
      throw DataError(std::string("stratum ") + name + ": requested " + std::to_string(k) +
                      " items but pool has " + std::to_string(pool.size()));
    }
    std::vector<std::size_t> picked;
    for (auto j : rng.sample_indices(pool.size(), k)) picked.push_back(pool[j]);
    std::sort(picked.begin(), picked.end());
    return picked;
  };
  out.b = draw(low_pool, opts.size_b, "B");
  out.c = draw(no_kw_pool, opts.size_c, "C");
  std::vector<std::size_t> d_pool;
  std::set<std::size_t> in_b(out.b.begin(), out.b.end());
  for (auto i : lgbtq_pool) {
    if (!in_b.count(i)) d_pool.push_back(i);
  }
  out.d = draw(d_pool, opts.size_d, "D");
  return out;
}

// Partitions.

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (auto f : assignment) ++sizes[f];
  return sizes;
}

FoldPlan make_folds(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw UsageError("fold count must be at least 2");
  if (n < k) {
    throw UsageError("cannot split " + std::to_string(n) + " items into " + std::to_string(k) +
                     " folds");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  FoldPlan plan{k, seed, std::vector<std::size_t>(n)};
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    for (std::size_t j = 0; j < size; ++j) plan.assignment[order[pos++]] = f;
  }
  return plan;
}

Split make_split(std::size_t n, std::uint64_t seed) {
  if (n < 10) throw UsageError("an 8:1:1 split needs at least 10 items");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  const std::size_t n_train = n * 8 / 10;
  const std::size_t n_val = n / 10;
  Split s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                      order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  return s;
}

}  // namespace sgid
