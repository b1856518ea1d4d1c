#include <fstream>
#include <string>

#include "doctest.h"
#include "sgid/preprocess.hpp"
#include "sgid/rng.hpp"

using namespace sgid;

namespace {

const PreprocessTables& tables() {
  static const PreprocessTables t = PreprocessTables::load_default();
  return t;
}

std::string full(std::string_view s) { return preprocess(s, PreprocessConfig{}, tables()); }

bool clean_whitespace(const std::string& s) {
  if (s.empty()) return true;
  if (s.front() == ' ' || s.back() == ' ') return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '\t' || c == '\n' || c == '\r') return false;
    if (c == ' ' && i + 1 < s.size() && s[i + 1] == ' ') return false;
  }
  return true;
}

}  // namespace

TEST_CASE("tables") {
  CHECK(tables().contractions.size() == 153);
  CHECK(tables().contractions.at("shouldn't") == "should not");
  CHECK(tables().adversarial.at('0') == 'o');
  CHECK(tables().adversarial.at('1') == 'l');
  CHECK(tables().adversarial.at('3') == 'e');
  CHECK(tables().dictionary.contains("soon"));
}

TEST_CASE("remove_urls") {
  CHECK(full("see https://a.b/c for details") == "see for details");
  CHECK(remove_urls("no links here") == "no links here");
  std::string two = remove_urls("a http://x.io b www.y.org/z c");
  CHECK(two.find("x.io") == std::string::npos);
  CHECK(two.find("y.org") == std::string::npos);
  CHECK(full("a http://x.io b www.y.org/z c") == "a b c");
}

TEST_CASE("expand_contractions") {
  const auto& t = tables().contractions;
  CHECK(expand_contractions("shouldn't", t) == "should not");
  CHECK(expand_contractions("it's", t) == "it is");
  CHECK(expand_contractions("It's", t) == "It is");
  CHECK(expand_contractions("IT'S", t) == "It is");
  CHECK(expand_contractions("it’s", t) == "it is");
  CHECK(expand_contractions("cats", t) == "cats");
}

TEST_CASE("remove_special_symbols") {
  CHECK(remove_special_symbols("cost: $5 & more") == "cost: 5  more");
  CHECK(full("cost: $5 & more") == "cost 5 more");
  CHECK(remove_special_symbols("plain text") == "plain text");
  CHECK(remove_special_symbols("a+b=c") == "abc");
  CHECK(remove_special_symbols("caf\xc3\xa9") == "caf\xc3\xa9");
}

TEST_CASE("split_identifiers") {
  CHECK(split_identifiers("current_bride") == "current bride");
  CHECK(split_identifiers("breastSize") == "breast Size");
  CHECK(split_identifiers("lowercase") == "lowercase");
  CHECK(split_identifiers(":ok_woman:") == ":ok_woman:");
}

TEST_CASE("eliminate_repetition") {
  CHECK(eliminate_repetition("Gaaaaaaaaaaaaaaaaay", tables()) == "Gay");
  CHECK(eliminate_repetition("b00b", tables()) == "boob");
  CHECK(eliminate_repetition("soon", tables()) == "soon");
  CHECK(eliminate_repetition("sooooon", tables()) == "soon");
  CHECK(eliminate_repetition("gaaay", tables()) == "gay");
  CHECK(eliminate_repetition("v2", tables()) == "v2");
  CHECK(eliminate_repetition("1000", tables()) == "1000");
}

TEST_CASE("replace_emoji") {
  CHECK(replace_emoji(":ok_woman: looks fine") == "emoji looks fine");
  CHECK(replace_emoji(":smile:") == "emoji");
  CHECK(replace_emoji("no markup") == "no markup");
  CHECK(replace_emoji(":smile:", "EMO") == "EMO");
  CHECK(full("\xF0\x9F\x98\x80\xF0\x9F\x98\x80 nice") == "emoji nice");
  CHECK(full(":ok_woman:") == "emoji");
}

TEST_CASE("pipeline") {
  CHECK(full("It's a b00b https://x.y :smile:") == "it is a boob emoji");
  CHECK(preprocess("  A  b\t\tC ", PreprocessConfig::none(), tables()) == "A b C");

  PreprocessConfig no_lower;
  no_lower.lowercase = false;
  CHECK(preprocess("Gaaaaaaaaaaaaaaaaay", no_lower, tables()) == "Gay");

  // Skipping a step leaves its input pattern alone.
  PreprocessConfig no_urls;
  no_urls.remove_urls = false;
  CHECK(preprocess("see https://a.b", no_urls, tables()).find("https") != std::string::npos);
}

TEST_CASE("pipeline is idempotent on the golden corpus") {
  std::ifstream in(std::string(SGID_TEST_DATA_DIR) + "/preprocess_corpus.txt");
  REQUIRE(in);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::string once = full(line);
    CHECK_MESSAGE(full(once) == once, line);
    CHECK_MESSAGE(clean_whitespace(once), line);
  }
  CHECK(n == 200);
}

TEST_CASE("steps are total over arbitrary bytes") {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    std::size_t len = rng.below(40);
    for (std::size_t i = 0; i < len; ++i) s.push_back(static_cast<char>(rng.below(256)));
    std::string once = full(s);
    CHECK(clean_whitespace(once));
    CHECK(full(once) == once);
  }
}
