#include <algorithm>
#include <map>
#include <sstream>

#include "doctest.h"
#include "sgid/error.hpp"
#include "sgid/lexicon.hpp"
#include "sgid/resources.hpp"
#include "sgid/rng.hpp"
#include "sgid/text.hpp"

using namespace sgid;

namespace {

const Lexicon& lexicon() {
  static const Lexicon lex = Lexicon::load(data_file("lexicon.txt"));
  return lex;
}

const EquivalenceGroups& groups() {
  static const EquivalenceGroups g = EquivalenceGroups::load(data_file("equivalence_groups.txt"));
  return g;
}

Lexicon parse(const std::string& s, std::vector<std::string>* warnings = nullptr) {
  std::istringstream in(s);
  return Lexicon::parse(in, warnings);
}

}  // namespace

TEST_CASE("default lexicon shape") {
  const Lexicon& lex = lexicon();
  CHECK(lex.categories().size() == 12);
  // Sizes of the listed keywords. Two table headers disagree with their own
  // lists (General women says 13, Flirtatious says 25); the lists win.
  std::map<std::string, std::size_t> expected{
      {"Pejoratives", 81},        {"LGBTQ+ identities and slurs", 30},
      {"Uncomfortable reference", 34}, {"Women kins", 15},
      {"Woman's body parts", 15}, {"Women roles", 14},
      {"General women", 15},      {"Flirtatious", 24},
      {"Physical appearance", 13}, {"Sexual threat", 9},
      {"Cloth", 11},              {"Men roles", 5}};
  for (const auto& [cat, n] : expected) CHECK_MESSAGE(lex.keywords(cat).size() == n, cat);
  CHECK(lex.keywords("Pejoratives").contains("bitch"));
  CHECK(lex.keywords("Men roles") ==
        std::set<std::string>{"dad", "papa", "daddy", "father", "husband"});
  CHECK(lex.keywords("Uncomfortable reference").contains("naked"));
  for (const auto& [cat, words] : lex.categories()) {
    for (const std::string& w : words) {
      CHECK(!w.empty());
      CHECK(text::to_lower(w) == w);
    }
  }
}

TEST_CASE("lexicon parsing edge cases") {
  std::vector<std::string> warnings;
  Lexicon empty = parse("", &warnings);
  CHECK(empty.empty());
  CHECK(warnings.size() == 1);

  warnings.clear();
  Lexicon dup = parse("[Cloth]\nskirt\nSkirt\n", &warnings);
  CHECK(dup.keywords("Cloth").size() == 1);
  CHECK(warnings.size() == 1);

  CHECK_THROWS_AS(parse("[Not a category]\nword\n"), DataError);
  CHECK_THROWS_AS(parse("orphan\n"), DataError);
}

TEST_CASE("keyword matching") {
  auto m = match_keywords("Your mom writes docs", lexicon());
  REQUIRE(m.size() == 1);
  CHECK(m[0] == KeywordMatch{"mom", "Women kins", 1});
  CHECK(match_keywords("commit the change", lexicon()).empty());

  auto two = match_keywords("Bitch, this bitch crashed", lexicon());
  std::size_t pej = std::count_if(two.begin(), two.end(),
                                  [](const KeywordMatch& k) { return k.category == "Pejoratives"; });
  CHECK(pej == 2);

  // Multi-token keyword and its position.
  auto mt = match_keywords("they want to get laid now", lexicon());
  REQUIRE(mt.size() == 1);
  CHECK(mt[0].keyword == "get laid");
  CHECK(mt[0].position == 3);

  // Matches never start inside a word.
  CHECK(match_keywords("mommy", lexicon()).size() == 1);
  CHECK(match_keywords("momentum", lexicon()).empty());
}

TEST_CASE("word count vector") {
  auto cats = default_count_categories();
  CHECK(cats[0] == "Pejoratives");
  CHECK(cats[1] == "Women kins");

  WordCountVector v = word_count_vector("your mom is a bitch", lexicon());
  CHECK(v == WordCountVector{1, 1, 0, 0, 0, 0, 0});
  CHECK(word_count_vector("", lexicon()) == WordCountVector{});
  CHECK(word_count_vector("mom mom mom", lexicon())[1] == 3);

  // Property: each entry counts the matches of its category.
  Rng rng(5);
  std::vector<std::string> vocab{"mom", "bitch", "gay", "skirt", "girl", "wife", "tits",
                                 "code", "review", "get", "laid", "dad", "the"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string t;
    for (int k = 0; k < 12; ++k) t += vocab[rng.below(vocab.size())] + " ";
    auto counts = word_count_vector(t, lexicon());
    auto matches = match_keywords(t, lexicon());
    for (std::size_t i = 0; i < 7; ++i) {
      int n = static_cast<int>(std::count_if(matches.begin(), matches.end(),
                                             [&](const KeywordMatch& km) {
                                               return km.category == cats[i];
                                             }));
      CHECK(counts[i] == n);
    }
  }
}

TEST_CASE("keyword expansion") {
  Lexicon v0 = parse("[Women kins]\nmom\n");
  std::vector<std::string> docs;
  for (int i = 0; i < 150; ++i) docs.push_back("naked mom the " + std::to_string(i));
  for (int i = 0; i < 99; ++i) docs.push_back("rare word " + std::to_string(i));
  std::unordered_set<std::string> stop{"the", "word"};
  auto ranked = expand_keywords(docs, v0, stop, 100);
  REQUIRE(ranked.size() == 1);
  CHECK(ranked[0] == std::pair<std::string, std::size_t>{"naked", 150});

  auto low = expand_keywords(docs, v0, stop, 99);
  REQUIRE(low.size() == 2);
  CHECK(low[0].first == "naked");
  CHECK(low[1] == std::pair<std::string, std::size_t>{"rare", 99});
  for (const auto& [w, df] : expand_keywords(docs, v0, stop, 1)) {
    CHECK(!v0.contains(w));
    CHECK(!stop.contains(w));
    CHECK(std::any_of(w.begin(), w.end(), [](char c) { return !text::is_ascii_digit(c); }));
  }
}

TEST_CASE("equivalence groups") {
  const EquivalenceGroups& g = groups();
  CHECK(g.size() == 44);
  CHECK(g.groups()[0] == std::vector<std::string>{"mother", "mom", "momma", "mommy", "mummy",
                                                  "mama", "grandma", "granny", "grandmother"});
  for (const auto& group : g.groups()) CHECK(group.size() >= 2);
  CHECK(g.group_of("mom") == std::optional<std::size_t>{0});
  CHECK_FALSE(g.group_of("refactor").has_value());

  std::istringstream overlap("a, b\nb, c\n");
  CHECK_THROWS_AS(EquivalenceGroups::parse(overlap), DataError);
  std::istringstream single("a\n");
  CHECK_THROWS_AS(EquivalenceGroups::parse(single), DataError);
}

TEST_CASE("variant generation") {
  const std::string mom = "This is cheating harder than your mom does.";
  auto v = generate_variants(mom, groups());
  CHECK(v.size() == 8);
  CHECK(std::find(v.begin(), v.end(), "This is cheating harder than your grandma does.") != v.end());
  for (const std::string& s : v) {
    CHECK(s != mom);
    CHECK(is_group_substitution(mom, s, groups()));
  }

  CHECK(generate_variants("fix the flaky test", groups()).empty());

  // Groups of sizes 3 and 4: 2 + 3 variants.
  EquivalenceGroups small({{"boob", "tits", "breast"}, {"sister", "daughter", "niece", "aunt"}});
  auto two = generate_variants("my sister has big tits and my sister knows", small);
  CHECK(two.size() == 5);
  CHECK(std::find(two.begin(), two.end(),
                  "my niece has big tits and my niece knows") != two.end());

  // Capitalization of the replaced token carries over.
  auto cap = generate_variants("Mom said no", groups());
  CHECK(std::find(cap.begin(), cap.end(), "Grandma said no") != cap.end());

  CHECK_FALSE(is_group_substitution("my sister", "my sister", small));
  CHECK_FALSE(is_group_substitution("my sister and sister", "my niece and sister", small));
  CHECK_FALSE(is_group_substitution("my sister", "my boob", small));
  CHECK_FALSE(is_group_substitution("my sister", "your niece", small));
}
