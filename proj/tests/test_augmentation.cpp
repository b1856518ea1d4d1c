#include <set>

#include "doctest.h"
#include "sgid/augmentation.hpp"
#include "sgid/error.hpp"
#include "sgid/resources.hpp"
#include "sgid/rng.hpp"

using namespace sgid;

namespace {

const EquivalenceGroups& groups() {
  static const EquivalenceGroups g = EquivalenceGroups::load(data_file("equivalence_groups.txt"));
  return g;
}

std::vector<TrainingSample> make_train(std::size_t x, std::size_t y) {
  const std::vector<std::string> sgid_texts{
      "This is cheating harder than your mom does.", "go back to the kitchen girl",
      "she only got the job because she is a woman", "nice tits in that avatar",
      "your sister would code better", "stop acting like a little girl"};
  std::vector<TrainingSample> out;
  for (std::size_t i = 0; i < y; ++i)
    out.push_back({"benign comment number " + std::to_string(i), 0, Provenance::kOriginal, i});
  for (std::size_t i = 0; i < x; ++i) {
    std::size_t idx = out.size();
    out.push_back({sgid_texts[i % sgid_texts.size()], 1, Provenance::kOriginal, idx});
  }
  return out;
}

}  // namespace

TEST_CASE("ratio parsing") {
  CHECK(Ratio::parse("0.33") == Ratio{33, 100});
  CHECK(Ratio::parse("2/3") == Ratio{2, 3});
  CHECK(Ratio::parse("1") == Ratio{1, 1});
  CHECK(Ratio::parse("0.5").to_string() == "0.5");
  CHECK(Ratio::parse("2/3").to_string() == "2/3");
  CHECK_THROWS_AS(Ratio::parse("0"), UsageError);
  CHECK_THROWS_AS(Ratio::parse("1.5"), UsageError);
  CHECK_THROWS_AS(Ratio::parse("-0.2"), UsageError);
  CHECK_THROWS_AS(Ratio::parse("abc"), UsageError);
  CHECK_THROWS_AS(Ratio::parse("1/0"), UsageError);

  std::vector<std::string> expected{"0.15", "0.2", "0.25", "0.33", "0.5",
                                    "0.66", "0.75", "0.83", "1"};
  auto grid = default_ratio_grid();
  REQUIRE(grid.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) CHECK(grid[i].to_string() == expected[i]);
  CHECK(strategy_from_string(to_string(Strategy::kMixed)) == Strategy::kMixed);
}

TEST_CASE("samples to add") {
  CHECK(samples_to_add(150, 1000, Ratio::parse("0.5")) == 350);
  CHECK(samples_to_add(150, 1000, Ratio::parse("0.15")) == 0);
  CHECK(samples_to_add(149, 1000, Ratio::parse("0.5")) == 351);
  CHECK(samples_to_add(0, 3, Ratio::parse("0.33")) == 1);
  CHECK(samples_to_add(10, 0, Ratio::parse("1")) == 0);

  Rng rng(3);
  for (const Ratio& r : default_ratio_grid()) {
    for (int trial = 0; trial < 100; ++trial) {
      std::size_t y = 1 + rng.below(20000);
      std::size_t x = rng.below(y + 1);
      std::size_t n = samples_to_add(x, y, r);
      // ceil(r*y) in integers, independent of the library's arithmetic.
      std::int64_t target = (r.num * static_cast<std::int64_t>(y) + r.den - 1) / r.den;
      std::int64_t want = std::max<std::int64_t>(0, target - static_cast<std::int64_t>(x));
      CHECK(static_cast<std::int64_t>(n) == want);
      // (x+n)/y >= r exactly, and the overshoot is below one sample.
      std::int64_t after = static_cast<std::int64_t>(x + n);
      CHECK(after * r.den >= r.num * static_cast<std::int64_t>(y));
      if (n > 0) CHECK((after - 1) * r.den < r.num * static_cast<std::int64_t>(y));
    }
  }
}

TEST_CASE("mixed split on the worked instance") {
  auto train = make_train(149, 1000);
  auto result = oversample(train, Strategy::kMixed, Ratio::parse("0.5"), groups(), 7);
  CHECK(result.plan.n_add == 351);
  CHECK(result.plan.duplicates == 176);
  CHECK(result.plan.generated == 175);
  CHECK(result.samples.size() == train.size() + 351);
  std::size_t dups = 0, gens = 0;
  for (const auto& s : result.samples) {
    dups += s.provenance == Provenance::kDuplicate;
    gens += s.provenance == Provenance::kGenerated;
  }
  CHECK(dups == 176);
  CHECK(gens == 175);
  CHECK(result.plan.to_json().at("n_add") == 351);
}

TEST_CASE("oversampling invariants") {
  Rng rng(5);
  for (Strategy st : {Strategy::kRandom, Strategy::kGenerate, Strategy::kMixed}) {
    for (const Ratio& r : default_ratio_grid()) {
      std::size_t y = 20 + rng.below(200);
      std::size_t x = 1 + rng.below(y / 4);
      auto train = make_train(x, y);
      std::uint64_t seed = rng.next();
      auto result = oversample(train, st, r, groups(), seed);
      const auto& s = result.samples;
      CHECK(result.plan.x == x);
      CHECK(result.plan.y == y);
      CHECK(result.plan.n_add == samples_to_add(x, y, r));
      REQUIRE(s.size() == train.size() + result.plan.n_add);

      for (std::size_t i = 0; i < train.size(); ++i) {
        CHECK(s[i].text == train[i].text);
        CHECK(s[i].label == train[i].label);
        CHECK(s[i].provenance == Provenance::kOriginal);
      }
      std::set<std::pair<std::size_t, std::string>> seen;
      std::size_t generated = 0;
      for (std::size_t i = train.size(); i < s.size(); ++i) {
        CHECK(s[i].label == 1);
        REQUIRE(s[i].source < train.size());
        const TrainingSample& src = train[s[i].source];
        CHECK(src.label == 1);
        if (s[i].provenance == Provenance::kDuplicate) {
          CHECK(s[i].text == src.text);
        } else {
          REQUIRE(s[i].provenance == Provenance::kGenerated);
          CHECK(is_group_substitution(src.text, s[i].text, groups()));
          ++generated;
          seen.insert({s[i].source, s[i].text});
        }
      }
      if (st == Strategy::kRandom) CHECK(generated == 0);
      // Without replacement until the pool runs out.
      std::size_t pool = 0;
      for (const auto& t : train)
        if (t.label == 1) pool += generate_variants(t.text, groups()).size();
      CHECK(seen.size() == std::min(generated, pool));

      auto again = oversample(train, st, r, groups(), seed);
      REQUIRE(again.samples.size() == s.size());
      for (std::size_t i = 0; i < s.size(); ++i) CHECK(again.samples[i].text == s[i].text);
    }
  }
}

TEST_CASE("empty variant pool falls back to duplicates") {
  std::vector<TrainingSample> train{{"no grouped words", 1, Provenance::kOriginal, 0},
                                    {"fine", 0, Provenance::kOriginal, 1},
                                    {"also fine", 0, Provenance::kOriginal, 2},
                                    {"still fine", 0, Provenance::kOriginal, 3}};
  auto result = oversample(train, Strategy::kGenerate, Ratio::parse("1"), groups(), 1);
  CHECK(result.plan.n_add == 2);
  CHECK(result.plan.duplicates == 2);
  CHECK(result.plan.generated == 0);
  CHECK(result.plan.warnings.size() == 1);
}

TEST_CASE("already at ratio is the identity") {
  auto train = make_train(150, 1000);
  auto result = oversample(train, Strategy::kRandom, Ratio::parse("0.15"), groups(), 1);
  CHECK(result.plan.n_add == 0);
  CHECK(result.samples.size() == train.size());
}
