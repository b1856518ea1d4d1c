#include "sgid/augmentation.hpp"

#include <charconv>
#include <numeric>

#include "sgid/error.hpp"
#include "sgid/rng.hpp"
#include "sgid/text.hpp"

namespace sgid {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kRandom: return "random";
    case Strategy::kGenerate: return "generate";
    case Strategy::kMixed: return "mixed";
  }
  return "?";
}

Strategy strategy_from_string(std::string_view s) {
  if (s == "random") return Strategy::kRandom;
  if (s == "generate") return Strategy::kGenerate;
  if (s == "mixed") return Strategy::kMixed;
  throw UsageError("unknown augmentation strategy '" + std::string(s) +
                   "' (expected random, generate or mixed)");
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kOriginal: return "original";
    case Provenance::kDuplicate: return "duplicate";
    case Provenance::kGenerated: return "generated";
  }
  return "?";
}

namespace {

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || v < 0) {
    throw UsageError("invalid ratio '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

Ratio Ratio::parse(std::string_view raw) {
  std::string s = text::trim(raw);
  Ratio r;
  if (s.find_first_of("+-") != std::string::npos) {
    throw UsageError("ratio '" + s + "' must lie in (0,1]");
  }
  if (auto slash = s.find('/'); slash != std::string::npos) {
    r.num = parse_int(std::string_view(s).substr(0, slash), raw);
    r.den = parse_int(std::string_view(s).substr(slash + 1), raw);
  } else {
    auto dot = s.find('.');
    std::string_view whole = std::string_view(s).substr(0, dot);
    std::string_view frac = dot == std::string::npos ? std::string_view{}
                                                     : std::string_view(s).substr(dot + 1);
    if (frac.size() > 9) throw UsageError("ratio '" + s + "' has too many decimals");
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    std::int64_t w = whole.empty() ? 0 : parse_int(whole, raw);
    std::int64_t f = frac.empty() ? 0 : parse_int(frac, raw);
    if (whole.empty() && frac.empty()) throw UsageError("invalid ratio '" + s + "'");
    r.num = w * scale + f;
    r.den = scale;
  }
  if (r.den == 0 || r.num == 0 || r.num > r.den) {
    throw UsageError("ratio '" + s + "' must lie in (0,1]");
  }
  std::int64_t g = std::gcd(r.num, r.den);
  r.num /= g;
  r.den /= g;
  return r;
}

std::string Ratio::to_string() const {
  std::int64_t d2 = den;
  // Exact decimal iff den = 2^a 5^b; scale up to a power of ten.
  while (d2 % 2 == 0) d2 /= 2;
  while (d2 % 5 == 0) d2 /= 5;
  if (d2 != 1) return std::to_string(num) + "/" + std::to_string(den);
  std::int64_t scale = 1;
  int places = 0;
  while (scale % den != 0) {
    scale *= 10;
    ++places;
  }
  std::int64_t scaled = num * (scale / den);
  std::string whole = std::to_string(scaled / scale);
  if (places == 0) return whole;
  std::string frac = std::to_string(scaled % scale);
  frac.insert(0, static_cast<std::size_t>(places) - frac.size(), '0');
  return whole + "." + frac;
}

std::vector<Ratio> default_ratio_grid() {
  std::vector<Ratio> out;
  for (const char* s : {"0.15", "0.20", "0.25", "0.33", "0.50", "0.66", "0.75", "0.83", "1"}) {
    out.push_back(Ratio::parse(s));
  }
  return out;
}

std::size_t samples_to_add(std::size_t x, std::size_t y, const Ratio& r) {
  // ceil(num * y / den) in integers.
  auto num = static_cast<unsigned __int128>(r.num) * y;
  auto target = static_cast<std::size_t>((num + static_cast<unsigned>(r.den) - 1) /
                                         static_cast<unsigned>(r.den));
  return target > x ? target - x : 0;
}

nlohmann::json AugmentationPlan::to_json() const {
  return nlohmann::json{{"strategy", std::string(sgid::to_string(strategy))},
                        {"ratio", ratio.to_string()},
                        {"seed", seed},
                        {"x", x},
                        {"y", y},
                        {"n_add", n_add},
                        {"duplicates", duplicates},
                        {"generated", generated},
                        {"warnings", warnings}};
}

AugmentationResult oversample(const std::vector<TrainingSample>& train, Strategy strategy,
                              const Ratio& ratio, const EquivalenceGroups& groups,
                              std::uint64_t seed) {
  std::vector<std::size_t> positives;
  std::size_t y = 0;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train[i].label == 1) positives.push_back(i);
    else if (train[i].label == 0) ++y;
    else throw DataError("training label " + std::to_string(train[i].label) + " is not 0 or 1");
  }
  if (positives.empty() || y == 0) {
    throw DataError("oversampling needs both classes in the training set");
  }

  AugmentationResult result;
  result.samples = train;
  AugmentationPlan& plan = result.plan;
  plan.strategy = strategy;
  plan.ratio = ratio;
  plan.seed = seed;
  plan.x = positives.size();
  plan.y = y;
  plan.n_add = samples_to_add(plan.x, y, ratio);
  if (plan.n_add == 0) return result;

  std::size_t n_dup = 0, n_gen = 0;
  switch (strategy) {
    case Strategy::kRandom: n_dup = plan.n_add; break;
    case Strategy::kGenerate: n_gen = plan.n_add; break;
    case Strategy::kMixed:
      n_dup = (plan.n_add + 1) / 2;
      n_gen = plan.n_add / 2;
      break;
  }

  struct PoolEntry {
    std::string text;
    std::size_t source;
  };
  std::vector<PoolEntry> pool;
  if (n_gen > 0) {
    for (std::size_t i : positives) {
      for (std::string& v : generate_variants(train[i].text, groups)) {
        pool.push_back({std::move(v), train[i].source});
      }
    }
    if (pool.empty()) {
      plan.warnings.push_back("variant pool is empty; " + std::to_string(n_gen) +
                              " generated samples replaced by duplicates");
      n_dup += n_gen;
      n_gen = 0;
    }
  }

  Rng rng(seed);
  result.samples.reserve(train.size() + plan.n_add);
  for (std::size_t k = 0; k < n_dup; ++k) {
    const TrainingSample& src = train[positives[rng.below(positives.size())]];
    result.samples.push_back({src.text, 1, Provenance::kDuplicate, src.source});
  }
  if (n_gen > 0) {
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    for (std::size_t k = 0; k < n_gen; ++k) {
      std::size_t pick = k < order.size() ? order[k] : rng.below(pool.size());
      result.samples.push_back({pool[pick].text, 1, Provenance::kGenerated, pool[pick].source});
    }
  }
  plan.duplicates = n_dup;
  plan.generated = n_gen;
  return result;
}

}  // namespace sgid
