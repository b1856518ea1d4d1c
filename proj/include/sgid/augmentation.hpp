#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sgid/lexicon.hpp"

namespace sgid {

enum class Strategy { kRandom, kGenerate, kMixed };

std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view s);  // random | generate | mixed

/// Target SGID:non-SGID ratio kept as an exact fraction, so that ceil(r*y)
/// is computed in integers ("0.33" is 33/100, not 0.33000000000000002).
struct Ratio {
  std::int64_t num = 1;
  std::int64_t den = 1;

  /// Decimal ("0.66", "1") or fraction ("2/3"). Must lie in (0,1].
  static Ratio parse(std::string_view s);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;  // decimal form when exact, else "num/den"

  friend bool operator==(const Ratio& a, const Ratio& b) {
    return a.num * b.den == b.num * a.den;
  }
};

/// The nine ratios of the oversampling grid.
std::vector<Ratio> default_ratio_grid();

/// max(0, ceil(r*y) - x).
std::size_t samples_to_add(std::size_t x, std::size_t y, const Ratio& r);

enum class Provenance { kOriginal, kDuplicate, kGenerated };
std::string_view to_string(Provenance p);

struct TrainingSample {
  std::string text;
  int label = 0;
  Provenance provenance = Provenance::kOriginal;
  std::size_t source = 0;  // index of the originating input sample
};

struct AugmentationPlan {
  Strategy strategy = Strategy::kRandom;
  Ratio ratio;
  std::uint64_t seed = 42;
  std::size_t x = 0;  // SGID count before
  std::size_t y = 0;  // non-SGID count
  std::size_t n_add = 0;
  std::size_t duplicates = 0;
  std::size_t generated = 0;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

struct AugmentationResult {
  std::vector<TrainingSample> samples;  // input rows unchanged, then additions
  AugmentationPlan plan;
};

/// Appends exactly n_add SGID samples.
///   random:   uniform with-replacement duplicates of SGID inputs
///   generate: draws from the variant pool of all SGID inputs, without
///             replacement until the pool is exhausted, then with
///   mixed:    ceil(n_add/2) duplicates followed by floor(n_add/2) generated
/// An empty pool falls back to duplicates and records a warning.
AugmentationResult oversample(const std::vector<TrainingSample>& train, Strategy strategy,
                              const Ratio& ratio, const EquivalenceGroups& groups,
                              std::uint64_t seed);

}  // namespace sgid
