#include <algorithm>
#include <cmath>
#include <limits>

#include "sgid/error.hpp"
#include "sgid/models.hpp"
#include "sgid/rng.hpp"

namespace sgid {

namespace {

double feature_value(const SparseVector& x, std::uint32_t feature) {
  auto it = std::lower_bound(x.indices.begin(), x.indices.end(), feature);
  if (it == x.indices.end() || *it != feature) return 0.0;
  return x.values[static_cast<std::size_t>(it - x.indices.begin())];
}

struct Entry {
  std::uint32_t feature;
  double value;
  std::size_t row;
};

// Same-valued samples of one feature inside a node.
struct ValueGroup {
  double value;
  double pos;
  double neg;
  std::size_t count;
};

double midpoint(double a, double b) {
  double m = a + (b - a) / 2.0;
  // Rounding can land the midpoint on b, which would send b's group left.
  if (!(m < b)) m = a;
  return m;
}

class SplitFinder {
 public:
  SplitFinder(const Dataset& data, std::span<const double> weights, std::size_t min_leaf)
      : data_(data), weights_(weights), min_leaf_(std::max<std::size_t>(min_leaf, 1)),
        slot_(data.dims, kNone), stamp_(data.dims, 0) {}

  // rng == nullptr or max_features >= dims evaluates every feature in
  // ascending order. Otherwise features are drawn without replacement until
  // max_features have been visited and a valid split exists.
  std::optional<SplitChoice> find(std::span<const std::size_t> rows, std::size_t max_features,
                                  Rng* rng) {
    ++generation_;
    collect(rows);
    total_pos_ = 0.0;
    total_neg_ = 0.0;
    for (std::size_t r : rows) {
      (data_.labels[r] == 1 ? total_pos_ : total_neg_) += weights_[r];
    }
    total_count_ = rows.size();
    eps_ = 1e-12 * std::max(1.0, total_pos_ + total_neg_);
    best_.reset();

    const std::size_t d = data_.dims;
    if (rng == nullptr || max_features == 0 || max_features >= d) {
      for (std::size_t g = 0; g < ranges_.size(); ++g) evaluate(g);
      return best_;
    }
    if (perm_.size() != d) {
      perm_.resize(d);
      for (std::size_t i = 0; i < d; ++i) perm_[i] = static_cast<std::uint32_t>(i);
    }
    for (std::size_t i = 0; i < d; ++i) {
      if (i >= max_features && best_) break;
      std::size_t j = i + static_cast<std::size_t>(rng->below(d - i));
      std::swap(perm_[i], perm_[j]);
      std::uint32_t f = perm_[i];
      if (stamp_[f] == generation_) evaluate(slot_[f]);
    }
    return best_;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  struct Range {
    std::uint32_t feature;
    std::size_t begin;
    std::size_t end;
  };

  void collect(std::span<const std::size_t> rows) {
    entries_.clear();
    for (std::size_t r : rows) {
      const SparseVector& x = data_.rows[r];
      for (std::size_t k = 0; k < x.indices.size(); ++k) {
        if (x.values[k] != 0.0) entries_.push_back({x.indices[k], x.values[k], r});
      }
    }
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
      if (a.feature != b.feature) return a.feature < b.feature;
      if (a.value != b.value) return a.value < b.value;
      return a.row < b.row;
    });
    ranges_.clear();
    for (std::size_t i = 0; i < entries_.size();) {
      std::size_t j = i;
      while (j < entries_.size() && entries_[j].feature == entries_[i].feature) ++j;
      std::uint32_t f = entries_[i].feature;
      slot_[f] = ranges_.size();
      stamp_[f] = generation_;
      ranges_.push_back({f, i, j});
      i = j;
    }
  }

  void evaluate(std::size_t range_index) {
    const Range& range = ranges_[range_index];
    groups_.clear();
    double nz_pos = 0.0, nz_neg = 0.0;
    std::size_t nz_count = 0;
    for (std::size_t k = range.begin; k < range.end; ++k) {
      const Entry& e = entries_[k];
      double w = weights_[e.row];
      bool positive = data_.labels[e.row] == 1;
      if (groups_.empty() || groups_.back().value != e.value) {
        groups_.push_back({e.value, 0.0, 0.0, 0});
      }
      (positive ? groups_.back().pos : groups_.back().neg) += w;
      ++groups_.back().count;
      (positive ? nz_pos : nz_neg) += w;
      ++nz_count;
    }
    if (nz_count < total_count_) {
      ValueGroup zero{0.0, total_pos_ - nz_pos, total_neg_ - nz_neg, total_count_ - nz_count};
      auto at = std::lower_bound(groups_.begin(), groups_.end(), 0.0,
                                 [](const ValueGroup& g, double v) { return g.value < v; });
      groups_.insert(at, zero);
    }
    if (groups_.size() < 2) return;

    double lp = 0.0, ln = 0.0;
    std::size_t lc = 0;
    for (std::size_t i = 0; i + 1 < groups_.size(); ++i) {
      lp += groups_[i].pos;
      ln += groups_[i].neg;
      lc += groups_[i].count;
      std::size_t rc = total_count_ - lc;
      if (lc < min_leaf_ || rc < min_leaf_) continue;
      double rp = total_pos_ - lp;
      double rn = total_neg_ - ln;
      if (rp < 0.0) rp = 0.0;
      if (rn < 0.0) rn = 0.0;
      double impurity = (lp + ln) * gini(lp, ln) + (rp + rn) * gini(rp, rn);
      double threshold = midpoint(groups_[i].value, groups_[i + 1].value);
      consider({range.feature, threshold, impurity});
    }
  }

  void consider(const SplitChoice& c) {
    if (!best_ || c.child_impurity < best_->child_impurity - eps_) {
      best_ = c;
      return;
    }
    if (c.child_impurity > best_->child_impurity + eps_) return;
    if (c.feature < best_->feature ||
        (c.feature == best_->feature && c.threshold < best_->threshold)) {
      best_ = c;
    }
  }

  const Dataset& data_;
  std::span<const double> weights_;
  std::size_t min_leaf_;
  std::vector<std::size_t> slot_;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t generation_ = 0;
  std::vector<Entry> entries_;
  std::vector<Range> ranges_;
  std::vector<ValueGroup> groups_;
  std::vector<std::uint32_t> perm_;
  double total_pos_ = 0.0;
  double total_neg_ = 0.0;
  std::size_t total_count_ = 0;
  double eps_ = 0.0;
  std::optional<SplitChoice> best_;
};

}  // namespace

double gini(double positive_weight, double negative_weight) {
  double total = positive_weight + negative_weight;
  if (total <= 0.0) return 0.0;
  double p = positive_weight / total;
  double q = negative_weight / total;
  return 1.0 - (p * p + q * q);
}

std::optional<SplitChoice> best_split(const Dataset& data, std::span<const std::size_t> rows,
                                      std::span<const double> weights,
                                      std::size_t min_samples_leaf) {
  SplitFinder finder(data, weights, min_samples_leaf);
  return finder.find(rows, 0, nullptr);
}

DecisionTree fit_tree(const Dataset& data, std::span<const double> weights,
                      const TreeParams& params, std::size_t max_features,
                      std::uint64_t seed) {
  struct Pending {
    std::int32_t node;
    std::vector<std::size_t> rows;
    std::size_t depth;
  };

  SplitFinder finder(data, weights, params.min_samples_leaf);
  Rng rng(seed);
  const std::size_t min_leaf = std::max<std::size_t>(params.min_samples_leaf, 1);

  DecisionTree tree;
  std::vector<std::size_t> root_rows;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (weights[i] > 0.0) root_rows.push_back(i);
  }
  tree.nodes.emplace_back();
  std::vector<Pending> stack;
  stack.push_back({0, std::move(root_rows), 0});

  while (!stack.empty()) {
    Pending cur = std::move(stack.back());
    stack.pop_back();

    double pos = 0.0, neg = 0.0;
    for (std::size_t r : cur.rows) (data.labels[r] == 1 ? pos : neg) += weights[r];
    TreeNode& node = tree.nodes[static_cast<std::size_t>(cur.node)];
    node.value = pos + neg > 0.0 ? pos / (pos + neg) : 0.0;

    bool leaf = pos == 0.0 || neg == 0.0 || cur.rows.size() < 2 * min_leaf ||
                (params.max_depth > 0 && cur.depth >= params.max_depth);
    if (leaf) continue;
    auto split = finder.find(cur.rows, max_features, &rng);
    if (!split) continue;

    std::vector<std::size_t> left, right;
    for (std::size_t r : cur.rows) {
      (feature_value(data.rows[r], split->feature) <= split->threshold ? left : right)
          .push_back(r);
    }
    auto left_id = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    TreeNode& parent = tree.nodes[static_cast<std::size_t>(cur.node)];
    parent.feature = static_cast<std::int32_t>(split->feature);
    parent.threshold = split->threshold;
    parent.left = left_id;
    parent.right = left_id + 1;
    // Right first so the left subtree is built first; node numbering does
    // not depend on it, but it keeps the traversal order intuitive.
    stack.push_back({left_id + 1, std::move(right), cur.depth + 1});
    stack.push_back({left_id, std::move(left), cur.depth + 1});
  }
  return tree;
}

double DecisionTree::score(const SparseVector& x) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const TreeNode& n = nodes[i];
    double v = feature_value(x, static_cast<std::uint32_t>(n.feature));
    i = static_cast<std::size_t>(v <= n.threshold ? n.left : n.right);
  }
  return nodes[i].value;
}

double RandomForest::score(const SparseVector& x) const {
  double sum = 0.0;
  for (const DecisionTree& t : trees) sum += t.score(x);
  return sum / static_cast<double>(trees.size());
}

}  // namespace sgid
