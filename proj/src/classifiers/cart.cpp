// CART classification trees (Gini) and the random forest built from them.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "classifier_common.hpp"
#include "emosens/classifiers.hpp"
#include "emosens/error.hpp"
#include "emosens/parallel.hpp"

namespace emosens {
namespace {

using Counts = std::array<std::int64_t, kNumEmotions>;

// Sum of squared class counts over node size, compared exactly as a
// fraction. A split maximising sum_L/n_L + sum_R/n_R minimises the weighted
// Gini impurity of the children.
struct SplitScore {
  __int128 numerator = 0;    // sum_L * n_R + sum_R * n_L
  __int128 denominator = 1;  // n_L * n_R

  bool better_than(const SplitScore& o) const {
    return numerator * o.denominator > o.numerator * denominator;
  }
};

std::int64_t sum_squares(const Counts& c) {
  std::int64_t s = 0;
  for (auto v : c) s += v * v;
  return s;
}

struct TreeSettings {
  std::size_t max_depth = 0;  // 0: unlimited
  std::size_t min_samples_leaf = 1;
  std::size_t max_features = 0;  // 0: all
};

class CartBuilder {
 public:
  CartBuilder(const Matrix& x, std::span<const Emotion> y, TreeSettings settings, std::uint64_t seed)
      : x_(x), y_(y), settings_(settings), rng_(seed), features_(x.cols()) {
    std::iota(features_.begin(), features_.end(), std::size_t{0});
  }

  ClassificationTree build(std::vector<std::size_t> rows) {
    ClassificationTree tree;
    tree_ = &tree;
    grow(std::move(rows), 0);
    return tree;
  }

 private:
  struct Split {
    std::size_t feature;
    double threshold;
  };

  Counts count(const std::vector<std::size_t>& rows) const {
    Counts c{};
    for (auto r : rows) ++c[index_of(y_[r])];
    return c;
  }

  std::vector<std::size_t> candidate_features() {
    const std::size_t p = x_.cols();
    if (settings_.max_features == 0 || settings_.max_features >= p) return features_;
    // Partial Fisher-Yates, then scan in index order so ties resolve to the
    // lowest feature index.
    std::vector<std::size_t> pool = features_;
    for (std::size_t i = 0; i < settings_.max_features; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, p - 1);
      std::swap(pool[i], pool[pick(rng_)]);
    }
    pool.resize(settings_.max_features);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

  std::optional<Split> best_split(const std::vector<std::size_t>& rows, const Counts& total) {
    const std::size_t n = rows.size();
    const std::size_t min_leaf = settings_.min_samples_leaf;
    if (n < 2 * min_leaf) return std::nullopt;

    std::optional<Split> best;
    SplitScore best_score;
    std::vector<std::pair<double, Emotion>> sorted(n);
    for (std::size_t f : candidate_features()) {
      for (std::size_t i = 0; i < n; ++i) sorted[i] = {x_(rows[i], f), y_[rows[i]]};
      std::sort(sorted.begin(), sorted.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (sorted.front().first == sorted.back().first) continue;

      Counts left{};
      Counts right = total;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto k = index_of(sorted[i].second);
        ++left[k];
        --right[k];
        if (sorted[i].first == sorted[i + 1].first) continue;
        const std::size_t n_left = i + 1;
        const std::size_t n_right = n - n_left;
        if (n_left < min_leaf || n_right < min_leaf) continue;
        SplitScore score;
        score.numerator = static_cast<__int128>(sum_squares(left)) * static_cast<__int128>(n_right) +
                          static_cast<__int128>(sum_squares(right)) * static_cast<__int128>(n_left);
        score.denominator = static_cast<__int128>(n_left) * static_cast<__int128>(n_right);
        if (!best || score.better_than(best_score)) {
          best_score = score;
          best = Split{f, detail::midpoint_threshold(sorted[i].first, sorted[i + 1].first)};
        }
      }
    }
    return best;
  }

  int grow(std::vector<std::size_t> rows, std::size_t depth) {
    const Counts counts = count(rows);
    const int id = static_cast<int>(tree_->nodes.size());
    tree_->nodes.emplace_back();
    {
      auto& leaf = tree_->nodes.back().leaf;
      for (std::size_t k = 0; k < kNumEmotions; ++k) {
        leaf[k] = static_cast<double>(counts[k]) / static_cast<double>(rows.size());
      }
    }

    const bool pure = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;
    const bool depth_limited = settings_.max_depth > 0 && depth >= settings_.max_depth;
    if (pure || depth_limited) return id;

    const auto split = best_split(rows, counts);
    if (!split) return id;

    std::vector<std::size_t> left, right;
    for (auto r : rows) (x_(r, split->feature) <= split->threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    auto& node = tree_->nodes[static_cast<std::size_t>(id)];
    node.feature = static_cast<int>(split->feature);
    node.threshold = split->threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  const Matrix& x_;
  std::span<const Emotion> y_;
  TreeSettings settings_;
  std::mt19937_64 rng_;
  std::vector<std::size_t> features_;
  ClassificationTree* tree_ = nullptr;
};

}  // namespace

Model train_decision_tree(const Matrix& x, std::span<const Emotion> y, const HyperParams& hp) {
  detail::check_training_set(x, y);
  Model model;
  model.hyperparams = resolved_hyperparams(ModelKind::DecisionTree, hp);
  model.n_features = x.cols();
  TreeSettings settings;
  settings.max_depth = static_cast<std::size_t>(model.hyperparams.get("max_depth", 0));
  settings.min_samples_leaf = static_cast<std::size_t>(model.hyperparams.get("min_samples_leaf", 1));

  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  model.state = DecisionTreeState{CartBuilder(x, y, settings, 0).build(std::move(rows))};
  return model;
}

Model train_random_forest(const Matrix& x, std::span<const Emotion> y, const HyperParams& hp) {
  detail::check_training_set(x, y);
  Model model;
  model.hyperparams = resolved_hyperparams(ModelKind::RandomForest, hp);
  model.n_features = x.cols();
  const auto& h = model.hyperparams;

  TreeSettings settings;
  settings.max_depth = static_cast<std::size_t>(h.get("max_depth", 0));
  settings.min_samples_leaf = static_cast<std::size_t>(h.get("min_samples_leaf", 1));
  settings.max_features = static_cast<std::size_t>(h.get("max_features", 0));
  if (settings.max_features == 0) {
    settings.max_features = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(x.cols()))));
  }
  const bool bootstrap = h.get("bootstrap", 1) != 0.0;
  const auto n_trees = static_cast<std::size_t>(h.get("n_trees", 100));
  const auto seed = static_cast<std::uint64_t>(h.get("seed", 42));

  RandomForestState state;
  state.trees.resize(n_trees);
  state.seeds.resize(n_trees);
  for (std::size_t t = 0; t < n_trees; ++t) state.seeds[t] = detail::mix_seed(seed, t);

  parallel_for(n_trees, [&](std::size_t t) {
    std::mt19937_64 rng(state.seeds[t]);
    std::vector<std::size_t> rows(x.rows());
    if (bootstrap) {
      std::uniform_int_distribution<std::size_t> draw(0, x.rows() - 1);
      for (auto& r : rows) r = draw(rng);
      std::sort(rows.begin(), rows.end());
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    state.trees[t] = CartBuilder(x, y, settings, rng()).build(std::move(rows));
  });
  model.state = std::move(state);
  return model;
}

}  // namespace emosens
