// Multiclass SAMME over depth-1 trees.

#include <algorithm>
#include <cmath>
#include <numeric>

#include "classifier_common.hpp"
#include "emosens/classifiers.hpp"
#include "emosens/error.hpp"

namespace emosens {
namespace {

constexpr double kErrorFloor = 1e-10;

double gini_gain_score(const ClassScores& left, double wl, const ClassScores& right, double wr) {
  double s = 0.0;
  for (std::size_t k = 0; k < kNumEmotions; ++k) {
    if (wl > 0.0) s += left[k] * left[k] / wl;
    if (wr > 0.0) s += right[k] * right[k] / wr;
  }
  return s;
}

// Stump minimising weighted Gini impurity; each side predicts its weighted
// majority class.
Stump fit_stump(const Matrix& x, std::span<const Emotion> y, std::span<const double> w) {
  const std::size_t n = x.rows();
  ClassScores total{};
  for (std::size_t i = 0; i < n; ++i) total[index_of(y[i])] += w[i];

  Stump best;
  best.left_class = best.right_class = emotion_from_index(detail::argmax(total));
  double best_score = -1.0;

  std::vector<std::size_t> order(n);
  for (std::size_t f = 0; f < x.cols(); ++f) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x(a, f) < x(b, f); });
    ClassScores left{};
    ClassScores right = total;
    double wl = 0.0;
    const double wt = std::accumulate(total.begin(), total.end(), 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const std::size_t r = order[i];
      left[index_of(y[r])] += w[r];
      right[index_of(y[r])] -= w[r];
      wl += w[r];
      const double lo = x(r, f);
      const double hi = x(order[i + 1], f);
      if (lo == hi) continue;
      const double score = gini_gain_score(left, wl, right, wt - wl);
      if (score > best_score) {
        best_score = score;
        best.feature = static_cast<int>(f);
        best.threshold = detail::midpoint_threshold(lo, hi);
        best.left_class = emotion_from_index(detail::argmax(left));
        best.right_class = emotion_from_index(detail::argmax(right));
      }
    }
  }
  return best;
}

Emotion stump_predict(const Stump& s, std::span<const double> x) {
  if (s.feature < 0) return s.left_class;
  return x[static_cast<std::size_t>(s.feature)] <= s.threshold ? s.left_class : s.right_class;
}

}  // namespace

Model train_adaboost(const Matrix& x, std::span<const Emotion> y, const HyperParams& hp) {
  detail::check_training_set(x, y);
  Model model;
  model.hyperparams = resolved_hyperparams(ModelKind::AdaBoost, hp);
  model.n_features = x.cols();
  const auto n_rounds = static_cast<std::size_t>(model.hyperparams.get("n_rounds", 50));

  const std::size_t n = x.rows();
  const double k = static_cast<double>(kNumEmotions);
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<bool> miss(n);
  AdaBoostState state;

  for (std::size_t round = 0; round < n_rounds; ++round) {
    const Stump stump = fit_stump(x, y, w);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      miss[i] = stump_predict(stump, x.row(i)) != y[i];
      if (miss[i]) err += w[i];
    }
    err /= std::accumulate(w.begin(), w.end(), 0.0);

    if (err >= 1.0 - 1.0 / k) {
      // No better than chance. Keep the first stump so the model still
      // predicts its weighted majority.
      if (state.stumps.empty()) {
        state.stumps.push_back(stump);
        state.stump_weights.push_back(1.0);
      }
      break;
    }
    const double floored = std::max(err, kErrorFloor);
    const double alpha = std::log((1.0 - floored) / floored) + std::log(k - 1.0);
    state.stumps.push_back(stump);
    state.stump_weights.push_back(alpha);
    if (err <= 0.0) break;

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (miss[i]) w[i] *= std::exp(alpha);
      total += w[i];
    }
    for (double& v : w) v /= total;
  }
  model.state = std::move(state);
  return model;
}

}  // namespace emosens
